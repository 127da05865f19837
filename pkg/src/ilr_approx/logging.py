import logging
import sys
import traceback
from datetime import datetime
from pathlib import Path
from typing import Optional

from ilr_approx.constants import LOG_LEVEL, LOGS_PATH


def setup_logging(level: str = LOG_LEVEL, logs_path: Optional[Path] = LOGS_PATH) -> bool:
    """Configure logging for the ilr-approx command line.

    Messages always go to stderr. When ``logs_path`` is set (``ILR_APPROX_LOGS_PATH``),
    a timestamped log file is written there as well.
    """
    try:
        handlers = [logging.StreamHandler(sys.stderr)]
        log_file = None
        if logs_path is not None:
            # Create logs directory if it doesn't exist
            logs_path.mkdir(parents=True, exist_ok=True)
            timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
            log_file = logs_path / f"ilr_approx_{timestamp}.log"
            handlers.append(logging.FileHandler(log_file))

        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            format="%(asctime)s [%(levelname)s] %(message)s",
            handlers=handlers,
            force=True,
        )

        if log_file is not None:
            logging.info(f"Logging initialized. Log file: {log_file}")
        return True
    except Exception as e:
        print(f"Error setting up logging: {str(e)}", file=sys.stderr)
        print(f"Traceback: {traceback.format_exc()}", file=sys.stderr)
        return False
