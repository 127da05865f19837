import logging
import os
from typing import List, Optional

import psutil


class ProcessManager:
    """
    Tracks the worker processes spawned for parallel scenario grids.

    The command line registers :meth:`cleanup` with ``atexit`` and the SIGINT/SIGTERM
    handlers so that an interrupted grid never leaves orphaned workers behind.
    """

    _instance: Optional["ProcessManager"] = None

    @classmethod
    def get_instance(cls) -> "ProcessManager":
        """Get the singleton instance, creating it on first use."""
        if cls._instance is None:
            cls._instance = ProcessManager()
        return cls._instance

    def __init__(self):
        self.parent_pid = os.getpid()
        self.tracked_pids = set()
        logging.debug(f"ProcessManager initialized for parent PID {self.parent_pid}")

    def track_workers(self) -> List[int]:
        """
        Record every live child process of this process as a grid worker.

        Returns:
            The PIDs newly added to tracking
        """
        try:
            children = psutil.Process(self.parent_pid).children(recursive=True)
        except psutil.Error as e:
            logging.warning(f"Could not list worker processes: {e}")
            return []
        added = [child.pid for child in children if child.pid not in self.tracked_pids]
        self.tracked_pids.update(added)
        if added:
            logging.debug(f"Tracking {len(added)} new worker PIDs. Total PIDs: {len(self.tracked_pids)}")
        return added

    def get_all_pids(self) -> List[int]:
        return sorted(self.tracked_pids)

    def clear_pids(self) -> None:
        """Forget all tracked PIDs (the pool has shut down cleanly)."""
        previous_count = len(self.tracked_pids)
        self.tracked_pids.clear()
        if previous_count:
            logging.debug(f"Cleared {previous_count} worker PIDs from tracker")

    def terminate_all_processes(self, timeout: float = 0.5) -> None:
        """
        Terminate tracked workers with SIGTERM, then SIGKILL whatever survives ``timeout``.
        """
        procs = []
        for pid in list(self.tracked_pids):
            try:
                proc = psutil.Process(pid)
                proc.terminate()
                procs.append(proc)
                logging.info(f"Sent SIGTERM to worker PID {pid}")
            except psutil.NoSuchProcess:
                logging.debug(f"Worker {pid} already exited")
            except psutil.Error as e:
                logging.error(f"Error terminating worker {pid}: {e}")

        _, alive = psutil.wait_procs(procs, timeout=timeout)
        for proc in alive:
            try:
                proc.kill()
                logging.info(f"Sent SIGKILL to worker PID {proc.pid}")
            except psutil.Error as e:
                logging.error(f"Error killing worker {proc.pid}: {e}")
        self.clear_pids()

    def cleanup(self) -> None:
        """Terminate any workers still tracked; safe to call more than once."""
        if os.getpid() != self.parent_pid:
            return
        if self.tracked_pids:
            logging.info(f"Cleaning up {len(self.tracked_pids)} worker processes")
            self.terminate_all_processes()
