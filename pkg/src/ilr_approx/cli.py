import argparse
import atexit
import logging
import signal
import sys
import traceback
from pathlib import Path
from typing import List, Optional

import pandas as pd

from ilr_approx.composition import contrast_matrix
from ilr_approx.config import RunConfig, build_scenarios, config_hash, find_scenario, load_config, table3_grid
from ilr_approx.constants import LOG_LEVEL, QUICK_N_DRAWS
from ilr_approx.errors import ConfigError, UnknownReferenceError
from ilr_approx.figures import composition_panel, log_ratio_figures
from ilr_approx.harness import (
    GridResult,
    Table3Grid,
    Variant,
    approximations_for,
    excess_variability_table,
    proportion_qq_series,
    qq_correlation,
    qq_series,
    run_grid,
    run_scenario,
    sample_scenario_counts,
)
from ilr_approx.logging import setup_logging
from ilr_approx.process_manager import ProcessManager
from ilr_approx.reports import (
    build_manifest,
    comparisons_frame,
    compositions_frame,
    qq_frame,
    read_manifest,
    summary_frame,
    table3_frame,
    write_csv,
    write_manifest,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARTIAL = 3
EXIT_BAD_REFERENCE = 4

COMPOSITION_PANEL_DRAWS = 100

_cleanup_registered = False


def cleanup_handler(signum=None, frame=None):
    """Terminate grid workers on exit or on SIGINT/SIGTERM."""
    ProcessManager.get_instance().cleanup()
    if signum is not None:
        logging.warning(f"Interrupted by signal {signum}")
        sys.exit(128 + signum)


def register_cleanup():
    """Install the exit and signal handlers once per process."""
    global _cleanup_registered
    if _cleanup_registered:
        return
    atexit.register(cleanup_handler)
    signal.signal(signal.SIGTERM, cleanup_handler)
    signal.signal(signal.SIGINT, cleanup_handler)
    _cleanup_registered = True


def cmd_table3(config: Optional[RunConfig], out_dir: Path) -> Path:
    """Write ``table3.csv`` and echo the table to stdout; without a config the full reference grid is used."""
    grid = table3_grid(config) if config is not None else Table3Grid()
    frame = table3_frame(excess_variability_table(grid))
    path = write_csv(frame, out_dir / "table3.csv")
    print(frame.to_markdown(index=False))
    return path


def cmd_simulate(config: RunConfig) -> List[GridResult]:
    """Run the grid and write per-scenario summaries, the comparisons table and the run manifest."""
    out_dir = Path(config.output_dir)
    scenarios = build_scenarios(config)
    results = run_grid(scenarios, config.parallel, config.correction_mode)
    for result in results:
        if result.ok:
            write_csv(summary_frame(result.summary), out_dir / "summaries" / f"{result.label}.csv")
    comparisons = comparisons_frame(results)
    write_csv(comparisons, out_dir / "comparisons.csv")
    write_manifest(out_dir / "manifest.json", build_manifest(config, scenarios, results))
    if config.emit_svg:
        log_ratio_figures(comparisons, out_dir / "figures")
    return results


def cmd_qq(config: RunConfig, label: str, coord_index: int, proportion: bool = False) -> Path:
    """Write the Q-Q series of one ilr coordinate (or one proportion) of a scenario; ``coord_index`` is 0-based."""
    scenario = find_scenario(build_scenarios(config), label)
    summary = run_scenario(scenario)
    if proportion:
        series = proportion_qq_series(summary, scenario.model, coord_index)
        name = f"{label}_part{coord_index + 1}.csv"
    else:
        if not 0 <= coord_index < summary.sorted_coords.shape[1]:
            n_coords = summary.sorted_coords.shape[1]
            raise UnknownReferenceError(f"Coordinate {coord_index + 1} out of range 1..{n_coords}")
        approx = approximations_for(scenario.model, contrast_matrix(scenario.sbp), config.correction_mode)
        series = qq_series(summary.sorted_coords[:, coord_index], approx[Variant.CORRECTED], coord_index)
        name = f"{label}_coord{coord_index + 1}.csv"
    logging.info(f"Q-Q correlation for {name[:-4]}: {qq_correlation(series):.6f}")
    return write_csv(qq_frame(series), Path(config.output_dir) / "qq" / name)


def cmd_figures(config: RunConfig) -> List[Path]:
    """Composition panels for every scenario plus log-ratio plots.

    Log-ratios come from ``comparisons.csv`` in the output directory when its manifest matches the config, otherwise
    the grid is simulated first.
    """
    out_dir = Path(config.output_dir)
    scenarios = build_scenarios(config)
    if not scenarios:
        logging.info("Empty grid, no figures to draw")
        return []

    written = []
    for scenario in scenarios:
        frame = compositions_frame(sample_scenario_counts(scenario, COMPOSITION_PANEL_DRAWS), scenario.zero_replacement)
        write_csv(frame, out_dir / "compositions" / f"{scenario.label}.csv")
        panel = out_dir / "figures" / f"composition_{scenario.label}.svg"
        written.append(composition_panel(frame, scenario.label, panel))

    comparisons = _stored_comparisons(config, out_dir)
    if comparisons is None:
        cmd_simulate(config)
        comparisons = pd.read_csv(out_dir / "comparisons.csv")
    written.extend(log_ratio_figures(comparisons, out_dir / "figures"))
    return written


def _stored_comparisons(config: RunConfig, out_dir: Path) -> Optional[pd.DataFrame]:
    """``comparisons.csv`` from ``out_dir`` when its manifest carries the hash of ``config``, else None."""
    comparisons_path = out_dir / "comparisons.csv"
    if not comparisons_path.exists():
        logging.info(f"{comparisons_path} not found, simulating the grid first")
        return None
    manifest = read_manifest(out_dir / "manifest.json")
    if manifest is None or manifest.get("config_hash") != config_hash(config):
        logging.info(f"{comparisons_path} was written for another configuration, simulating the grid again")
        return None
    return pd.read_csv(comparisons_path)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilr-approx", description="Normal approximations of ilr coordinates under compound multinomial counts."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
        p.add_argument("--log-level", default=None, help="logging level (default from ILR_APPROX_LOG_LEVEL)")

    add_common(sub.add_parser("table3", help="reproduce the excess variability table"), config_required=False)

    simulate = sub.add_parser("simulate", help="run the Monte Carlo grid")
    add_common(simulate)
    simulate.add_argument("--draws", type=int, default=None, help="draws per scenario")
    simulate.add_argument("--quick", action="store_true", help=f"use {QUICK_N_DRAWS} draws per scenario")
    simulate.add_argument("--seed", type=int, default=None, help="master seed")
    simulate.add_argument("--parallel", type=int, default=None, help="worker processes")

    qq = sub.add_parser("qq", help="Q-Q series of one scenario coordinate")
    add_common(qq)
    qq.add_argument("--scenario", required=True, help="scenario label, e.g. b_as101_K101")
    qq.add_argument("--coord", type=int, required=True, help="1-based ilr coordinate (or part with --proportion)")
    qq.add_argument("--proportion", action="store_true", help="Q-Q of a proportion instead of an ilr coordinate")
    qq.add_argument("--draws", type=int, default=None, help="draws for the scenario")
    qq.add_argument("--seed", type=int, default=None, help="master seed")

    add_common(sub.add_parser("figures", help="render SVG figures"))
    return parser


def _load(args) -> Optional[RunConfig]:
    if args.config is None:
        return None
    draws = getattr(args, "draws", None)
    if getattr(args, "quick", False) and draws is None:
        draws = QUICK_N_DRAWS
    return load_config(args.config).with_overrides(
        n_draws=draws,
        master_seed=getattr(args, "seed", None),
        parallel=getattr(args, "parallel", None),
        output_dir=args.out,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    setup_logging(level=args.log_level or LOG_LEVEL)

    register_cleanup()

    try:
        config = _load(args)
        if args.command == "table3":
            out_dir = Path(args.out) if args.out else Path(config.output_dir if config else "results")
            cmd_table3(config, out_dir)
        elif args.command == "simulate":
            results = cmd_simulate(config)
            failed = [r.label for r in results if not r.ok]
            if failed:
                logging.warning(f"Partial failure: {len(failed)} scenarios failed")
                return EXIT_PARTIAL
        elif args.command == "qq":
            cmd_qq(config, args.scenario, args.coord - 1, proportion=args.proportion)
        elif args.command == "figures":
            cmd_figures(config)
        return EXIT_OK
    except UnknownReferenceError as e:
        logging.error(f"Bad reference: {str(e)}")
        return EXIT_BAD_REFERENCE
    except (ConfigError, OSError) as e:
        logging.error(f"{type(e).__name__}: {str(e)}")
        return EXIT_IO
    except Exception as e:
        logging.critical(f"Fatal error in ilr-approx {args.command}: {str(e)}")
        logging.critical(f"Traceback: {traceback.format_exc()}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
