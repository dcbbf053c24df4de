"""
Multiscatter - Monostatic vs. Multistatic Backscatter Network Analysis

Command-line entry point for the experiment runner.

Usage:
    python -m main [command] [options]

Commands:
    ber           BER versus SNR (or transmit power) for coherent and noncoherent detection
    outage        Average information outage versus SINR threshold
    energy        Average and maximum energy outage versus harvesting threshold
    diversity     High-SNR slope of the closed-form BER curves
    place         Rank carrier-emitter layouts by outage metric
    clear-cache   Clear cached Monte-Carlo results

Examples:
    # BER comparison at line-of-sight fading
    python -m main ber --preset fig4

    # Closed forms only, no Monte-Carlo
    python -m main ber --preset fig5 --analytic-only

    # Energy outage with a custom configuration and four workers
    python -m main energy --preset fig9 --config my_run.json --threads 4

    # Verbose logging
    python -m main outage --preset fig10 --verbose
"""

import argparse
import math
import sys
import time
from collections.abc import Callable
from pathlib import Path

import pandas as pd

from analysis.closed_form import AnalyticError
from analysis.specfun import SpecialFunctionError
from config import DEFAULT_THREADS, OUTPUT_DIR, PRESET_NAMES, REFERENCE_OUTAGE_LEVEL
from data.cache import ResultCache, make_key
from data.config_loader import TRIALS_FIELD, ConfigError, load_scenario
from data.writer import RunManifest, write_result
from radio.topology import TopologyError
from simulation import (
    ScenarioSpec,
    SimulationError,
    SimulationKernel,
    SweepMode,
    architecture_gap,
)
from utils.logging import get_logger, progress_logging, setup_logging

# Module logger
logger = get_logger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INTERRUPTED = 130

NUMERIC_ERRORS = (SpecialFunctionError, AnalyticError, SimulationError, FloatingPointError)


# =============================================================================
# Shared helpers
# =============================================================================


def _banner(title: str) -> None:
    logger.info("=" * 60)
    logger.info("MULTISCATTER - %s", title)
    logger.info("=" * 60)


def _results_header() -> None:
    logger.info("")
    logger.info("-" * 60)
    logger.info("RESULTS")
    logger.info("-" * 60)


def _load_spec(command: str, args: argparse.Namespace) -> ScenarioSpec:
    """Resolve preset, config file and CLI overrides for one command."""
    overrides = {"seed": args.seed}
    if command in TRIALS_FIELD:
        overrides[TRIALS_FIELD[command]] = args.trials
    if getattr(args, "analytic_only", False):
        overrides["analytic_only"] = True

    spec = load_scenario(command, args.preset, args.config, overrides)
    logger.info("Preset: %s", args.preset or "(none)")
    if args.config:
        logger.info("Config: %s", args.config)
    logger.info("Seed: %d", spec.seed)
    return spec


def _kernel(spec: ScenarioSpec, args: argparse.Namespace) -> SimulationKernel:
    return SimulationKernel(spec, threads=args.threads, show_progress=not args.quiet)


def _cached_frame(
    args: argparse.Namespace, spec: ScenarioSpec, compute: Callable[[], pd.DataFrame]
) -> pd.DataFrame:
    """Return the cached result frame for this run, computing and storing it on a miss."""
    cache = ResultCache(enabled=not args.no_cache)
    config = spec.to_dict()
    key = make_key(spec.command, config, spec.seed, config.get(TRIALS_FIELD.get(spec.command, "trials"), 0))

    frame = cache.get(key)
    if frame is not None:
        logger.info("Using cached result %s", key[:12])
        return frame

    frame = compute()
    cache.set(key, frame)
    return frame


def _write_outputs(
    args: argparse.Namespace,
    spec: ScenarioSpec,
    frame: pd.DataFrame,
    x_column: str,
    series_columns: list[str],
    started: float,
) -> list[Path]:
    """Write CSV, gnuplot data and the run manifest into the output directory."""
    out_dir = args.out or OUTPUT_DIR / spec.command
    manifest = RunManifest(command=spec.command, config=spec.to_dict(), seed=spec.seed)
    paths = write_result(frame, out_dir, spec.command, x_column, series_columns, manifest)
    manifest.wall_time_s = time.perf_counter() - started
    manifest_path = manifest.write(out_dir)
    logger.info("Manifest: %s", manifest_path)
    return [*paths, manifest_path]


def _log_gaps(spec: ScenarioSpec, frame: pd.DataFrame, x_column: str, value_column: str) -> None:
    """Log the multistatic advantage at the reference outage level, per fading law."""
    if len(spec.architectures) < 2:
        return
    for law in spec.fadings:
        gap = architecture_gap(frame, x_column, value_column, REFERENCE_OUTAGE_LEVEL, law.name)
        if math.isnan(gap):
            logger.info("  %-24s gap at %.0f%%: not reached", law.name, 100 * REFERENCE_OUTAGE_LEVEL)
        else:
            logger.info(
                "  %-24s multistatic gain at %.0f%%: %+.2f dB", law.name, 100 * REFERENCE_OUTAGE_LEVEL, gap
            )


# =============================================================================
# Commands
# =============================================================================


def cmd_ber(args: argparse.Namespace) -> int:
    """BER versus SNR or transmit power."""
    _banner("BER")
    started = time.perf_counter()
    spec = _load_spec("ber", args)
    if spec.analytic_only:
        logger.info("Analytic only: Monte-Carlo skipped")
    else:
        logger.info("Trials per point: %d", spec.trials)

    frame = _cached_frame(args, spec, lambda: _kernel(spec, args).run_ber().frame)
    x_column = "snr_db" if spec.mode == SweepMode.FIXED_SNR else "ptx_dbm"
    _write_outputs(args, spec, frame, x_column, ["arch", "fading", "detector"], started)

    _results_header()
    last = frame.groupby(["arch", "fading", "detector"], sort=False).tail(1)
    for row in last.itertuples(index=False):
        logger.info(
            "  %-12s %-24s %-12s %s=%7.2f  ber=%.3e  exact=%.3e  bound=%.3e",
            row.arch,
            row.fading,
            row.detector,
            x_column,
            getattr(row, x_column),
            row.ber,
            row.exact,
            row.bound,
        )
    return EXIT_OK


def cmd_outage(args: argparse.Namespace) -> int:
    """Average information outage versus SINR threshold."""
    _banner("Information Outage")
    started = time.perf_counter()
    spec = _load_spec("outage", args)
    logger.info("Tags: %d, slots: %d, topologies: %d", spec.n_tags, spec.n_slots, spec.topologies)

    frame = _cached_frame(args, spec, lambda: _kernel(spec, args).run_info_outage().frame)
    _write_outputs(args, spec, frame, "theta_db", ["arch", "fading"], started)

    _results_header()
    _log_gaps(spec, frame, "theta_db", "mc")
    return EXIT_OK


def cmd_energy(args: argparse.Namespace) -> int:
    """Average and maximum energy outage versus harvesting threshold."""
    _banner("Energy Outage")
    started = time.perf_counter()
    spec = _load_spec("energy", args)
    logger.info("Tags: %d, slots: %d, mode: %s", spec.n_tags, spec.n_slots, spec.energy_mode)

    frame = _cached_frame(args, spec, lambda: _kernel(spec, args).run_energy_outage().frame)
    _write_outputs(args, spec, frame, "theta_h_dbm", ["arch", "fading"], started)

    _results_header()
    value_column = "avg" if frame["avg"].notna().any() else "avg_mc"
    _log_gaps(spec, frame, "theta_h_dbm", value_column)
    return EXIT_OK


def cmd_diversity(args: argparse.Namespace) -> int:
    """Diversity order from the closed-form BER curves."""
    _banner("Diversity Order")
    started = time.perf_counter()
    spec = _load_spec("diversity", args)
    lo, hi = spec.diversity_window
    logger.info("SNR window: [%.0f, %.0f] dB, %d points", lo, hi, spec.diversity_points)

    frame = _kernel(spec, args).run_diversity().frame
    _write_outputs(args, spec, frame, "slope", ["arch", "fading", "curve"], started)

    _results_header()
    for row in frame.itertuples(index=False):
        logger.info("  %-12s %-24s %-18s slope=%.4f", row.arch, row.fading, row.curve, row.slope)
    return EXIT_OK


def cmd_place(args: argparse.Namespace) -> int:
    """Rank carrier-emitter layouts."""
    _banner("Emitter Placement")
    started = time.perf_counter()
    spec = _load_spec("place", args)
    logger.info(
        "Metric: %s, emitters: %d, search: %s",
        spec.placement_metric,
        spec.n_slots,
        "exhaustive" if spec.exhaustive else f"{spec.t_max} random layouts",
    )

    frame = _cached_frame(args, spec, lambda: _kernel(spec, args).run_placement_search().frame)
    _write_outputs(args, spec, frame, "rank", [], started)

    _results_header()
    for row in frame.head(5).itertuples(index=False):
        logger.info("  #%-3d metric=%.4e  emitters=%s", row.rank, row.metric, row.emitters)
    return EXIT_OK


def cmd_clear_cache(args: argparse.Namespace) -> int:
    """Clear cached Monte-Carlo results."""
    _banner("Clear Cache")
    count = ResultCache().clear()
    logger.info("Cleared %d cached result files", count)
    return EXIT_OK


# =============================================================================
# Argument parsing
# =============================================================================


def _add_run_arguments(parser: argparse.ArgumentParser, trials_help: str | None) -> None:
    parser.add_argument(
        "--preset",
        "-p",
        choices=PRESET_NAMES,
        default=None,
        help="Named parameter set to start from",
    )
    parser.add_argument(
        "--config",
        "-c",
        type=Path,
        default=None,
        help="JSON run configuration (overrides preset values)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Master seed (overrides preset and config)",
    )
    if trials_help is not None:
        parser.add_argument(
            "--trials",
            "-n",
            type=int,
            default=None,
            help=trials_help,
        )
    parser.add_argument(
        "--threads",
        "-j",
        type=int,
        default=DEFAULT_THREADS,
        help=f"Worker threads; results do not depend on it (default: {DEFAULT_THREADS})",
    )
    parser.add_argument(
        "--out",
        "-o",
        type=Path,
        default=None,
        help="Output directory (default: output/<command>)",
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        help="Ignore and do not write the result cache",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per experiment."""
    parser = argparse.ArgumentParser(
        prog="multiscatter",
        description="Monostatic vs. multistatic backscatter networks: simulation and closed forms",
    )

    # Global arguments
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging (DEBUG level)",
    )
    parser.add_argument(
        "--quiet",
        "-q",
        action="store_true",
        help="Suppress progress bars",
    )
    parser.add_argument(
        "--log-file",
        type=Path,
        help="Log to file (in addition to console)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    ber_parser = subparsers.add_parser("ber", help="BER versus SNR or transmit power")
    _add_run_arguments(ber_parser, "Bits per sweep point")
    ber_parser.add_argument(
        "--analytic-only",
        action="store_true",
        help="Evaluate closed forms only, skip Monte-Carlo",
    )

    outage_parser = subparsers.add_parser("outage", help="Information outage versus SINR threshold")
    _add_run_arguments(outage_parser, "Number of random topologies")

    energy_parser = subparsers.add_parser("energy", help="Energy outage versus harvesting threshold")
    _add_run_arguments(energy_parser, "Number of random topologies")

    diversity_parser = subparsers.add_parser("diversity", help="Diversity order of the BER curves")
    _add_run_arguments(diversity_parser, None)

    place_parser = subparsers.add_parser("place", help="Rank carrier-emitter layouts")
    _add_run_arguments(place_parser, "Number of random layouts (T_max)")

    subparsers.add_parser("clear-cache", help="Clear cached Monte-Carlo results")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    log_file = args.log_file or (OUTPUT_DIR / "multiscatter.log" if args.verbose else None)
    setup_logging(verbose=args.verbose, log_file=log_file)

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    if not hasattr(args, "trials"):
        args.trials = None

    # Route to command handler
    commands = {
        "ber": cmd_ber,
        "outage": cmd_outage,
        "energy": cmd_energy,
        "diversity": cmd_diversity,
        "place": cmd_place,
        "clear-cache": cmd_clear_cache,
    }

    handler = commands.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_UNEXPECTED

    try:
        with progress_logging():
            return handler(args)
    except (ConfigError, TopologyError) as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.exception("Unexpected error: %s", e)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
