"""
ladder-entropy command line.

Every RunConfig field has a flag of the same name (underscores become
dashes); flags override the --config YAML file, which overrides defaults.
Summaries go to stdout, logs to stderr, reports to --output-dir.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from src.application.use_cases.pipelines import EstimateResult, LadderPipeline, bipartition_for
from src.infrastructure.config.settings import ConfigLoader, RunConfig
from src.infrastructure.persistence.files import write_csv
from src.infrastructure.persistence.reports import (
    write_curve_csv,
    write_model_json,
    write_phase_csv,
    write_subsample_csv,
)
from src.infrastructure.persistence.shot_files import write_counts_file
from src.presentation.schemas.reports import GroundStateReportSchema, GroundStateSchema, config_payload
from src.shared.errors import LadderEntropyError
from src.shared.logging import configure_logging, get_logger

logger = get_logger(__name__)

SWEEP_SUMMARY_COLUMNS = [
    "parameter",
    "n_atoms",
    "size_a",
    "i_unfiltered",
    "i_at_smallest_pmin",
    "p_star",
    "i_at_inflection",
    "i_at_inflection_alt",
    "reference_svn",
    "reliable",
    "failure",
]

# (flag, dest, type, help); booleans are handled separately
CONFIG_FLAGS = [
    ("--n-rungs", "n_rungs", int, "number of ladder rungs (atoms = 2 x rungs)"),
    ("--rb-over-a", "rb_over_a", float, "blockade radius over lattice spacing"),
    ("--delta-over-omega", "delta_over_omega", float, "detuning over Rabi frequency"),
    ("--size-a", "size_a", int, "atoms in subsystem A (default: half)"),
    ("--grid-min-exponent", "grid_min_exponent", float, "log10 of the smallest positive p_min"),
    ("--grid-max-exponent", "grid_max_exponent", float, "log10 of the largest p_min"),
    ("--grid-points", "grid_points", int, "number of log-spaced p_min values"),
    ("--shots", "shots", int, "sample this many shots from the exact state"),
    ("--min-count", "min_count", int, "drop bitstrings observed fewer times before sweeping"),
    ("--seed", "seed", int, "seed for solver start vector and sampling"),
    ("--tol", "tol", float, "eigensolver residual tolerance"),
    ("--max-iterations", "max_iterations", int, "eigensolver iteration cap"),
    ("--subsample-size", "subsample_size", int, "shots per subsample"),
    ("--n-subsamples", "n_subsamples", int, "number of subsamples"),
    ("--cache-dir", "cache_dir", Path, "ground-state cache directory"),
    ("--output-dir", "output_dir", Path, "report output directory"),
    ("--max-exact-atoms", "max_exact_atoms", int, "exact-solve atom ceiling"),
    ("--workers", "workers", int, "threads for sweeps and subsamples"),
    ("--omega-mhz", "omega_mhz", float, "Rabi frequency metadata (MHz)"),
    ("--rb-um", "rb_um", float, "blockade radius metadata (micrometres)"),
]


def _config_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, help="flat YAML file with RunConfig keys")
    parent.add_argument("--verbose", "-v", action="store_true", help="enable debug logging")
    parent.add_argument("--no-cache", action="store_true", help="always re-solve, never touch the cache")
    parent.add_argument(
        "--allow-large",
        action="store_true",
        default=None,
        help="permit exact solves above the atom ceiling (memory grows as 2^atoms)",
    )
    for flag, dest, kind, text in CONFIG_FLAGS:
        parent.add_argument(flag, dest=dest, type=kind, default=None, help=text)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _config_parent()
    parser = argparse.ArgumentParser(
        prog="ladder-entropy",
        description="Bipartite entanglement of Rydberg ladders from bitstring mutual information",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("ground-state", parents=[parent], help="solve, cache and summarize the ground state")
    commands.add_parser("estimate", parents=[parent], help="filtered mutual-information estimate")

    volume = commands.add_parser("sweep-volume", parents=[parent], help="estimates over ladder sizes")
    volume.add_argument("--rungs", type=int, nargs="+", required=True)

    spacing = commands.add_parser("sweep-spacing", parents=[parent], help="estimates over R_b/a")
    spacing.add_argument("--values", type=float, nargs="+", required=True)

    cuts = commands.add_parser("sweep-bipartition", parents=[parent], help="estimates over |A|")
    cuts.add_argument("--sizes", type=int, nargs="+", required=True)

    phase = commands.add_parser("phase-scan", parents=[parent], help="S^vN and bound chain on a parameter grid")
    phase.add_argument("--rb-values", type=float, nargs="+", required=True)
    phase.add_argument("--delta-values", type=float, nargs="+", required=True)

    ingest = commands.add_parser("ingest", parents=[parent], help="estimate from a shot file")
    ingest.add_argument("path", type=Path)
    ingest.add_argument("--format", dest="shot_format", choices=["auto", "lines", "counts"], default="auto")

    sample = commands.add_parser("sample", parents=[parent], help="write sampled shot counts")
    sample.add_argument("--n-shots", type=int, required=True)
    sample.add_argument("--output", type=Path, help="counts file (default: under --output-dir)")

    subsample = commands.add_parser("subsample", parents=[parent], help="subsample error bars of I(p_min)")
    subsample.add_argument("--shots-file", type=Path, help="shot pool (default: --shots fresh samples)")
    subsample.add_argument("--format", dest="shot_format", choices=["auto", "lines", "counts"], default="auto")

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {dest: getattr(args, dest) for _, dest, _, _ in CONFIG_FLAGS}
    overrides["allow_large"] = args.allow_large
    return ConfigLoader(args.config).resolve(overrides)


def _label(config: RunConfig) -> str:
    source = f"shots{config.shots}" if config.shots is not None else "exact"
    return f"r{config.n_rungs}_rb{config.rb_over_a:g}_d{config.delta_over_omega:g}_a{config.resolved_size_a}_{source}"


def _emit_estimate(result: EstimateResult, stem: str) -> None:
    output_dir = result.config.output_dir
    json_path = write_model_json(output_dir / f"{stem}.json", result.to_schema())
    csv_path = write_curve_csv(output_dir / f"{stem}_curve.csv", result.report.curve)
    report = result.report
    print(f"{stem}: I_unfiltered={report.i_unfiltered:.6f}", end="")
    if report.i_at_inflection is not None:
        print(f" I_inflection={report.i_at_inflection:.6f} p_star={report.p_star:.3e}", end="")
    if report.reference_svn is not None:
        print(f" S_vN={report.reference_svn:.6f}", end="")
    if report.failure is not None:
        print(f" failure={report.failure!r}", end="")
    print()
    print(f"  wrote {json_path} and {csv_path}")


def _emit_sweep(name: str, parameter: Callable[[RunConfig], Any], results: Sequence[EstimateResult]) -> None:
    rows: List[List[Any]] = []
    for result in results:
        _emit_estimate(result, f"{name}_{_label(result.config)}")
        report = result.report
        rows.append(
            [
                parameter(result.config),
                result.config.n_atoms,
                result.config.resolved_size_a,
                report.i_unfiltered,
                report.i_at_smallest_pmin,
                report.p_star,
                report.i_at_inflection,
                report.i_at_inflection_alt,
                report.reference_svn,
                not (result.state is not None and result.state.degenerate),
                report.failure,
            ]
        )
    if results:
        summary = write_csv(results[0].config.output_dir / f"{name}.csv", SWEEP_SUMMARY_COLUMNS, rows)
        print(f"wrote {summary}")


def cmd_ground_state(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    solved = pipeline.solve(config)
    state = solved.state
    report = GroundStateReportSchema(
        config=config_payload(config),
        geometry=solved.geometry.as_report(),
        state=GroundStateSchema.from_domain(state),
        size_a=config.resolved_size_a,
        s_vn=solved.s_vn,
        reliable=not state.degenerate,
        cache_path=str(solved.cache_path) if solved.cache_path is not None else None,
    )
    path = write_model_json(config.output_dir / f"ground_state_{_label(config)}.json", report)
    print(
        f"energy={state.energy:.12f} gap={state.gap:.6e} S_vN={solved.s_vn:.6f} "
        f"solver={state.solver} residual={state.residual_norm:.3e}"
    )
    if state.degenerate:
        print("warning: near-degenerate ground state; entanglement values are unreliable")
    print(f"wrote {path}")


def cmd_estimate(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    _emit_estimate(pipeline.estimate(config), f"estimate_{_label(config)}")


def cmd_sweep_volume(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    _emit_sweep("sweep_volume", lambda item: item.n_rungs, pipeline.sweep_volume(config, args.rungs))


def cmd_sweep_spacing(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    _emit_sweep("sweep_spacing", lambda item: item.rb_over_a, pipeline.sweep_spacing(config, args.values))


def cmd_sweep_bipartition(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    _emit_sweep("sweep_bipartition", lambda item: item.resolved_size_a, pipeline.sweep_bipartition(config, args.sizes))


def cmd_phase_scan(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    rows = pipeline.phase_scan(config, args.rb_values, args.delta_values)
    path = write_phase_csv(config.output_dir / f"phase_scan_r{config.n_rungs}_a{config.resolved_size_a}.csv", rows)
    print(f"{len(rows)} cells; wrote {path}")


def cmd_ingest(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    result = pipeline.ingest(args.path, args.shot_format, config)
    _emit_estimate(result, f"ingest_{Path(args.path).stem}_a{bipartition_for(config).size_a}")


def cmd_sample(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    counts = pipeline.sample(config, args.n_shots)
    target = args.output or config.output_dir / f"shots_{_label(config)}_n{args.n_shots}_seed{config.seed}.csv"
    path = write_counts_file(target, counts)
    print(f"{counts.total} shots, {counts.counts.size} distinct bitstrings; wrote {path}")


def cmd_subsample(pipeline: LadderPipeline, config: RunConfig, args: argparse.Namespace) -> None:
    errors = pipeline.subsample(config, args.shots_file, args.shot_format)
    source = Path(args.shots_file).stem if args.shots_file is not None else _label(config)
    path = write_subsample_csv(
        config.output_dir / f"subsample_{source}_m{errors.sub_size}_k{errors.n_subsamples}.csv", errors
    )
    print(
        f"{errors.n_subsamples} subsamples of {errors.sub_size} shots: "
        f"I_unfiltered={errors.mean[0]:.6f} +/- {errors.std[0]:.6f}; wrote {path}"
    )


COMMANDS: Dict[str, Callable[[LadderPipeline, RunConfig, argparse.Namespace], None]] = {
    "ground-state": cmd_ground_state,
    "estimate": cmd_estimate,
    "sweep-volume": cmd_sweep_volume,
    "sweep-spacing": cmd_sweep_spacing,
    "sweep-bipartition": cmd_sweep_bipartition,
    "phase-scan": cmd_phase_scan,
    "ingest": cmd_ingest,
    "sample": cmd_sample,
    "subsample": cmd_subsample,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        config = resolve_config(args)
        COMMANDS[args.command](LadderPipeline(use_cache=not args.no_cache), config, args)
    except LadderEntropyError as exc:
        logger.error("command_failed", command=args.command, error=type(exc).__name__, exit_code=exc.exit_code)
        if args.verbose:
            logger.exception("command_traceback")
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
