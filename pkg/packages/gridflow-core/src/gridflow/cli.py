"""Command-line interface: solve, distsolve, partition, compare and bench."""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from pydantic import BaseModel, ValidationError

from gridflow.config import Settings, SolverOptions, StartMode, get_settings
from gridflow.distributed.benchmark import benchmark
from gridflow.distributed.compare import compare_solutions
from gridflow.distributed.runner import run_distributed
from gridflow.exceptions import GridflowError
from gridflow.fdpf.models import PowerFlowState, Solution
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.io import load_case
from gridflow.grid.models import Network
from gridflow.partition.areas import read_area_map, split_areas
from gridflow.partition.boundary import boundary_injections, perturb_state, select_area_slacks
from gridflow.reports import (
    DistributedReport,
    PartitionReport,
    SolutionReport,
    benchmark_csv,
    load_solution_report,
    render_diff,
    render_text,
)
from gridflow.sparse.pool import WorkerPool

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_CHECK_FAILED = 3


def _thread_list(value: str) -> list[int]:
    try:
        counts = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {value!r}"
        ) from None
    if not counts or any(c < 1 for c in counts):
        raise argparse.ArgumentTypeError(f"thread counts must be >= 1, got {value!r}")
    return counts


def _add_solver_args(parser: argparse.ArgumentParser, thread_list: bool = False) -> None:
    parser.add_argument("--tol", type=float, help="Mismatch tolerance (per-unit)")
    parser.add_argument("--max-iter", type=int, help="Maximum iterations")
    parser.add_argument("--start", choices=[m.value for m in StartMode], help="Initial profile")
    if thread_list:
        parser.add_argument(
            "--threads", type=_thread_list, default=[1], help="Comma-separated thread counts"
        )
    else:
        parser.add_argument("--threads", type=int, help="Worker threads (default: all CPUs)")


def _add_output_args(parser: argparse.ArgumentParser, formats: Sequence[str]) -> None:
    parser.add_argument("--format", choices=formats, default="text", help="Report format")
    parser.add_argument("-o", "--output", type=Path, help="Write the report here")


def _add_reference_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--noise", type=float, default=0.0, help="Gaussian sigma added to the reference state"
    )
    parser.add_argument("--seed", type=int, help="Seed of the reference noise")


def _add_check_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--check", action="store_true", help="Fail with exit code 3 beyond the diff thresholds"
    )
    parser.add_argument("--top-k", type=int, help="Worst buses listed in the diff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridflow",
        description="Graph-structured fast decoupled power flow with area decomposition.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging (-v info, -vv debug)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve one case monolithically")
    solve.add_argument("case", type=Path)
    _add_solver_args(solve)
    _add_output_args(solve, ["text", "json"])

    dist = sub.add_parser("distsolve", help="Solve areas independently and compare")
    dist.add_argument("case", type=Path)
    dist.add_argument("areas", type=Path)
    _add_solver_args(dist)
    _add_reference_args(dist)
    _add_check_args(dist)
    _add_output_args(dist, ["text", "json"])

    part = sub.add_parser("partition", help="Split into areas and audit boundary injections")
    part.add_argument("case", type=Path)
    part.add_argument("areas", type=Path)
    _add_solver_args(part)
    _add_reference_args(part)
    _add_output_args(part, ["text", "json"])

    compare = sub.add_parser("compare", help="Compare two JSON solution reports")
    compare.add_argument("first", type=Path)
    compare.add_argument("second", type=Path)
    _add_check_args(compare)
    _add_output_args(compare, ["text", "json"])

    bench = sub.add_parser("bench", help="Thread-scaling benchmark")
    bench.add_argument("case", type=Path)
    bench.add_argument("areas", type=Path)
    _add_solver_args(bench, thread_list=True)
    bench.add_argument("--repeats", type=int, help="Timed runs per cell")
    bench.add_argument("--warmup", type=int, help="Untimed runs per cell")
    _add_output_args(bench, ["text", "json", "csv"])
    return parser


def _options(args: argparse.Namespace, settings: Settings) -> SolverOptions:
    threads = args.threads if isinstance(args.threads, int) else None
    return SolverOptions.from_settings(
        settings,
        tolerance=args.tol,
        max_iterations=args.max_iter,
        start=args.start,
        threads=threads,
    )


def _emit(args: argparse.Namespace, report: BaseModel, text: str | None = None) -> None:
    if args.format == "json":
        body = report.model_dump_json(indent=2)
    else:
        body = text if text is not None else render_text(report)  # type: ignore[arg-type]
    if args.output is not None:
        args.output.write_text(body + "\n", encoding="utf-8")
        logger.info("Report written to %s", args.output)
    else:
        print(body)


def _reference(
    net: Network,
    options: SolverOptions,
    args: argparse.Namespace,
    pool: WorkerPool,
    settings: Settings,
) -> tuple[Solution, PowerFlowState]:
    monolithic = fdpf_solve(net, options, pool=pool, settings=settings)
    state = monolithic.state
    if args.noise > 0:
        state = perturb_state(net, state, args.noise, args.seed)
    return monolithic, state


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    net = load_case(args.case)
    solution = fdpf_solve(net, _options(args, settings), settings=settings)
    _emit(args, SolutionReport.from_solution(net, solution))
    return EXIT_OK if solution.converged else EXIT_NOT_CONVERGED


def cmd_distsolve(args: argparse.Namespace, settings: Settings) -> int:
    net = load_case(args.case)
    area_map = read_area_map(args.areas)
    options = _options(args, settings)
    with WorkerPool(options.threads) as pool:
        monolithic, reference = _reference(net, options, args, pool, settings)
        if not monolithic.converged:
            print("error: monolithic reference solve did not converge", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        result = run_distributed(net, area_map, reference, options, pool, settings)
    diff = compare_solutions(monolithic, result.merged, args.top_k or settings.top_k)
    report = DistributedReport.from_distributed(net, result, diff, args.noise)
    _emit(args, report)
    if not result.converged:
        return EXIT_NOT_CONVERGED
    return _check(args, settings, diff.within)


def cmd_partition(args: argparse.Namespace, settings: Settings) -> int:
    net = load_case(args.case)
    area_map = read_area_map(args.areas)
    partition = split_areas(net, area_map)
    options = _options(args, settings)
    with WorkerPool(options.threads) as pool:
        monolithic, reference = _reference(net, options, args, pool, settings)
    if not monolithic.converged:
        logger.warning("Reference solve did not converge; injections use its last iterate")
    injections = boundary_injections(net, partition, reference)
    slacks = select_area_slacks(partition, net, reference)
    _emit(args, PartitionReport.from_partition(net, partition, injections, slacks))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: Settings) -> int:
    first = load_solution_report(args.first)
    second = load_solution_report(args.second)
    diff = compare_solutions(first.profile(), second.profile(), args.top_k or settings.top_k)
    _emit(args, diff, render_diff(diff))
    return _check(args, settings, diff.within)


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    net = load_case(args.case)
    area_map = read_area_map(args.areas)
    options = _options(args, settings)
    table = benchmark(
        net,
        area_map,
        args.threads,
        options,
        repeats=args.repeats,
        warmup=args.warmup,
        settings=settings,
    )
    if args.format == "csv":
        text = benchmark_csv(table).rstrip("\n")
    else:
        text = f"{render_text(table)}\n\n{benchmark_csv(table).rstrip()}"
    _emit(args, table, text)
    return EXIT_OK


def _check(
    args: argparse.Namespace, settings: Settings, within: Callable[[float, float], bool]
) -> int:
    if not args.check:
        return EXIT_OK
    if within(settings.check_max_angle_deg, settings.check_max_vm_pu):
        return EXIT_OK
    print(
        f"error: difference exceeds {settings.check_max_angle_deg} deg / "
        f"{settings.check_max_vm_pu} pu",
        file=sys.stderr,
    )
    return EXIT_CHECK_FAILED


COMMANDS = {
    "solve": cmd_solve,
    "distsolve": cmd_distsolve,
    "partition": cmd_partition,
    "compare": cmd_compare,
    "bench": cmd_bench,
}


def _configure_logging(verbose: int, settings: Settings) -> None:
    level = logging.getLevelName(settings.log_level)
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = min(level, logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the gridflow command line.

    Returns:
        0 on success, 1 on input errors, 2 when a solve does not converge, 3 when
        --check thresholds are exceeded.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"error: invalid GRIDFLOW_ settings: {e}", file=sys.stderr)
        return EXIT_INPUT
    _configure_logging(args.verbose, settings)
    try:
        return COMMANDS[args.command](args, settings)
    except GridflowError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
