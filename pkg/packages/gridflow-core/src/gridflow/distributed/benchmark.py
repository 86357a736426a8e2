"""Thread-scaling benchmark of monolithic and distributed solves."""

import logging
import statistics
import time
from collections.abc import Callable, Sequence
from enum import StrEnum

from pydantic import BaseModel, Field

from gridflow.config import Settings, SolverOptions, get_settings
from gridflow.distributed.runner import run_distributed
from gridflow.fdpf.models import PhaseTimings, PowerFlowState, Solution
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.models import Network
from gridflow.sparse.pool import WorkerPool

logger = logging.getLogger(__name__)


class Method(StrEnum):
    MONOLITHIC = "monolithic"
    DISTRIBUTED = "distributed"


class BenchmarkRow(BaseModel):
    """Timing of one method at one thread count, milliseconds."""

    method: Method
    threads: int = Field(ge=1)
    median_ms: float = Field(description="Median wall time over the timed runs")
    min_ms: float
    max_ms: float
    build_ms: float = Field(description="Median build phase (setup for distributed)")
    factorize_ms: float = Field(description="Median factorization phase")
    iterate_ms: float = Field(description="Median iteration phase (area solves for distributed)")
    repeats: int
    iterations: int
    converged: bool


class BenchmarkTable(BaseModel):
    """Method x thread-count timing table."""

    n_bus: int
    areas: int
    thread_counts: list[int]
    rows: list[BenchmarkRow] = Field(default_factory=list)

    def row(self, method: Method, threads: int) -> BenchmarkRow:
        for row in self.rows:
            if row.method is method and row.threads == threads:
                return row
        raise KeyError(f"No {method} row for {threads} threads")


def _time_runs(
    run: Callable[[], Solution], repeats: int, warmup: int
) -> tuple[list[float], list[PhaseTimings], Solution]:
    for _ in range(warmup):
        run()
    walls: list[float] = []
    phases: list[PhaseTimings] = []
    solution: Solution | None = None
    for _ in range(repeats):
        started = time.perf_counter()
        solution = run()
        walls.append((time.perf_counter() - started) * 1000.0)
        phases.append(solution.timings)
    assert solution is not None
    return walls, phases, solution


def _row(
    method: Method, threads: int, walls: list[float], phases: list[PhaseTimings], last: Solution
) -> BenchmarkRow:
    return BenchmarkRow(
        method=method,
        threads=threads,
        median_ms=statistics.median(walls),
        min_ms=min(walls),
        max_ms=max(walls),
        build_ms=statistics.median(p.build_ms for p in phases),
        factorize_ms=statistics.median(p.factorize_ms for p in phases),
        iterate_ms=statistics.median(p.iterate_ms for p in phases),
        repeats=len(walls),
        iterations=last.iterations,
        converged=last.converged,
    )


def benchmark(
    net: Network,
    area_map: dict[int, int],
    thread_counts: Sequence[int],
    options: SolverOptions | None = None,
    reference_state: PowerFlowState | None = None,
    repeats: int | None = None,
    warmup: int | None = None,
    settings: Settings | None = None,
) -> BenchmarkTable:
    """Median wall times of the monolithic and distributed solves per thread count.

    The reference state for the distributed pipeline is a single-threaded monolithic
    solve made once, outside the timed region, unless one is supplied.

    Args:
        net: Validated network.
        area_map: Bus id to area id.
        thread_counts: Worker counts to sweep, in table order.
        options: Solver options; the thread count is overridden per column.
        reference_state: Full-network state for boundary injections.
        repeats: Timed runs per cell (settings.bench_repeats if omitted).
        warmup: Untimed runs per cell (settings.bench_warmup if omitted).
        settings: Source of defaults.

    Returns:
        BenchmarkTable with one monolithic and one distributed row per thread count.
    """
    settings = settings or get_settings()
    options = options or SolverOptions.from_settings(settings)
    repeats = max(repeats if repeats is not None else settings.bench_repeats, 1)
    warmup = max(warmup if warmup is not None else settings.bench_warmup, 0)

    if reference_state is None:
        reference = fdpf_solve(net, options.model_copy(update={"threads": 1}), settings=settings)
        reference_state = reference.state
    state = reference_state

    rows: list[BenchmarkRow] = []
    n_areas = len(set(area_map.values()))
    for threads in thread_counts:
        opts = options.model_copy(update={"threads": threads})
        with WorkerPool(threads) as pool:

            def mono(pool: WorkerPool = pool, opts: SolverOptions = opts) -> Solution:
                return fdpf_solve(net, opts, pool=pool, settings=settings)

            def dist(pool: WorkerPool = pool, opts: SolverOptions = opts) -> Solution:
                return run_distributed(net, area_map, state, opts, pool, settings).merged

            walls, phases, last = _time_runs(mono, repeats, warmup)
            rows.append(_row(Method.MONOLITHIC, threads, walls, phases, last))
            walls, phases, last = _time_runs(dist, repeats, warmup)
            rows.append(_row(Method.DISTRIBUTED, threads, walls, phases, last))
        logger.info(
            "Benchmark %d threads: monolithic %.2f ms, distributed %.2f ms",
            threads,
            rows[-2].median_ms,
            rows[-1].median_ms,
        )
    return BenchmarkTable(
        n_bus=net.n_bus, areas=n_areas, thread_counts=list(thread_counts), rows=rows
    )
