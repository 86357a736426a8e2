"""Concurrent per-area solves merged into one full-network solution."""

import logging
import time
from contextlib import ExitStack
from dataclasses import dataclass, field

import numpy as np

from gridflow.config import Settings, SolverOptions, get_settings
from gridflow.fdpf.flows import branch_flows
from gridflow.fdpf.models import PhaseTimings, PowerFlowState, Solution
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.models import Network
from gridflow.partition.areas import split_areas
from gridflow.partition.boundary import (
    boundary_injections,
    build_area_network,
    select_area_slacks,
)
from gridflow.partition.models import AreaPartition, AreaSlack, BoundaryInjectionSet
from gridflow.sparse.pool import WorkerPool

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AreaTask:
    """One isolated area ready to solve."""

    area: int
    network: Network
    slack: AreaSlack


@dataclass(frozen=True, eq=False)
class DistributedSolution:
    """Merged full-network solution plus the per-area results it came from."""

    merged: Solution
    per_area: dict[int, Solution]
    slacks: dict[int, AreaSlack]
    partition: AreaPartition
    injections: BoundaryInjectionSet
    wall_time_ms: float
    thread_count: int
    failed_areas: tuple[int, ...] = field(default=())

    @property
    def converged(self) -> bool:
        return self.merged.converged


def _merge_history(solutions: list[Solution]) -> tuple[tuple[float, float], ...]:
    length = max(len(s.history) for s in solutions)
    merged = []
    for k in range(length):
        rows = [s.history[min(k, len(s.history) - 1)] for s in solutions]
        merged.append((max(r[0] for r in rows), max(r[1] for r in rows)))
    return tuple(merged)


def merge_solutions(
    net: Network, tasks: list[AreaTask], solutions: list[Solution], setup_ms: float, solve_ms: float
) -> Solution:
    """Assemble area states into a full-network solution; flows recomputed on net.

    Areas factorize concurrently, so factorize_ms is the slowest area's factorization
    and iterate_ms the rest of the solve wall time.
    """
    vm = np.empty(net.n_bus)
    va = np.empty(net.n_bus)
    for task, solution in zip(tasks, solutions, strict=True):
        index = np.array([net.index_of(b) for b in task.network.bus_ids], dtype=np.int64)
        vm[index] = solution.state.vm
        va[index] = solution.state.va
    state = PowerFlowState(vm=vm, va=va)
    factorize_ms = max(s.timings.factorize_ms for s in solutions)

    started = time.perf_counter()
    flows = branch_flows(net, state)
    flows_ms = (time.perf_counter() - started) * 1000.0
    return Solution(
        bus_ids=np.array(net.bus_ids, dtype=np.int64),
        state=state,
        converged=all(s.converged for s in solutions),
        iterations=max(s.iterations for s in solutions),
        history=_merge_history(solutions),
        half_history=(),
        branch_flows=flows,
        timings=PhaseTimings(
            build_ms=setup_ms,
            factorize_ms=factorize_ms,
            iterate_ms=max(solve_ms - factorize_ms, 0.0),
            flows_ms=flows_ms,
        ),
    )


def prepare_areas(
    net: Network, area_map: dict[int, int], reference_state: PowerFlowState
) -> tuple[AreaPartition, BoundaryInjectionSet, dict[int, AreaSlack], list[AreaTask]]:
    """split_areas, boundary_injections and select_area_slacks, in that order."""
    partition = split_areas(net, area_map)
    injections = boundary_injections(net, partition, reference_state)
    slacks = select_area_slacks(partition, net, reference_state)
    tasks = [
        AreaTask(area=area, network=build_area_network(partition, slacks[area]), slack=slacks[area])
        for area in partition.areas
    ]
    return partition, injections, slacks, tasks


def run_distributed(
    net: Network,
    area_map: dict[int, int],
    reference_state: PowerFlowState,
    options: SolverOptions | None = None,
    pool: WorkerPool | None = None,
    settings: Settings | None = None,
) -> DistributedSolution:
    """Solve every area concurrently from boundary-equivalent injections, then merge.

    Areas share one worker pool; the level and row work inside an area solve runs
    inline on that area's worker. No data crosses area borders after setup.

    Args:
        net: Validated full network.
        area_map: External bus id to area id.
        reference_state: Full-network state providing boundary flows and slack angles.
        options: Solver options applied identically to every area.
        pool: Worker pool; a private pool of options.threads is used if omitted.
        settings: Source of chunk sizes.

    Returns:
        DistributedSolution; merged.converged is False if any area failed.

    Raises:
        PartitionError: If the area map cannot be turned into solvable areas.
    """
    settings = settings or get_settings()
    options = options or SolverOptions.from_settings(settings)
    with ExitStack() as stack:
        if pool is None:
            pool = stack.enter_context(WorkerPool(options.threads))
        return _run(net, area_map, reference_state, options, pool, settings)


def _run(
    net: Network,
    area_map: dict[int, int],
    reference_state: PowerFlowState,
    options: SolverOptions,
    pool: WorkerPool,
    settings: Settings,
) -> DistributedSolution:
    started = time.perf_counter()
    partition, injections, slacks, tasks = prepare_areas(net, area_map, reference_state)
    extra = injections if injections else None
    setup_ms = (time.perf_counter() - started) * 1000.0

    solve_started = time.perf_counter()

    def solve_area(task: AreaTask) -> Solution:
        return fdpf_solve(task.network, options, extra, pool=pool, settings=settings)

    solutions = pool.map(solve_area, tasks)
    solve_ms = (time.perf_counter() - solve_started) * 1000.0

    merged = merge_solutions(net, tasks, solutions, setup_ms, solve_ms)
    failed = tuple(t.area for t, s in zip(tasks, solutions, strict=True) if not s.converged)
    if failed:
        logger.warning("Areas %s did not converge", ", ".join(str(a) for a in failed))
    wall_ms = (time.perf_counter() - started) * 1000.0
    logger.info(
        "Distributed solve: %d areas, max %d iterations, %.1f ms on %d threads",
        len(tasks),
        merged.iterations,
        wall_ms,
        pool.threads,
    )
    return DistributedSolution(
        merged=merged,
        per_area={t.area: s for t, s in zip(tasks, solutions, strict=True)},
        slacks=slacks,
        partition=partition,
        injections=injections,
        wall_time_ms=wall_ms,
        thread_count=pool.threads,
        failed_areas=failed,
    )
