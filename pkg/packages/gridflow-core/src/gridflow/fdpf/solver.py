"""Fast decoupled power flow iteration over factor-once B' and B''."""

import logging
import time
from contextlib import ExitStack

import numpy as np

from gridflow.admittance import build_fdpf_matrices, build_ybus
from gridflow.config import Settings, SolverOptions, StartMode, get_settings
from gridflow.exceptions import SlacklessIslandError
from gridflow.fdpf.flows import branch_flows
from gridflow.fdpf.mismatch import MismatchEvaluator
from gridflow.fdpf.models import (
    ExtraInjections,
    Half,
    HalfIteration,
    Mismatch,
    PhaseTimings,
    PowerFlowState,
    Solution,
)
from gridflow.grid.models import Network, NetworkArrays
from gridflow.grid.topology import validate_topology
from gridflow.sparse.cholesky import CholeskyFactor, factorize, solve
from gridflow.sparse.matrix import SparseMatrix
from gridflow.sparse.pool import WorkerPool

logger = logging.getLogger(__name__)


def _ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def initial_state(arrays: NetworkArrays, start: StartMode) -> PowerFlowState:
    """Starting voltages.

    Non-flat takes the case vm0/va0; flat uses 1.0 p.u. and zero angle. In both
    modes slack angles keep their case value and generator buses start at their
    setpoint magnitude.
    """
    if start is StartMode.FLAT:
        vm = np.ones(arrays.n_bus)
        va = np.where(arrays.slack, arrays.va0, 0.0)
    else:
        vm = arrays.vm0.copy()
        va = arrays.va0.copy()
    regulated = (arrays.pv | arrays.slack) & arrays.has_gen
    vm[regulated] = arrays.vset[regulated]
    return PowerFlowState(vm=vm, va=va)


def _check_islands(net: Network) -> None:
    for component in validate_topology(net):
        if not component.has_slack:
            raise SlacklessIslandError(component.buses)


def _factorize(matrix: SparseMatrix, pool: WorkerPool, chunk: int) -> CholeskyFactor | None:
    return factorize(matrix, pool=pool, chunk_size=chunk) if matrix.n else None


def fdpf_solve(
    net: Network,
    options: SolverOptions | None = None,
    injections: ExtraInjections | None = None,
    pool: WorkerPool | None = None,
    settings: Settings | None = None,
) -> Solution:
    """Solve the power flow of net with the XB fast decoupled method.

    Each iteration solves B'·Δθ = ΔP/|V|, updates θ, recomputes the mismatch, solves
    B''·Δ|V| = ΔQ/|V| and updates |V|. Convergence is tested on raw ΔP and ΔQ
    after every half. B' and B'' are factorized exactly once. Reactive limits of PV
    buses are not enforced.

    Args:
        net: Validated network with a slack bus in every island.
        options: Tolerance, iteration cap, start mode and thread count.
        injections: Extra per-bus loads (boundary equivalents).
        pool: Worker pool to run on; a private pool of options.threads is used if omitted.
        settings: Source of chunk sizes (cached settings if omitted).

    Returns:
        Solution; converged is False when the cap is reached or the iteration diverges.

    Raises:
        SlacklessIslandError: If an island has no slack bus.
        FactorizationError: If B' or B'' is not positive definite.
    """
    settings = settings or get_settings()
    options = options or SolverOptions.from_settings(settings)
    with ExitStack() as stack:
        if pool is None:
            pool = stack.enter_context(WorkerPool(options.threads))
        return _solve(net, options, injections, pool, settings)


def _solve(
    net: Network,
    options: SolverOptions,
    injections: ExtraInjections | None,
    pool: WorkerPool,
    settings: Settings,
) -> Solution:
    tol = options.tolerance
    started = time.perf_counter()
    _check_islands(net)
    arrays = NetworkArrays.from_network(net)
    ybus = build_ybus(net, arrays)
    matrices = build_fdpf_matrices(net, arrays)
    evaluator = MismatchEvaluator(
        net, ybus, arrays, injections, pool=pool, row_chunk=settings.row_chunk_size
    )
    build_ms = _ms(started)

    started = time.perf_counter()
    chunk = settings.level_chunk_size
    p_factor = _factorize(matrices.b_prime, pool, chunk)
    q_factor = _factorize(matrices.b_double_prime, pool, chunk)
    factorize_ms = _ms(started)

    started = time.perf_counter()
    state = initial_state(arrays, options.start)
    vm, va = state.vm, state.va
    p_buses, q_buses = matrices.p_buses, matrices.q_buses

    mismatch = evaluator.evaluate(state)
    history = [(mismatch.max_p, mismatch.max_q)]
    halves = [HalfIteration(0, Half.START, mismatch.max_p, mismatch.max_q)]
    converged = mismatch.below(tol)
    iterations = 0

    def record(half: Half, current: Mismatch) -> None:
        halves.append(HalfIteration(iterations, half, current.max_p, current.max_q))

    while not converged and iterations < options.max_iterations:
        iterations += 1
        if p_factor is not None:
            va[p_buses] += solve(p_factor, mismatch.dp_over_v, pool)
        mismatch = evaluator.evaluate(state)
        record(Half.P, mismatch)
        if mismatch.below(tol):
            converged = True
            break

        if q_factor is not None:
            vm[q_buses] += solve(q_factor, mismatch.dq_over_v, pool)
        if not np.all(np.isfinite(vm)) or np.any(vm <= 0) or not np.all(np.isfinite(va)):
            logger.warning("Iteration %d diverged: non-positive or non-finite voltage", iterations)
            history.append((float("inf"), float("inf")))
            break
        mismatch = evaluator.evaluate(state)
        record(Half.Q, mismatch)
        history.append((mismatch.max_p, mismatch.max_q))
        converged = mismatch.below(tol)
    else:
        if not converged:
            logger.warning(
                "Power flow did not converge in %d iterations (max dP=%.3e, max dQ=%.3e)",
                iterations,
                mismatch.max_p,
                mismatch.max_q,
            )
    if converged and len(history) <= iterations:
        history.append((mismatch.max_p, mismatch.max_q))
    iterate_ms = _ms(started)

    started = time.perf_counter()
    flows = branch_flows(net, state, arrays)
    flows_ms = _ms(started)

    if converged:
        logger.info(
            "Converged in %d iterations (%d buses, max dP=%.3e, max dQ=%.3e)",
            iterations,
            net.n_bus,
            mismatch.max_p,
            mismatch.max_q,
        )
    return Solution(
        bus_ids=arrays.bus_ids,
        state=state,
        converged=converged,
        iterations=iterations,
        history=tuple(history),
        half_history=tuple(halves),
        branch_flows=flows,
        timings=PhaseTimings(
            build_ms=build_ms,
            factorize_ms=factorize_ms,
            iterate_ms=iterate_ms,
            flows_ms=flows_ms,
        ),
    )
