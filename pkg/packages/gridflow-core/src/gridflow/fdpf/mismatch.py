"""Bus power mismatch evaluation, one independent row chunk per work item."""

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import csr_matrix

from gridflow.fdpf.models import ExtraInjections, FloatArray, Mismatch, PowerFlowState
from gridflow.grid.models import Network, NetworkArrays
from gridflow.sparse.matrix import SparseMatrix
from gridflow.sparse.pool import SERIAL, WorkerPool

DEFAULT_ROW_CHUNK = 2048


def scheduled_injections(
    net: Network,
    arrays: NetworkArrays,
    injections: ExtraInjections | None = None,
) -> tuple[FloatArray, FloatArray]:
    """(P_spec, Q_spec) per bus: generation minus load minus extra boundary load."""
    p_spec = arrays.pg - arrays.pd
    q_spec = arrays.qg - arrays.qd
    if injections is not None:
        p_extra, q_extra = injections.as_arrays(net)
        p_spec = p_spec - p_extra
        q_spec = q_spec - q_extra
    return p_spec, q_spec


class MismatchEvaluator:
    """Evaluates ΔP over non-slack buses and ΔQ over PQ buses for successive states.

    Each bus's computed injection S_i = V_i·conj(Σ_j Y_ij V_j) needs only its own row
    of Ybus, so rows are cut into fixed-size chunks evaluated independently.
    """

    def __init__(
        self,
        net: Network,
        ybus: SparseMatrix,
        arrays: NetworkArrays | None = None,
        injections: ExtraInjections | None = None,
        pool: WorkerPool = SERIAL,
        row_chunk: int = DEFAULT_ROW_CHUNK,
    ) -> None:
        arrays = arrays or NetworkArrays.from_network(net)
        self._ybus = ybus.csc.tocsr()
        self._pool = pool
        self._p_spec, self._q_spec = scheduled_injections(net, arrays, injections)
        self.p_buses = arrays.nonslack_idx.astype(np.int64)
        self.q_buses = arrays.pq_idx.astype(np.int64)
        n = arrays.n_bus
        step = max(row_chunk, 1)
        self._chunks = [
            (start, min(start + step, n), self._ybus[start : min(start + step, n), :])
            for start in range(0, n, step)
        ]

    def injections(self, state: PowerFlowState) -> NDArray[np.complex128]:
        """Computed complex injection at every bus."""
        voltage = state.voltage
        s = np.empty(voltage.size, dtype=complex)

        def run(chunk: tuple[int, int, csr_matrix]) -> None:
            start, end, rows = chunk
            s[start:end] = voltage[start:end] * np.conj(rows @ voltage)

        self._pool.map(run, self._chunks)
        return s

    def evaluate(self, state: PowerFlowState) -> Mismatch:
        s = self.injections(state)
        dp = self._p_spec[self.p_buses] - s.real[self.p_buses]
        dq = self._q_spec[self.q_buses] - s.imag[self.q_buses]
        return Mismatch(
            dp=dp,
            dq=dq,
            dp_over_v=dp / state.vm[self.p_buses],
            dq_over_v=dq / state.vm[self.q_buses],
        )


def compute_mismatch(
    net: Network,
    ybus: SparseMatrix,
    state: PowerFlowState,
    injections: ExtraInjections | None = None,
) -> Mismatch:
    """ΔP (non-slack buses) and ΔQ (PQ buses) of a state.

    ΔP_i = P_i^spec - Vm_i·Σ_j Vm_j (G_ij cos θ_ij + B_ij sin θ_ij), ΔQ likewise with
    (G_ij sin θ_ij - B_ij cos θ_ij). P^spec and Q^spec combine generation, negative
    load and any extra boundary load.

    Args:
        net: Network the state belongs to.
        ybus: Bus admittance matrix of net.
        state: Voltage state in network order.
        injections: Optional extra loads.

    Returns:
        Mismatch with raw and |V|-scaled vectors.

    Raises:
        ValueError: If the state does not cover every bus.
    """
    if state.n_bus != net.n_bus:
        raise ValueError(f"State covers {state.n_bus} buses, network has {net.n_bus}")
    return MismatchEvaluator(net, ybus, injections=injections).evaluate(state)
