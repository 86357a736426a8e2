"""Bus admittance matrix and the constant fast decoupled matrices B' and B''.

Every entry is a sum over one bus and its incident branches, so any single row can
be rebuilt locally with `ybus_row` / `b_prime_row` and compared to the assembled
matrix.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from gridflow.exceptions import ZeroImpedanceError
from gridflow.grid.models import Network, NetworkArrays
from gridflow.sparse.matrix import SparseMatrix

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]


@dataclass(frozen=True)
class BranchAdmittances:
    """Two-port admittances of every branch; zero for out-of-service branches."""

    yff: ComplexArray
    yft: ComplexArray
    ytf: ComplexArray
    ytt: ComplexArray


def branch_admittances(arrays: NetworkArrays, ignore_shift: bool = False) -> BranchAdmittances:
    """Standard pi-model two-port admittances with the tap on the from side.

    Args:
        arrays: Column view of the network.
        ignore_shift: Treat every phase shifter as having zero angle.

    Raises:
        ZeroImpedanceError: If an in-service branch has r = x = 0.
    """
    live = arrays.in_service
    z = arrays.r + 1j * arrays.x
    zero = np.flatnonzero(live & (z == 0))
    if zero.size:
        raise ZeroImpedanceError(int(zero[0]))

    y = np.zeros(z.size, dtype=complex)
    y[live] = 1.0 / z[live]
    charging = np.where(live, 0.5j * arrays.b, 0.0)
    shift = np.zeros_like(arrays.shift) if ignore_shift else arrays.shift
    ratio = arrays.tap * np.exp(1j * shift)

    ytt = y + charging
    return BranchAdmittances(
        yff=ytt / (arrays.tap * arrays.tap),
        yft=-y / np.conj(ratio),
        ytf=-y / ratio,
        ytt=ytt,
    )


def _assemble(arrays: NetworkArrays, adm: BranchAdmittances) -> SparseMatrix:
    n = arrays.n_bus
    live = arrays.in_service
    f, t = arrays.f[live], arrays.t[live]
    diag = np.arange(n)
    rows = np.concatenate([f, f, t, t, diag])
    cols = np.concatenate([f, t, f, t, diag])
    values = np.concatenate(
        [adm.yff[live], adm.yft[live], adm.ytf[live], adm.ytt[live], arrays.gs + 1j * arrays.bs]
    )
    return SparseMatrix.from_triplets(n, rows, cols, values)


def build_ybus(net: Network, arrays: NetworkArrays | None = None) -> SparseMatrix:
    """Complex bus admittance matrix over all buses in network order.

    Branch model: series y = 1/(r + jx), half the charging at each end, off-nominal
    tap and phase shift on the from side; bus shunts gs + j·bs on the diagonal.

    Args:
        net: Validated network.
        arrays: Precomputed column view of net, if the caller already has one.

    Returns:
        Canonical complex CSC matrix.

    Raises:
        ZeroImpedanceError: If an in-service branch has r = x = 0.
    """
    arrays = arrays or NetworkArrays.from_network(net)
    ybus = _assemble(arrays, branch_admittances(arrays))
    logger.debug("Built Ybus: n=%d nnz=%d", ybus.n, ybus.nnz)
    return ybus


def ybus_row(net: Network, bus_id: int) -> dict[int, complex]:
    """Row of Ybus for one bus, computed from that bus and its incident branches only.

    Returns:
        Mapping of dense column index to admittance, zero entries dropped.
    """
    i = net.index_of(bus_id)
    bus = net.buses[i]
    row: dict[int, complex] = {i: complex(bus.gs, bus.bs)}
    for k, br in enumerate(net.branches):
        if not br.in_service or bus_id not in (br.from_bus, br.to_bus):
            continue
        if br.r == 0 and br.x == 0:
            raise ZeroImpedanceError(k)
        y = 1.0 / complex(br.r, br.x)
        ratio = br.tap * complex(np.cos(br.shift), np.sin(br.shift))
        half = 0.5j * br.b_charging
        if br.from_bus == bus_id:
            j = net.index_of(br.to_bus)
            row[i] += (y + half) / (br.tap * br.tap)
            row[j] = row.get(j, 0j) - y / ratio.conjugate()
        else:
            j = net.index_of(br.from_bus)
            row[i] += y + half
            row[j] = row.get(j, 0j) - y / ratio
    return {col: value for col, value in sorted(row.items()) if value != 0}


@dataclass(frozen=True)
class FdpfMatrices:
    """Constant coefficient matrices of the fast decoupled iteration (XB scheme).

    `p_buses[k]` is the dense bus index of row k of B'; `q_buses` likewise for B''.
    """

    b_prime: SparseMatrix
    b_double_prime: SparseMatrix
    p_buses: NDArray[np.int64]
    q_buses: NDArray[np.int64]

    @property
    def trivial(self) -> bool:
        """No non-slack bus: nothing to solve."""
        return self.p_buses.size == 0


def b_prime_full(arrays: NetworkArrays) -> SparseMatrix:
    """B' over all buses: Laplacian of 1/x on in-service branches."""
    live = arrays.in_service
    f, t = arrays.f[live], arrays.t[live]
    b = 1.0 / arrays.x[live]
    rows = np.concatenate([f, t, f, t])
    cols = np.concatenate([t, f, f, t])
    values = np.concatenate([-b, -b, b, b])
    return SparseMatrix.from_triplets(arrays.n_bus, rows, cols, values)


def b_prime_row(net: Network, bus_id: int) -> dict[int, float]:
    """Row of full-size B' for one bus, from its incident branches only."""
    i = net.index_of(bus_id)
    row: dict[int, float] = {i: 0.0}
    for br in net.branches:
        if not br.in_service or bus_id not in (br.from_bus, br.to_bus):
            continue
        other = br.to_bus if br.from_bus == bus_id else br.from_bus
        j = net.index_of(other)
        row[i] += 1.0 / br.x
        row[j] = row.get(j, 0.0) - 1.0 / br.x
    return {col: value for col, value in sorted(row.items()) if value != 0}


def b_double_prime_full(arrays: NetworkArrays) -> SparseMatrix:
    """B'' over all buses: -Im(Ybus) with phase shifts zeroed."""
    ybus = _assemble(arrays, branch_admittances(arrays, ignore_shift=True))
    return SparseMatrix.from_scipy(-ybus.csc.imag)


def build_fdpf_matrices(net: Network, arrays: NetworkArrays | None = None) -> FdpfMatrices:
    """XB-scheme B' (non-slack buses) and B'' (PQ buses).

    B' ignores resistance, charging, shunts and taps; phase shifters count as tap 1.
    B'' keeps all of them but drops phase-shift angles so that it stays symmetric.
    A network without non-slack buses yields empty matrices flagged trivial.

    Args:
        net: Validated network whose bus kinds define the slack set.
        arrays: Precomputed column view of net.

    Returns:
        FdpfMatrices with row-to-bus index maps.
    """
    arrays = arrays or NetworkArrays.from_network(net)
    p_buses = arrays.nonslack_idx.astype(np.int64)
    q_buses = arrays.pq_idx.astype(np.int64)
    b_prime = b_prime_full(arrays).submatrix(p_buses)
    b_double_prime = b_double_prime_full(arrays).submatrix(q_buses)
    logger.debug(
        "Built B' (n=%d nnz=%d) and B'' (n=%d nnz=%d)",
        b_prime.n,
        b_prime.nnz,
        b_double_prime.n,
        b_double_prime.nnz,
    )
    return FdpfMatrices(
        b_prime=b_prime,
        b_double_prime=b_double_prime,
        p_buses=p_buses,
        q_buses=q_buses,
    )
