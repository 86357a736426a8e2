"""Pi-model branch flows; each branch depends only on its two end voltages."""

import numpy as np

from gridflow.admittance import branch_admittances
from gridflow.fdpf.models import BranchFlows, PowerFlowState
from gridflow.grid.models import Network, NetworkArrays


def branch_flows(
    net: Network, state: PowerFlowState, arrays: NetworkArrays | None = None
) -> BranchFlows:
    """Complex power injected into every branch at its from and to ends.

    Tap ratio and phase shift are honored. Out-of-service branches carry zero flow.

    Args:
        net: Network the state belongs to.
        state: Any voltage state in network order.
        arrays: Precomputed column view of net.

    Returns:
        Per-branch flows in per-unit, branch order of net.
    """
    arrays = arrays or NetworkArrays.from_network(net)
    adm = branch_admittances(arrays)
    voltage = state.voltage
    v_from = voltage[arrays.f]
    v_to = voltage[arrays.t]
    s_from = v_from * np.conj(adm.yff * v_from + adm.yft * v_to)
    s_to = v_to * np.conj(adm.ytf * v_from + adm.ytt * v_to)
    return BranchFlows(
        p_from=s_from.real.copy(),
        q_from=s_from.imag.copy(),
        p_to=s_to.real.copy(),
        q_to=s_to.imag.copy(),
    )
