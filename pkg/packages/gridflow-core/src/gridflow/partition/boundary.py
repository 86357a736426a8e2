"""Equivalent boundary injections, area slack selection and reference-state noise."""

import logging
from collections import defaultdict

import numpy as np

from gridflow.exceptions import NoGeneratorInAreaError
from gridflow.fdpf.flows import branch_flows
from gridflow.fdpf.models import PowerFlowState
from gridflow.grid.models import BusKind, Network
from gridflow.partition.models import (
    AreaPartition,
    AreaSlack,
    BoundaryContribution,
    BoundaryInjectionSet,
    BranchEnd,
)

logger = logging.getLogger(__name__)


def boundary_injections(
    net: Network, partition: AreaPartition, reference_state: PowerFlowState
) -> BoundaryInjectionSet:
    """Replace every removed branch by extra loads equal to its reference-state flows.

    The from-end flow becomes extra load at the from bus and the to-end flow extra
    load at the to bus, so each area sees exactly the power its removed branches
    carried in the reference state.

    Args:
        net: Full network.
        partition: Output of split_areas for net.
        reference_state: Full-network state (state-estimator surrogate).

    Returns:
        Per-bus extra loads with one provenance record per in-service branch end.
    """
    flows = branch_flows(net, reference_state)
    p_extra: dict[int, float] = defaultdict(float)
    q_extra: dict[int, float] = defaultdict(float)
    provenance: list[BoundaryContribution] = []
    for k in partition.inter_area_branches:
        br = net.branches[k]
        if not br.in_service:
            continue
        ends = (
            (BranchEnd.FROM, br.from_bus, flows.p_from[k], flows.q_from[k]),
            (BranchEnd.TO, br.to_bus, flows.p_to[k], flows.q_to[k]),
        )
        for end, bus_id, p, q in ends:
            p_extra[bus_id] += float(p)
            q_extra[bus_id] += float(q)
            provenance.append(BoundaryContribution(branch=k, end=end, bus=bus_id, p=p, q=q))
    injections = BoundaryInjectionSet(
        p_extra=dict(p_extra), q_extra=dict(q_extra), provenance=tuple(provenance)
    )
    total_p, total_q = injections.total()
    logger.debug(
        "Boundary injections on %d buses: total P=%.6f Q=%.6f",
        len(p_extra),
        total_p,
        total_q,
    )
    return injections


def select_area_slacks(
    partition: AreaPartition, net: Network, reference_state: PowerFlowState
) -> dict[int, AreaSlack]:
    """Choose one slack per area and pin its angle to the reference state.

    The area holding the global slack keeps it. Every other area uses the in-service
    generator bus with the largest total capacity, the lowest bus id on ties.

    Raises:
        NoGeneratorInAreaError: If an area has no in-service generator bus.
    """
    capacity: dict[int, float] = defaultdict(float)
    for gen in net.generators:
        if gen.in_service:
            capacity[gen.bus] += gen.pmax

    slacks: dict[int, AreaSlack] = {}
    for area in partition.areas:
        members = partition.area_buses[area]
        global_slacks = [b for b in members if net.bus(b).kind is BusKind.SLACK]
        if global_slacks:
            bus_id = global_slacks[0]
        else:
            candidates = [b for b in members if b in capacity]
            if not candidates:
                raise NoGeneratorInAreaError(area)
            bus_id = min(candidates, key=lambda b: (-capacity[b], b))
        angle = float(reference_state.va[net.index_of(bus_id)])
        slacks[area] = AreaSlack(area=area, bus=bus_id, angle=angle)
        logger.debug("Area %d slack: bus %d at %.6f rad", area, bus_id, angle)
    return slacks


def build_area_network(partition: AreaPartition, slack: AreaSlack) -> Network:
    """Area view with its slack designated and pinned.

    The chosen bus becomes the only slack of the area, with va0 set to the pinned
    angle; any other slack bus of the full case inside the area turns PV.
    """
    sub = partition.area_networks[slack.area]
    buses = []
    changed = False
    for bus in sub.buses:
        if bus.id == slack.bus:
            if bus.kind is not BusKind.SLACK or bus.va0 != slack.angle:
                bus = bus.model_copy(update={"kind": BusKind.SLACK, "va0": slack.angle})
                changed = True
        elif bus.kind is BusKind.SLACK:
            bus = bus.model_copy(update={"kind": BusKind.PV})
            changed = True
        buses.append(bus)
    if not changed:
        return sub
    return sub.model_copy(update={"buses": tuple(buses)})


def perturb_state(
    net: Network, state: PowerFlowState, sigma: float, seed: int | None = None
) -> PowerFlowState:
    """Add Gaussian noise to a reference state to emulate state-estimator error.

    Angles of non-slack buses get N(0, sigma) radians and magnitudes of buses
    without a generator get N(0, sigma) per-unit; slack angles and generator-bus
    magnitudes are left untouched.
    """
    if sigma <= 0:
        return state.copy()
    rng = np.random.default_rng(seed)
    kinds = [bus.kind for bus in net.buses]
    regulated = np.zeros(net.n_bus, dtype=bool)
    for gen in net.generators:
        if gen.in_service:
            regulated[net.index_of(gen.bus)] = True
    slack = np.array([kind is BusKind.SLACK for kind in kinds], dtype=bool)
    angle_noise = rng.normal(0.0, sigma, net.n_bus)
    vm_noise = rng.normal(0.0, sigma, net.n_bus)
    va = np.where(slack, state.va, state.va + angle_noise)
    vm = np.where(regulated, state.vm, state.vm + vm_noise)
    return PowerFlowState(vm=vm, va=va)
