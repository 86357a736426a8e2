"""Structural validation of a parsed network."""

import logging
from collections import Counter, defaultdict

from gridflow.exceptions import (
    CaseError,
    DuplicateBusError,
    MissingGeneratorError,
    NoSlackBusError,
    UnknownBusError,
    ZeroReactanceError,
)
from gridflow.grid.models import BusKind, Network

logger = logging.getLogger(__name__)


def validate_network(net: Network, require_slack: bool = True) -> Network:
    """Check the invariants every downstream module relies on.

    Checks run in a fixed order so each failure surfaces as its own diagnostic:
    duplicate ids, dangling references, degenerate branches, slack presence and
    generator coverage of PV/slack buses.

    Args:
        net: Network to validate.
        require_slack: Whether a missing slack bus is an error (monolithic mode).

    Returns:
        The same network, for chaining.

    Raises:
        CaseError: The first violated invariant, as its specific subclass.
    """
    counts = Counter(bus.id for bus in net.buses)
    for bus_id, count in counts.items():
        if count > 1:
            raise DuplicateBusError(bus_id)

    for k, branch in enumerate(net.branches):
        for end in (branch.from_bus, branch.to_bus):
            if not net.has_bus(end):
                raise UnknownBusError(end, f"branch {k}")
        if branch.from_bus == branch.to_bus:
            raise CaseError(f"Branch {k} connects bus {branch.from_bus} to itself")
        if branch.x == 0.0:
            raise ZeroReactanceError(k, branch.from_bus, branch.to_bus)

    setpoints: dict[int, list[float]] = defaultdict(list)
    for k, gen in enumerate(net.generators):
        if not net.has_bus(gen.bus):
            raise UnknownBusError(gen.bus, f"generator {k}")
        if gen.in_service:
            setpoints[gen.bus].append(gen.vset)

    if require_slack and not net.slack_ids():
        raise NoSlackBusError()

    for bus in net.buses:
        if bus.kind is BusKind.PQ:
            continue
        if bus.id not in setpoints:
            raise MissingGeneratorError(bus.id)

    for bus_id, values in setpoints.items():
        if len(set(values)) > 1:
            logger.warning(
                "Bus %d has %d generators with conflicting setpoints %s; using %.4f",
                bus_id,
                len(values),
                values,
                values[0],
            )
    return net
