"""Area map files and splitting a network into isolated areas."""

import logging
from collections import defaultdict
from pathlib import Path

import numpy as np

from gridflow.exceptions import (
    AreaMapSyntaxError,
    DisconnectedAreaError,
    PartitionError,
    UnassignedBusError,
    UnknownBusError,
)
from gridflow.grid.models import Network
from gridflow.grid.topology import component_labels
from gridflow.partition.models import AreaPartition

logger = logging.getLogger(__name__)


def parse_area_map(text: str) -> dict[int, int]:
    """Parse `bus_id area_id` lines; `#` starts a comment.

    Raises:
        AreaMapSyntaxError: On malformed lines or a bus listed twice.
    """
    area_map: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 2:
            raise AreaMapSyntaxError(f"expected 'bus_id area_id', got {line!r}", lineno)
        try:
            bus_id, area = int(fields[0]), int(fields[1])
        except ValueError:
            raise AreaMapSyntaxError(f"non-integer field in {line!r}", lineno) from None
        if bus_id in area_map:
            raise AreaMapSyntaxError(f"bus {bus_id} assigned twice", lineno)
        area_map[bus_id] = area
    return area_map


def read_area_map(path: str | Path) -> dict[int, int]:
    """Read an area map file.

    Raises:
        PartitionError: If the file cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise PartitionError(f"Cannot read area map {path}: {e.strerror or e}") from e
    return parse_area_map(text)


def format_area_map(area_map: dict[int, int], header: str = "") -> str:
    lines = [f"# {line}" for line in header.splitlines()]
    lines.extend(f"{bus_id} {area}" for bus_id, area in area_map.items())
    return "\n".join(lines) + "\n"


def single_area_map(net: Network, area: int = 1) -> dict[int, int]:
    return {bus_id: area for bus_id in net.bus_ids}


def split_areas(net: Network, area_map: dict[int, int]) -> AreaPartition:
    """Remove inter-area branches and build one isolated sub-network per area.

    Intra-area branches (in or out of service), bus shunts and generators are copied
    into the area views unchanged.

    Args:
        net: Validated full network.
        area_map: External bus id to area id; must cover every bus.

    Returns:
        AreaPartition with areas in ascending id order.

    Raises:
        UnassignedBusError: If a bus is missing from the map.
        UnknownBusError: If the map names a bus that does not exist.
        DisconnectedAreaError: If an area falls apart once inter-area branches go.
    """
    for bus_id in net.bus_ids:
        if bus_id not in area_map:
            raise UnassignedBusError(bus_id)
    for bus_id in area_map:
        if not net.has_bus(bus_id):
            raise UnknownBusError(bus_id, "area map")

    area_buses: dict[int, list[int]] = defaultdict(list)
    for bus_id in net.bus_ids:
        area_buses[area_map[bus_id]].append(bus_id)
    areas = tuple(sorted(area_buses))

    inter: list[int] = []
    intra: dict[int, list[int]] = defaultdict(list)
    boundary: set[int] = set()
    for k, br in enumerate(net.branches):
        a_from, a_to = area_map[br.from_bus], area_map[br.to_bus]
        if a_from == a_to:
            intra[a_from].append(k)
            continue
        inter.append(k)
        if br.in_service:
            boundary.update((br.from_bus, br.to_bus))

    area_networks: dict[int, Network] = {}
    for area in areas:
        members = set(area_buses[area])
        sub = Network(
            base_mva=net.base_mva,
            buses=tuple(net.bus(bus_id) for bus_id in area_buses[area]),
            branches=tuple(net.branches[k] for k in intra[area]),
            generators=tuple(g for g in net.generators if g.bus in members),
        )
        live = [br for br in sub.branches if br.in_service]
        f = np.array([sub.index_of(br.from_bus) for br in live], dtype=np.int64)
        t = np.array([sub.index_of(br.to_bus) for br in live], dtype=np.int64)
        count, _ = component_labels(sub.n_bus, f, t)
        if count > 1:
            raise DisconnectedAreaError(area, count)
        area_networks[area] = sub

    partition = AreaPartition(
        area_of={bus_id: area_map[bus_id] for bus_id in net.bus_ids},
        areas=areas,
        inter_area_branches=tuple(inter),
        area_buses={area: tuple(buses) for area, buses in area_buses.items()},
        area_networks=area_networks,
        boundary_buses=frozenset(boundary),
    )
    logger.info(
        "Split %d buses into %d areas: %d inter-area branches, %d boundary buses",
        net.n_bus,
        len(areas),
        len(inter),
        len(boundary),
    )
    return partition


def impacted_bus_ratio(partition: AreaPartition) -> float:
    """Fraction of buses receiving an equivalent boundary injection."""
    if partition.n_bus == 0:
        return 0.0
    return len(partition.boundary_buses) / partition.n_bus
