"""Area partition, boundary injection and area slack types."""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from gridflow.fdpf.models import FloatArray
from gridflow.grid.models import Network


class BranchEnd(StrEnum):
    FROM = "from"
    TO = "to"


class BoundaryContribution(BaseModel):
    """Reference-state flow of one removed branch end, applied as extra load at that end."""

    model_config = ConfigDict(frozen=True)

    branch: int = Field(description="Branch index in the full network")
    end: BranchEnd = Field(description="Branch end the flow leaves from")
    bus: int = Field(description="Bus receiving the extra load")
    p: float = Field(description="Extra active load (per-unit)")
    q: float = Field(description="Extra reactive load (per-unit)")


class AreaSlack(BaseModel):
    """Slack bus of one area with its angle pinned to the reference frame."""

    model_config = ConfigDict(frozen=True)

    area: int
    bus: int
    angle: float = Field(description="Pinned angle (radians)")


@dataclass(frozen=True)
class BoundaryInjectionSet:
    """Extra per-bus loads replacing the removed inter-area branches.

    Positive values are power leaving the area through the removed branch.
    """

    p_extra: dict[int, float]
    q_extra: dict[int, float]
    provenance: tuple[BoundaryContribution, ...]

    @classmethod
    def empty(cls) -> "BoundaryInjectionSet":
        return cls(p_extra={}, q_extra={}, provenance=())

    def __bool__(self) -> bool:
        return bool(self.provenance)

    def as_arrays(self, net: Network) -> tuple[FloatArray, FloatArray]:
        """(p_extra, q_extra) over the buses of net, zero where nothing applies."""
        p = np.zeros(net.n_bus)
        q = np.zeros(net.n_bus)
        for i, bus_id in enumerate(net.bus_ids):
            p[i] = self.p_extra.get(bus_id, 0.0)
            q[i] = self.q_extra.get(bus_id, 0.0)
        return p, q

    def total(self) -> tuple[float, float]:
        """Sum of all extra active and reactive loads."""
        return float(sum(self.p_extra.values())), float(sum(self.q_extra.values()))


@dataclass(frozen=True)
class AreaPartition:
    """Bus-to-area assignment with inter-area branches removed from the area views.

    `area_networks[a]` keeps the buses of area a in network order together with its
    intra-area branches and its generators; bus kinds are those of the full case.
    """

    area_of: dict[int, int]
    areas: tuple[int, ...]
    inter_area_branches: tuple[int, ...]
    area_buses: dict[int, tuple[int, ...]]
    area_networks: dict[int, Network]
    boundary_buses: frozenset[int]

    @property
    def n_bus(self) -> int:
        return len(self.area_of)
