"""Per-unit network model: buses, branches, generators."""

from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from gridflow.exceptions import UnknownBusError


class BusKind(StrEnum):
    """Power-flow role of a bus."""

    SLACK = "slack"
    PV = "pv"
    PQ = "pq"


class Bus(BaseModel):
    """Network node with its load, shunt and initial voltage."""

    model_config = ConfigDict(frozen=True)

    id: int = Field(description="External integer label")
    kind: BusKind = Field(description="Slack, PV or PQ")
    pd: float = Field(default=0.0, description="Active load (per-unit)")
    qd: float = Field(default=0.0, description="Reactive load (per-unit)")
    gs: float = Field(default=0.0, description="Shunt conductance (per-unit)")
    bs: float = Field(default=0.0, description="Shunt susceptance (per-unit)")
    vm0: float = Field(default=1.0, gt=0, description="Initial voltage magnitude (per-unit)")
    va0: float = Field(default=0.0, description="Initial voltage angle (radians)")
    base_kv: float = Field(default=0.0, description="Nominal voltage (kV)")
    area_hint: int | None = Field(default=None, description="Area label carried by the case")


class Branch(BaseModel):
    """Line or transformer in the standard pi model."""

    model_config = ConfigDict(frozen=True)

    from_bus: int = Field(description="From-end bus id (tap side)")
    to_bus: int = Field(description="To-end bus id")
    r: float = Field(default=0.0, description="Series resistance (per-unit)")
    x: float = Field(description="Series reactance (per-unit)")
    b_charging: float = Field(default=0.0, description="Total line charging susceptance")
    tap: float = Field(default=1.0, gt=0, description="Off-nominal turns ratio")
    shift: float = Field(default=0.0, description="Phase shift (radians)")
    in_service: bool = Field(default=True, description="In-service flag")


class Generator(BaseModel):
    """Scheduled injection at a bus.

    Reactive limits are carried through case files but not enforced by the solver.
    """

    model_config = ConfigDict(frozen=True)

    bus: int = Field(description="Bus id")
    pg: float = Field(description="Scheduled active injection (per-unit)")
    qg: float = Field(default=0.0, description="Scheduled reactive injection (per-unit)")
    vset: float = Field(default=1.0, gt=0, description="Voltage setpoint (per-unit)")
    pmax: float = Field(default=0.0, description="Active capacity (per-unit)")
    qmax: float | None = Field(default=None, description="Reactive upper limit (per-unit)")
    qmin: float | None = Field(default=None, description="Reactive lower limit (per-unit)")
    in_service: bool = Field(default=True, description="In-service flag")


class Network(BaseModel):
    """Immutable per-unit power-flow problem instance.

    Bus order defines the dense internal index; `index_of` maps external ids onto it.
    Out-of-service branches are retained and skipped by every matrix build.
    """

    model_config = ConfigDict(frozen=True)

    base_mva: float = Field(default=100.0, gt=0, description="System base (MVA)")
    buses: tuple[Bus, ...] = Field(description="Ordered buses")
    branches: tuple[Branch, ...] = Field(default=(), description="Branches")
    generators: tuple[Generator, ...] = Field(default=(), description="Generators")

    _index: dict[int, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, context: Any, /) -> None:
        self._index = {bus.id: i for i, bus in enumerate(self.buses)}

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    @property
    def bus_ids(self) -> list[int]:
        return [bus.id for bus in self.buses]

    def has_bus(self, bus_id: int) -> bool:
        return bus_id in self._index

    def index_of(self, bus_id: int) -> int:
        """Dense index of an external bus id.

        Raises:
            UnknownBusError: If the id is not part of this network.
        """
        try:
            return self._index[bus_id]
        except KeyError:
            raise UnknownBusError(bus_id) from None

    def bus(self, bus_id: int) -> Bus:
        return self.buses[self.index_of(bus_id)]

    def slack_ids(self) -> list[int]:
        return [bus.id for bus in self.buses if bus.kind is BusKind.SLACK]


IntArray = NDArray[np.int64]
FloatArray = NDArray[np.float64]
BoolArray = NDArray[np.bool_]


@dataclass(frozen=True)
class NetworkArrays:
    """Column view of a Network used by the numerical kernels.

    Generator quantities are aggregated per bus over in-service units: pg, qg and
    pmax are summed, the first unit's vset wins.
    """

    bus_ids: IntArray
    slack: BoolArray
    pv: BoolArray
    pq: BoolArray
    pd: FloatArray
    qd: FloatArray
    gs: FloatArray
    bs: FloatArray
    vm0: FloatArray
    va0: FloatArray
    pg: FloatArray
    qg: FloatArray
    pmax: FloatArray
    vset: FloatArray
    has_gen: BoolArray
    f: IntArray
    t: IntArray
    r: FloatArray
    x: FloatArray
    b: FloatArray
    tap: FloatArray
    shift: FloatArray
    in_service: BoolArray

    @classmethod
    def from_network(cls, net: Network) -> "NetworkArrays":
        n = net.n_bus
        kinds = [bus.kind for bus in net.buses]
        pg = np.zeros(n)
        qg = np.zeros(n)
        pmax = np.zeros(n)
        vset = np.full(n, np.nan)
        for gen in net.generators:
            if not gen.in_service:
                continue
            i = net.index_of(gen.bus)
            pg[i] += gen.pg
            qg[i] += gen.qg
            pmax[i] += gen.pmax
            if np.isnan(vset[i]):
                vset[i] = gen.vset

        branches = net.branches
        return cls(
            bus_ids=np.array([bus.id for bus in net.buses], dtype=np.int64),
            slack=np.array([kind is BusKind.SLACK for kind in kinds], dtype=bool),
            pv=np.array([kind is BusKind.PV for kind in kinds], dtype=bool),
            pq=np.array([kind is BusKind.PQ for kind in kinds], dtype=bool),
            pd=np.array([bus.pd for bus in net.buses], dtype=float),
            qd=np.array([bus.qd for bus in net.buses], dtype=float),
            gs=np.array([bus.gs for bus in net.buses], dtype=float),
            bs=np.array([bus.bs for bus in net.buses], dtype=float),
            vm0=np.array([bus.vm0 for bus in net.buses], dtype=float),
            va0=np.array([bus.va0 for bus in net.buses], dtype=float),
            pg=pg,
            qg=qg,
            pmax=pmax,
            vset=vset,
            has_gen=~np.isnan(vset),
            f=np.array([net.index_of(br.from_bus) for br in branches], dtype=np.int64),
            t=np.array([net.index_of(br.to_bus) for br in branches], dtype=np.int64),
            r=np.array([br.r for br in branches], dtype=float),
            x=np.array([br.x for br in branches], dtype=float),
            b=np.array([br.b_charging for br in branches], dtype=float),
            tap=np.array([br.tap for br in branches], dtype=float),
            shift=np.array([br.shift for br in branches], dtype=float),
            in_service=np.array([br.in_service for br in branches], dtype=bool),
        )

    @property
    def n_bus(self) -> int:
        return int(self.bus_ids.size)

    @property
    def slack_idx(self) -> IntArray:
        return np.flatnonzero(self.slack)

    @property
    def pq_idx(self) -> IntArray:
        return np.flatnonzero(self.pq)

    @property
    def nonslack_idx(self) -> IntArray:
        return np.flatnonzero(~self.slack)
