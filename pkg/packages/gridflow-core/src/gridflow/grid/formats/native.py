"""Native JSON case dialect.

Field names mirror the network model. Powers are in MW/MVAr and angles in degrees;
both are converted to per-unit and radians on load.
"""

import json
import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from gridflow.exceptions import CaseError, CaseSyntaxError
from gridflow.grid.formats.base import CaseFormat
from gridflow.grid.formats.registry import FormatRegistry
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network
from gridflow.grid.validation import validate_network


def _scaled(value: float | None, factor: float) -> float | None:
    return None if value is None else value * factor

class NativeBus(BaseModel):
    """Bus record as written in a native case file."""

    model_config = ConfigDict(extra="forbid")

    id: int
    kind: BusKind
    pd: float = Field(default=0.0, description="MW")
    qd: float = Field(default=0.0, description="MVAr")
    gs: float = Field(default=0.0, description="MW at 1.0 p.u.")
    bs: float = Field(default=0.0, description="MVAr at 1.0 p.u.")
    vm0: float = 1.0
    va0: float = Field(default=0.0, description="degrees")
    base_kv: float = 0.0
    area_hint: int | None = None

    @field_validator("kind", mode="before")
    @classmethod
    def _lower_kind(cls, value: Any) -> Any:
        return value.lower() if isinstance(value, str) else value


class NativeBranch(BaseModel):
    """Branch record; endpoints are spelled `from` and `to`."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    from_bus: int = Field(alias="from")
    to_bus: int = Field(alias="to")
    r: float = 0.0
    x: float
    b_charging: float = 0.0
    tap: float = 1.0
    shift: float = Field(default=0.0, description="degrees")
    status: bool = True


class NativeGenerator(BaseModel):
    """Generator record."""

    model_config = ConfigDict(extra="forbid")

    bus: int
    pg: float = Field(description="MW")
    qg: float = Field(default=0.0, description="MVAr")
    vset: float = 1.0
    pmax: float = Field(default=0.0, description="MW")
    qmax: float | None = Field(default=None, description="MVAr")
    qmin: float | None = Field(default=None, description="MVAr")
    status: bool = True


class NativeCase(BaseModel):
    """Top-level native case document."""

    model_config = ConfigDict(extra="forbid")

    base_mva: float = 100.0
    buses: list[NativeBus]
    branches: list[NativeBranch] = Field(default_factory=list)
    generators: list[NativeGenerator] = Field(default_factory=list)

    def to_network(self) -> Network:
        base = self.base_mva
        return Network(
            base_mva=base,
            buses=tuple(
                Bus(
                    id=b.id,
                    kind=b.kind,
                    pd=b.pd / base,
                    qd=b.qd / base,
                    gs=b.gs / base,
                    bs=b.bs / base,
                    vm0=b.vm0,
                    va0=math.radians(b.va0),
                    base_kv=b.base_kv,
                    area_hint=b.area_hint,
                )
                for b in self.buses
            ),
            branches=tuple(
                Branch(
                    from_bus=br.from_bus,
                    to_bus=br.to_bus,
                    r=br.r,
                    x=br.x,
                    b_charging=br.b_charging,
                    tap=br.tap,
                    shift=math.radians(br.shift),
                    in_service=br.status,
                )
                for br in self.branches
            ),
            generators=tuple(
                Generator(
                    bus=g.bus,
                    pg=g.pg / base,
                    qg=g.qg / base,
                    vset=g.vset,
                    pmax=g.pmax / base,
                    qmax=_scaled(g.qmax, 1.0 / base),
                    qmin=_scaled(g.qmin, 1.0 / base),
                    in_service=g.status,
                )
                for g in self.generators
            ),
        )

    @classmethod
    def from_network(cls, net: Network) -> "NativeCase":
        base = net.base_mva
        return cls(
            base_mva=base,
            buses=[
                NativeBus(
                    id=b.id,
                    kind=b.kind,
                    pd=b.pd * base,
                    qd=b.qd * base,
                    gs=b.gs * base,
                    bs=b.bs * base,
                    vm0=b.vm0,
                    va0=math.degrees(b.va0),
                    base_kv=b.base_kv,
                    area_hint=b.area_hint,
                )
                for b in net.buses
            ],
            branches=[
                NativeBranch(
                    from_bus=br.from_bus,
                    to_bus=br.to_bus,
                    r=br.r,
                    x=br.x,
                    b_charging=br.b_charging,
                    tap=br.tap,
                    shift=math.degrees(br.shift),
                    status=br.in_service,
                )
                for br in net.branches
            ],
            generators=[
                NativeGenerator(
                    bus=g.bus,
                    pg=g.pg * base,
                    qg=g.qg * base,
                    vset=g.vset,
                    pmax=g.pmax * base,
                    qmax=_scaled(g.qmax, base),
                    qmin=_scaled(g.qmin, base),
                    status=g.in_service,
                )
                for g in net.generators
            ],
        )


@FormatRegistry.register
class NativeFormat(CaseFormat):
    """JSON document with base_mva, buses, branches and generators."""

    @property
    def name(self) -> str:
        return "native"

    @property
    def suffixes(self) -> tuple[str, ...]:
        return (".json",)

    def detect(self, text: str) -> bool:
        return text.lstrip().startswith("{")

    def read(self, text: str) -> Network:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise CaseSyntaxError(e.msg, e.lineno, e.colno) from e
        try:
            net = NativeCase.model_validate(document).to_network()
        except ValidationError as e:
            raise CaseError(f"Invalid native case: {e}") from e
        return validate_network(net)

    def write(self, net: Network) -> str:
        return NativeCase.from_network(net).model_dump_json(by_alias=True, indent=2) + "\n"
