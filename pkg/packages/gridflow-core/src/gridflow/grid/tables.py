"""Conversion between MatPower-layout numeric tables and the per-unit Network.

Column layout follows the public MatPower case format:

    bus:    BUS_I TYPE PD QD GS BS AREA VM VA BASE_KV ZONE VMAX VMIN
    gen:    BUS PG QG QMAX QMIN VG MBASE STATUS PMAX PMIN
    branch: F_BUS T_BUS R X B RATE_A RATE_B RATE_C TAP SHIFT STATUS
"""

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import ValidationError

from gridflow.exceptions import CaseError
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network
from gridflow.grid.validation import validate_network

BUS_COLUMNS = 13
GEN_COLUMNS = 10
BRANCH_COLUMNS = 11
UNLIMITED_Q_MVAR = 9999.0

_KIND_BY_CODE = {1: BusKind.PQ, 2: BusKind.PV, 3: BusKind.SLACK}
_CODE_BY_KIND = {kind: code for code, kind in _KIND_BY_CODE.items()}


def _as_table(name: str, data: ArrayLike, min_columns: int) -> NDArray[np.float64]:
    table = np.atleast_2d(np.asarray(data, dtype=float))
    if table.size == 0:
        return np.zeros((0, min_columns))
    if table.shape[1] < min_columns:
        raise CaseError(
            f"{name} table has {table.shape[1]} columns, at least {min_columns} required"
        )
    return table


def _bus_id(value: float, what: str) -> int:
    if not math.isfinite(value) or not float(value).is_integer():
        raise CaseError(f"{what} {value!r} is not an integer bus id")
    return int(value)


def network_from_tables(
    base_mva: float,
    bus: ArrayLike,
    gen: ArrayLike,
    branch: ArrayLike,
    require_slack: bool = True,
) -> Network:
    """Build a validated per-unit Network from MatPower-layout tables.

    Powers are divided by base_mva, angles converted from degrees to radians and a
    zero tap ratio read as 1.0 (a line, not a transformer).

    Args:
        base_mva: System base in MVA.
        bus: Bus table, one row per bus.
        gen: Generator table, one row per unit.
        branch: Branch table, one row per branch.
        require_slack: Whether a missing slack bus is an error.

    Returns:
        Validated Network.

    Raises:
        CaseError: On malformed tables or violated network invariants.
    """
    if not base_mva > 0:
        raise CaseError(f"baseMVA must be positive, got {base_mva!r}")
    bus_table = _as_table("bus", bus, BUS_COLUMNS)
    gen_table = _as_table("gen", gen, GEN_COLUMNS)
    branch_table = _as_table("branch", branch, BRANCH_COLUMNS)

    try:
        buses = []
        for row in bus_table:
            code = int(row[1])
            if code not in _KIND_BY_CODE:
                raise CaseError(f"Bus {int(row[0])} has unsupported type {code}")
            buses.append(
                Bus(
                    id=_bus_id(row[0], "bus"),
                    kind=_KIND_BY_CODE[code],
                    pd=row[2] / base_mva,
                    qd=row[3] / base_mva,
                    gs=row[4] / base_mva,
                    bs=row[5] / base_mva,
                    area_hint=int(row[6]),
                    vm0=row[7],
                    va0=math.radians(row[8]),
                    base_kv=row[9],
                )
            )
        generators = [
            Generator(
                bus=_bus_id(row[0], "generator bus"),
                pg=row[1] / base_mva,
                qg=row[2] / base_mva,
                vset=row[5],
                pmax=row[8] / base_mva,
                qmax=row[3] / base_mva,
                qmin=row[4] / base_mva,
                in_service=bool(row[7] > 0),
            )
            for row in gen_table
        ]
        branches = [
            Branch(
                from_bus=_bus_id(row[0], "branch from-bus"),
                to_bus=_bus_id(row[1], "branch to-bus"),
                r=row[2],
                x=row[3],
                b_charging=row[4],
                tap=row[8] if row[8] != 0 else 1.0,
                shift=math.radians(row[9]),
                in_service=bool(row[10] > 0),
            )
            for row in branch_table
        ]
        net = Network(
            base_mva=base_mva,
            buses=tuple(buses),
            branches=tuple(branches),
            generators=tuple(generators),
        )
    except ValidationError as e:
        raise CaseError(f"Invalid case data: {e}") from e
    return validate_network(net, require_slack=require_slack)


def network_to_tables(
    net: Network,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Inverse of network_from_tables: (bus, gen, branch) tables in MW and degrees.

    Columns the model does not carry get neutral values: zone 1, voltage limits
    1.1/0.9, zero ratings and Pmin. A bus without an area label is written to area 1
    and a generator without reactive limits gets +/-UNLIMITED_Q_MVAR.
    """
    base = net.base_mva
    bus = np.array(
        [
            [
                b.id,
                _CODE_BY_KIND[b.kind],
                b.pd * base,
                b.qd * base,
                b.gs * base,
                b.bs * base,
                b.area_hint if b.area_hint is not None else 1,
                b.vm0,
                math.degrees(b.va0),
                b.base_kv,
                1,
                1.1,
                0.9,
            ]
            for b in net.buses
        ],
        dtype=float,
    ).reshape(-1, BUS_COLUMNS)
    gen = np.array(
        [
            [
                g.bus,
                g.pg * base,
                g.qg * base,
                g.qmax * base if g.qmax is not None else UNLIMITED_Q_MVAR,
                g.qmin * base if g.qmin is not None else -UNLIMITED_Q_MVAR,
                g.vset,
                base,
                1 if g.in_service else 0,
                g.pmax * base,
                0.0,
            ]
            for g in net.generators
        ],
        dtype=float,
    ).reshape(-1, GEN_COLUMNS)
    branch = np.array(
        [
            [
                br.from_bus,
                br.to_bus,
                br.r,
                br.x,
                br.b_charging,
                0.0,
                0.0,
                0.0,
                br.tap,
                math.degrees(br.shift),
                1 if br.in_service else 0,
            ]
            for br in net.branches
        ],
        dtype=float,
    ).reshape(-1, BRANCH_COLUMNS)
    return bus, gen, branch


def format_rows(rows: Sequence[Sequence[float]], integer_columns: Sequence[int]) -> list[str]:
    """Render table rows with repr precision, integral columns without a decimal point."""
    lines = []
    for row in rows:
        cells = [
            str(int(value)) if k in integer_columns else repr(float(value))
            for k, value in enumerate(row)
        ]
        lines.append("\t" + "\t".join(cells) + ";")
    return lines
