"""Report models for solutions, partitions, comparisons and benchmarks.

Reports carry degrees, MW and MVAr; everything upstream is per-unit and radians.
Each report renders as aligned text and dumps losslessly to JSON.
"""

import csv
import io
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field
from pydantic_core import from_json

from gridflow.distributed.benchmark import BenchmarkRow, BenchmarkTable, Method
from gridflow.distributed.compare import DiffReport, VoltageProfile
from gridflow.distributed.runner import DistributedSolution
from gridflow.exceptions import ReportError
from gridflow.fdpf.models import Solution
from gridflow.grid.models import BusKind, Network
from gridflow.partition.areas import impacted_bus_ratio
from gridflow.partition.models import AreaPartition, AreaSlack, BoundaryInjectionSet, BranchEnd

logger = logging.getLogger(__name__)


def _table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers], *[[_cell(v) for v in row] for row in rows]]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths, strict=True)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6f}" if abs(value) < 1e6 else f"{value:.6g}"
    return str(value)


class BusRow(BaseModel):
    bus: int
    kind: BusKind
    vm: float = Field(description="Voltage magnitude (per-unit)")
    va_deg: float = Field(description="Voltage angle (degrees)")


class BranchRow(BaseModel):
    index: int
    from_bus: int
    to_bus: int
    in_service: bool
    p_from_mw: float
    q_from_mvar: float
    p_to_mw: float
    q_to_mvar: float


_BRANCH_HEADERS = [
    "branch",
    "from",
    "to",
    "P from (MW)",
    "Q from (MVAr)",
    "P to (MW)",
    "Q to (MVAr)",
]


def _branch_cells(row: BranchRow) -> list[Any]:
    return [
        row.index,
        row.from_bus,
        row.to_bus,
        row.p_from_mw,
        row.q_from_mvar,
        row.p_to_mw,
        row.q_to_mvar,
    ]


class IterationRow(BaseModel):
    iteration: int
    max_p: float = Field(description="Largest active mismatch (per-unit)")
    max_q: float = Field(description="Largest reactive mismatch (per-unit)")


class TimingRow(BaseModel):
    build_ms: float
    factorize_ms: float
    iterate_ms: float
    flows_ms: float
    total_ms: float


class SolutionReport(BaseModel):
    """Per-bus voltages, per-branch flows and convergence record of one solve."""

    converged: bool
    iterations: int
    base_mva: float
    buses: list[BusRow]
    branches: list[BranchRow]
    history: list[IterationRow]
    timings: TimingRow

    @classmethod
    def from_solution(cls, net: Network, solution: Solution) -> "SolutionReport":
        base = net.base_mva
        flows = solution.branch_flows
        vm, va = solution.state.vm, np.degrees(solution.state.va)
        timings = solution.timings
        return cls(
            converged=solution.converged,
            iterations=solution.iterations,
            base_mva=base,
            buses=[
                BusRow(bus=bus.id, kind=bus.kind, vm=float(vm[i]), va_deg=float(va[i]))
                for i, bus in enumerate(net.buses)
            ],
            branches=[
                BranchRow(
                    index=k,
                    from_bus=br.from_bus,
                    to_bus=br.to_bus,
                    in_service=br.in_service,
                    p_from_mw=float(flows.p_from[k] * base),
                    q_from_mvar=float(flows.q_from[k] * base),
                    p_to_mw=float(flows.p_to[k] * base),
                    q_to_mvar=float(flows.q_to[k] * base),
                )
                for k, br in enumerate(net.branches)
            ],
            history=[
                IterationRow(iteration=k, max_p=p, max_q=q)
                for k, (p, q) in enumerate(solution.history)
            ],
            timings=TimingRow(
                build_ms=timings.build_ms,
                factorize_ms=timings.factorize_ms,
                iterate_ms=timings.iterate_ms,
                flows_ms=timings.flows_ms,
                total_ms=timings.total_ms,
            ),
        )

    def profile(self) -> VoltageProfile:
        return VoltageProfile(
            bus_ids=np.array([row.bus for row in self.buses], dtype=np.int64),
            vm=np.array([row.vm for row in self.buses]),
            va=np.radians([row.va_deg for row in self.buses]),
        )

    def stable_json(self) -> str:
        """JSON without wall-clock fields."""
        return self.model_dump_json(exclude={"timings"})

    def to_text(self) -> str:
        status = "converged" if self.converged else "NOT converged"
        t = self.timings
        parts = [
            f"Power flow {status} after {self.iterations} iterations "
            f"({len(self.buses)} buses, {len(self.branches)} branches)",
            f"Timings: build {t.build_ms:.2f} ms, factorize {t.factorize_ms:.2f} ms, "
            f"iterate {t.iterate_ms:.2f} ms, flows {t.flows_ms:.2f} ms",
            "",
            _table(
                ["iter", "max dP (pu)", "max dQ (pu)"],
                [[h.iteration, h.max_p, h.max_q] for h in self.history],
            ),
            "",
            _table(
                ["bus", "kind", "vm (pu)", "va (deg)"],
                [[b.bus, b.kind.value, b.vm, b.va_deg] for b in self.buses],
            ),
            "",
            _table(_BRANCH_HEADERS, [_branch_cells(r) for r in self.branches]),
        ]
        return "\n".join(parts)


class AreaRow(BaseModel):
    area: int
    n_bus: int
    slack_bus: int
    slack_angle_deg: float
    converged: bool
    iterations: int


class DistributedReport(BaseModel):
    """Merged distributed solution with per-area outcomes and the diff against monolithic."""

    merged: SolutionReport
    areas: list[AreaRow]
    failed_areas: list[int] = Field(default_factory=list)
    inter_area_branches: int
    impacted_bus_ratio: float
    reference_noise: float = Field(default=0.0, description="Sigma applied to the reference")
    threads: int
    wall_time_ms: float
    diff: DiffReport | None = None

    @classmethod
    def from_distributed(
        cls,
        net: Network,
        result: DistributedSolution,
        diff: DiffReport | None = None,
        reference_noise: float = 0.0,
    ) -> "DistributedReport":
        return cls(
            merged=SolutionReport.from_solution(net, result.merged),
            areas=[
                AreaRow(
                    area=area,
                    n_bus=solution.n_bus,
                    slack_bus=result.slacks[area].bus,
                    slack_angle_deg=float(np.degrees(result.slacks[area].angle)),
                    converged=solution.converged,
                    iterations=solution.iterations,
                )
                for area, solution in result.per_area.items()
            ],
            failed_areas=list(result.failed_areas),
            inter_area_branches=len(result.partition.inter_area_branches),
            impacted_bus_ratio=impacted_bus_ratio(result.partition),
            reference_noise=reference_noise,
            threads=result.thread_count,
            wall_time_ms=result.wall_time_ms,
            diff=diff,
        )

    def stable_json(self) -> str:
        """JSON without wall-clock fields or the thread count."""
        return self.model_dump_json(
            exclude={"threads": True, "wall_time_ms": True, "merged": {"timings"}}
        )

    def to_text(self) -> str:
        status = "converged" if self.merged.converged else "NOT converged"
        parts = [
            f"Distributed power flow {status}: {len(self.areas)} areas, "
            f"{self.inter_area_branches} inter-area branches, "
            f"{self.impacted_bus_ratio:.2%} of buses impacted, "
            f"{self.wall_time_ms:.2f} ms on {self.threads} threads",
            "",
            _table(
                ["area", "buses", "slack", "slack va (deg)", "converged", "iterations"],
                [
                    [a.area, a.n_bus, a.slack_bus, a.slack_angle_deg, a.converged, a.iterations]
                    for a in self.areas
                ],
            ),
        ]
        if self.diff is not None:
            parts.extend(["", render_diff(self.diff)])
        parts.extend(["", self.merged.to_text()])
        return "\n".join(parts)


def render_diff(diff: DiffReport) -> str:
    header = (
        f"Max angle difference {diff.max_angle_diff_deg:.6f} deg, "
        f"max magnitude difference {diff.max_vm_diff_pu:.6f} pu over {diff.n_bus} buses"
    )
    rows = [[d.bus, d.angle_diff_deg, d.vm_diff_pu] for d in diff.worst]
    return header + "\n\n" + _table(["bus", "|dva| (deg)", "|dvm| (pu)"], rows)


class AreaSummary(BaseModel):
    area: int
    n_bus: int
    n_branches: int
    n_generators: int
    slack_bus: int | None = None


class InterAreaBranchRow(BaseModel):
    index: int
    from_bus: int
    to_bus: int
    from_area: int
    to_area: int
    in_service: bool


class ContributionRow(BaseModel):
    branch: int
    end: BranchEnd
    bus: int
    p_mw: float
    q_mvar: float


class PartitionReport(BaseModel):
    """Split and boundary-injection audit without solving the areas."""

    areas: list[AreaSummary]
    inter_area_branches: list[InterAreaBranchRow]
    boundary_buses: list[int]
    impacted_bus_ratio: float
    contributions: list[ContributionRow]
    total_extra_p_mw: float = Field(description="Sum of extra loads, the removed branch losses")
    total_extra_q_mvar: float

    @classmethod
    def from_partition(
        cls,
        net: Network,
        partition: AreaPartition,
        injections: BoundaryInjectionSet,
        slacks: dict[int, AreaSlack] | None = None,
    ) -> "PartitionReport":
        base = net.base_mva
        slacks = slacks or {}
        total_p, total_q = injections.total()
        return cls(
            areas=[
                AreaSummary(
                    area=area,
                    n_bus=sub.n_bus,
                    n_branches=len(sub.branches),
                    n_generators=len(sub.generators),
                    slack_bus=slacks[area].bus if area in slacks else None,
                )
                for area, sub in sorted(partition.area_networks.items())
            ],
            inter_area_branches=[
                InterAreaBranchRow(
                    index=k,
                    from_bus=net.branches[k].from_bus,
                    to_bus=net.branches[k].to_bus,
                    from_area=partition.area_of[net.branches[k].from_bus],
                    to_area=partition.area_of[net.branches[k].to_bus],
                    in_service=net.branches[k].in_service,
                )
                for k in partition.inter_area_branches
            ],
            boundary_buses=sorted(partition.boundary_buses),
            impacted_bus_ratio=impacted_bus_ratio(partition),
            contributions=[
                ContributionRow(
                    branch=c.branch, end=c.end, bus=c.bus, p_mw=c.p * base, q_mvar=c.q * base
                )
                for c in injections.provenance
            ],
            total_extra_p_mw=total_p * base,
            total_extra_q_mvar=total_q * base,
        )

    def to_text(self) -> str:
        parts = [
            f"{len(self.areas)} areas, {len(self.inter_area_branches)} inter-area branches, "
            f"{len(self.boundary_buses)} boundary buses ({self.impacted_bus_ratio:.2%} impacted)",
            f"Total extra load: {self.total_extra_p_mw:.6f} MW, {self.total_extra_q_mvar:.6f} MVAr",
            "",
            _table(
                ["area", "buses", "branches", "generators", "slack"],
                [
                    [a.area, a.n_bus, a.n_branches, a.n_generators, a.slack_bus or "-"]
                    for a in self.areas
                ],
            ),
            "",
            _table(
                ["branch", "from", "to", "from area", "to area", "in service"],
                [
                    [b.index, b.from_bus, b.to_bus, b.from_area, b.to_area, b.in_service]
                    for b in self.inter_area_branches
                ],
            ),
        ]
        if self.contributions:
            parts.extend(
                [
                    "",
                    _table(
                        ["branch", "end", "bus", "P (MW)", "Q (MVAr)"],
                        [
                            [c.branch, c.end.value, c.bus, c.p_mw, c.q_mvar]
                            for c in self.contributions
                        ],
                    ),
                ]
            )
        return "\n".join(parts)


def render_benchmark(table: BenchmarkTable) -> str:
    """Method rows by thread-count columns of median milliseconds, then phase detail."""
    headers = ["method", *(f"{t} threads" for t in table.thread_counts)]
    rows = [
        [method.value, *(table.row(method, t).median_ms for t in table.thread_counts)]
        for method in Method
    ]
    detail = _table(
        ["method", "threads", "median", "min", "max", "build", "factorize", "iterate", "iters"],
        [
            [
                r.method.value,
                r.threads,
                r.median_ms,
                r.min_ms,
                r.max_ms,
                r.build_ms,
                r.factorize_ms,
                r.iterate_ms,
                r.iterations,
            ]
            for r in table.rows
        ],
    )
    return (
        f"Median wall time (ms), {table.n_bus} buses, {table.areas} areas\n\n"
        f"{_table(headers, rows)}\n\n{detail}"
    )


def benchmark_csv(table: BenchmarkTable) -> str:
    """One delimited row per method and thread count."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(BenchmarkRow.model_fields), lineterminator="\n")
    writer.writeheader()
    for row in table.rows:
        writer.writerow(row.model_dump(mode="json"))
    return buffer.getvalue()


Report = SolutionReport | DistributedReport | PartitionReport | DiffReport | BenchmarkTable


def render_text(report: Report) -> str:
    """Aligned human-readable rendering of any report."""
    if isinstance(report, DiffReport):
        return render_diff(report)
    if isinstance(report, BenchmarkTable):
        return render_benchmark(report)
    return report.to_text()


def load_solution_report(path: str | Path) -> SolutionReport:
    """Read a solve or distsolve JSON report; distributed reports yield their merged part.

    Raises:
        ReportError: If the file is unreadable or not a solution report.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ReportError(f"Cannot read report {path}: {e.strerror or e}") from e
    try:
        data = from_json(text)
        if isinstance(data, dict) and "merged" in data:
            logger.debug("%s is a distributed report; using its merged solution", path)
            return DistributedReport.model_validate(data).merged
        return SolutionReport.model_validate(data)
    except ValueError as e:
        raise ReportError(f"{path} is not a solution report: {e}") from e
