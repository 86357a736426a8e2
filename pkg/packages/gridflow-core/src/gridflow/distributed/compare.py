"""Per-bus voltage differences between two solutions."""

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from gridflow.exceptions import SolutionMismatchError
from gridflow.fdpf.models import FloatArray, IntArray, Solution


@dataclass(frozen=True, eq=False)
class VoltageProfile:
    """Bus ids with voltage magnitude (per-unit) and angle (radians)."""

    bus_ids: IntArray
    vm: FloatArray
    va: FloatArray

    @classmethod
    def from_solution(cls, solution: Solution) -> "VoltageProfile":
        return cls(bus_ids=solution.bus_ids, vm=solution.state.vm, va=solution.state.va)


class BusDiff(BaseModel):
    bus: int
    angle_diff_deg: float = Field(description="Absolute wrapped angle difference (degrees)")
    vm_diff_pu: float = Field(description="Absolute magnitude difference (per-unit)")


class DiffReport(BaseModel):
    """Largest deviations between two solutions over the same buses."""

    n_bus: int
    max_angle_diff_deg: float
    max_vm_diff_pu: float
    worst: list[BusDiff] = Field(default_factory=list, description="Worst buses, largest first")

    def within(self, max_angle_deg: float, max_vm_pu: float) -> bool:
        return self.max_angle_diff_deg <= max_angle_deg and self.max_vm_diff_pu <= max_vm_pu


def _profile(value: Solution | VoltageProfile) -> VoltageProfile:
    if isinstance(value, Solution):
        return VoltageProfile.from_solution(value)
    return value


def wrap_degrees(diff: FloatArray) -> FloatArray:
    """Map angle differences in degrees into (-180, 180]."""
    wrapped = np.mod(diff + 180.0, 360.0) - 180.0
    return np.where(wrapped == -180.0, 180.0, wrapped)


def compare_solutions(
    a: Solution | VoltageProfile, b: Solution | VoltageProfile, top_k: int = 10
) -> DiffReport:
    """Compare two solutions bus by bus.

    Args:
        a: Reference solution.
        b: Solution to compare against a.
        top_k: Number of worst buses to list.

    Returns:
        DiffReport with the maxima and the top_k worst buses, ranked by angle
        difference, then magnitude difference, then bus id.

    Raises:
        SolutionMismatchError: If a and b do not cover the same bus ids.
    """
    pa, pb = _profile(a), _profile(b)
    ids_a = [int(i) for i in pa.bus_ids]
    ids_b = [int(i) for i in pb.bus_ids]
    if set(ids_a) != set(ids_b) or len(ids_a) != len(ids_b):
        only_a = sorted(set(ids_a) - set(ids_b))[:5]
        only_b = sorted(set(ids_b) - set(ids_a))[:5]
        raise SolutionMismatchError(
            f"Solutions cover different buses (only in first: {only_a}, only in second: {only_b})"
        )

    order_b = {bus: i for i, bus in enumerate(ids_b)}
    take = np.array([order_b[bus] for bus in ids_a], dtype=np.int64)
    angle = np.abs(wrap_degrees(np.degrees(pa.va - pb.va[take])))
    vm = np.abs(pa.vm - pb.vm[take])

    ranked = sorted(range(len(ids_a)), key=lambda i: (-angle[i], -vm[i], ids_a[i]))
    worst = [
        BusDiff(bus=ids_a[i], angle_diff_deg=float(angle[i]), vm_diff_pu=float(vm[i]))
        for i in ranked[: max(top_k, 0)]
    ]
    return DiffReport(
        n_bus=len(ids_a),
        max_angle_diff_deg=float(angle.max()) if angle.size else 0.0,
        max_vm_diff_pu=float(vm.max()) if vm.size else 0.0,
        worst=worst,
    )
