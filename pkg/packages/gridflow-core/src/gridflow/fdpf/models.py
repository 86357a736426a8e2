"""State, mismatch and solution types of the fast decoupled solver."""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Protocol

import numpy as np
from numpy.typing import NDArray

from gridflow.grid.models import Network

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


class ExtraInjections(Protocol):
    """Additional per-bus load applied on top of the case data."""

    def as_arrays(self, net: Network) -> tuple[FloatArray, FloatArray]:
        """(p_extra, q_extra) per bus in network order, per-unit, load convention."""
        ...


@dataclass(frozen=True, eq=False)
class PowerFlowState:
    """Voltage magnitude (per-unit) and angle (radians) per bus, network order."""

    vm: FloatArray
    va: FloatArray

    def __post_init__(self) -> None:
        if self.vm.shape != self.va.shape:
            raise ValueError(f"vm and va shapes differ: {self.vm.shape} vs {self.va.shape}")

    @property
    def n_bus(self) -> int:
        return int(self.vm.size)

    @property
    def voltage(self) -> NDArray[np.complex128]:
        return self.vm * np.exp(1j * self.va)

    def copy(self) -> "PowerFlowState":
        return PowerFlowState(vm=self.vm.copy(), va=self.va.copy())

    def take(self, index: IntArray) -> "PowerFlowState":
        """Sub-state over the given bus indices."""
        return PowerFlowState(vm=self.vm[index].copy(), va=self.va[index].copy())


@dataclass(frozen=True, eq=False)
class Mismatch:
    """Power mismatches; dp/dq are raw, dp_over_v/dq_over_v are divided by |V|."""

    dp: FloatArray
    dq: FloatArray
    dp_over_v: FloatArray
    dq_over_v: FloatArray

    @property
    def max_p(self) -> float:
        return float(np.max(np.abs(self.dp))) if self.dp.size else 0.0

    @property
    def max_q(self) -> float:
        return float(np.max(np.abs(self.dq))) if self.dq.size else 0.0

    def below(self, tolerance: float) -> bool:
        return self.max_p < tolerance and self.max_q < tolerance


class Half(StrEnum):
    """Half-iteration kind."""

    START = "start"
    P = "P"
    Q = "Q"


@dataclass(frozen=True)
class HalfIteration:
    """Mismatch norms recorded after one half-iteration."""

    iteration: int
    half: Half
    max_p: float
    max_q: float


@dataclass(frozen=True)
class PhaseTimings:
    """Wall-clock breakdown of one solve in milliseconds."""

    build_ms: float = 0.0
    factorize_ms: float = 0.0
    iterate_ms: float = 0.0
    flows_ms: float = 0.0

    @property
    def total_ms(self) -> float:
        return self.build_ms + self.factorize_ms + self.iterate_ms + self.flows_ms


@dataclass(frozen=True, eq=False)
class BranchFlows:
    """Complex power entering each branch at both ends (per-unit); zero when out of service."""

    p_from: FloatArray
    q_from: FloatArray
    p_to: FloatArray
    q_to: FloatArray

    @property
    def p_loss(self) -> FloatArray:
        return self.p_from + self.p_to

    @property
    def q_loss(self) -> FloatArray:
        return self.q_from + self.q_to


@dataclass(frozen=True, eq=False)
class Solution:
    """Outcome of one fast decoupled solve.

    `history[k]` holds (max_p, max_q) after k full iterations, `history[0]` being the
    starting point; `half_history` records every half-iteration.
    """

    bus_ids: IntArray
    state: PowerFlowState
    converged: bool
    iterations: int
    history: tuple[tuple[float, float], ...]
    half_history: tuple[HalfIteration, ...]
    branch_flows: BranchFlows
    timings: PhaseTimings = field(default_factory=PhaseTimings)

    @property
    def n_bus(self) -> int:
        return int(self.bus_ids.size)

    @property
    def final_mismatch(self) -> tuple[float, float]:
        return self.history[-1] if self.history else (0.0, 0.0)
