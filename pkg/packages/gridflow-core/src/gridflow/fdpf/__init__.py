"""Graph-structured fast decoupled power flow."""

from gridflow.fdpf.flows import branch_flows
from gridflow.fdpf.mismatch import MismatchEvaluator, compute_mismatch, scheduled_injections
from gridflow.fdpf.models import (
    BranchFlows,
    ExtraInjections,
    Half,
    HalfIteration,
    Mismatch,
    PhaseTimings,
    PowerFlowState,
    Solution,
)
from gridflow.fdpf.solver import fdpf_solve, initial_state

__all__ = [
    "BranchFlows",
    "ExtraInjections",
    "Half",
    "HalfIteration",
    "Mismatch",
    "MismatchEvaluator",
    "PhaseTimings",
    "PowerFlowState",
    "Solution",
    "branch_flows",
    "compute_mismatch",
    "fdpf_solve",
    "initial_state",
    "scheduled_injections",
]
