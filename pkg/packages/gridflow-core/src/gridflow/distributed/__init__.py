"""Distributed area solving, solution comparison and benchmarking."""

from gridflow.distributed.benchmark import BenchmarkRow, BenchmarkTable, Method, benchmark
from gridflow.distributed.compare import (
    BusDiff,
    DiffReport,
    VoltageProfile,
    compare_solutions,
    wrap_degrees,
)
from gridflow.distributed.runner import (
    AreaTask,
    DistributedSolution,
    merge_solutions,
    prepare_areas,
    run_distributed,
)

__all__ = [
    "AreaTask",
    "BenchmarkRow",
    "BenchmarkTable",
    "BusDiff",
    "DiffReport",
    "DistributedSolution",
    "Method",
    "VoltageProfile",
    "benchmark",
    "compare_solutions",
    "merge_solutions",
    "prepare_areas",
    "run_distributed",
    "wrap_degrees",
]
