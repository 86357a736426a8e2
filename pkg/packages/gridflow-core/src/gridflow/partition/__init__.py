"""Area partitioning through equivalent boundary injections."""

from gridflow.partition.areas import (
    format_area_map,
    impacted_bus_ratio,
    parse_area_map,
    read_area_map,
    single_area_map,
    split_areas,
)
from gridflow.partition.boundary import (
    boundary_injections,
    build_area_network,
    perturb_state,
    select_area_slacks,
)
from gridflow.partition.models import (
    AreaPartition,
    AreaSlack,
    BoundaryContribution,
    BoundaryInjectionSet,
    BranchEnd,
)

__all__ = [
    "AreaPartition",
    "AreaSlack",
    "BoundaryContribution",
    "BoundaryInjectionSet",
    "BranchEnd",
    "boundary_injections",
    "build_area_network",
    "format_area_map",
    "impacted_bus_ratio",
    "parse_area_map",
    "perturb_state",
    "read_area_map",
    "select_area_slacks",
    "single_area_map",
    "split_areas",
]
