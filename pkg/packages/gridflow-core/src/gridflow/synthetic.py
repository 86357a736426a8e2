"""Large synthetic grids stitched from renumbered copies of a base case."""

import logging

import numpy as np

from gridflow.admittance import build_ybus
from gridflow.config import SolverOptions
from gridflow.exceptions import CaseError
from gridflow.fdpf.mismatch import MismatchEvaluator
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network, NetworkArrays
from gridflow.grid.validation import validate_network

logger = logging.getLogger(__name__)

TIE_REACTANCE = (0.2, 0.4)
TIE_R_OVER_X = 0.1


def solved_slack_output(base: Network, options: SolverOptions | None = None) -> dict[int, float]:
    """Active generation each slack bus of base supplies in the solved case (per-unit).

    Raises:
        CaseError: If the base case does not converge.
    """
    options = options or SolverOptions(threads=1)
    solution = fdpf_solve(base, options)
    if not solution.converged:
        raise CaseError("Base case did not converge; cannot rebalance copy slacks")
    arrays = NetworkArrays.from_network(base)
    s = MismatchEvaluator(base, build_ybus(base, arrays), arrays).injections(solution.state)
    return {
        bus_id: float(s.real[i] + arrays.pd[i])
        for i, bus_id in enumerate(base.bus_ids)
        if arrays.slack[i]
    }


def _id_stride(base: Network) -> int:
    return int(10 ** len(str(max(base.bus_ids))))


def build_synthetic_grid(
    base: Network,
    copies: int,
    areas: int,
    seed: int = 0,
    ties_per_pair: int = 2,
    options: SolverOptions | None = None,
) -> tuple[Network, dict[int, int]]:
    """Stitch copies of base into one large case with weak random ties.

    Copy c renumbers bus i as c * stride + i, stride being the next power of ten above
    the largest base id. Copy 0 keeps the global slack; in every other copy the former
    slack becomes PV and its generators are rebalanced to the solved slack output of
    base, so each copy is close to balanced on its own. Consecutive copies are joined
    by ties_per_pair branches between random buses with reactance drawn uniformly from
    [0.2, 0.4] p.u. and r = x / 10.

    Args:
        base: Validated base case with one slack bus.
        copies: Number of copies (>= 1).
        areas: Number of areas (1 <= areas <= copies); each is a contiguous copy range.
        seed: Seed of the tie generator.
        ties_per_pair: Ties between each pair of consecutive copies.
        options: Options for the base-case solve.

    Returns:
        (network, area map).
    """
    if copies < 1 or not 1 <= areas <= copies:
        raise ValueError(f"Need copies >= 1 and 1 <= areas <= copies, got {copies}, {areas}")
    rng = np.random.default_rng(seed)
    stride = _id_stride(base)
    slack_output = solved_slack_output(base, options)
    base_ids = np.array(base.bus_ids, dtype=np.int64)

    buses: list[Bus] = []
    branches: list[Branch] = []
    generators: list[Generator] = []
    area_map: dict[int, int] = {}
    for c in range(copies):
        offset = c * stride
        area = 1 + c * areas // copies
        for bus in base.buses:
            kind = bus.kind
            if c > 0 and kind is BusKind.SLACK:
                kind = BusKind.PV
            update = {"id": bus.id + offset, "kind": kind, "area_hint": area}
            buses.append(bus.model_copy(update=update))
            area_map[bus.id + offset] = area
        branches.extend(
            br.model_copy(update={"from_bus": br.from_bus + offset, "to_bus": br.to_bus + offset})
            for br in base.branches
        )
        remaining = dict(slack_output) if c > 0 else {}
        for gen in base.generators:
            changes: dict[str, float | int] = {"bus": gen.bus + offset}
            if gen.bus in remaining and gen.in_service:
                changes["pg"] = remaining.pop(gen.bus)
            elif c > 0 and gen.bus in slack_output and gen.in_service:
                changes["pg"] = 0.0
            generators.append(gen.model_copy(update=changes))

        if c > 0:
            for _ in range(ties_per_pair):
                u, v = rng.choice(base_ids, size=2)
                x = float(rng.uniform(*TIE_REACTANCE))
                branches.append(
                    Branch(
                        from_bus=int(u) + offset - stride,
                        to_bus=int(v) + offset,
                        r=x * TIE_R_OVER_X,
                        x=x,
                    )
                )

    net = Network(
        base_mva=base.base_mva,
        buses=tuple(buses),
        branches=tuple(branches),
        generators=tuple(generators),
    )
    validate_network(net)
    logger.info(
        "Synthetic grid: %d copies, %d buses, %d branches, %d areas",
        copies,
        net.n_bus,
        len(net.branches),
        areas,
    )
    return net, area_map
