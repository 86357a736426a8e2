"""Tests for area maps, splitting, boundary injections and area slacks."""

from pathlib import Path

import numpy as np
import pytest

from gridflow.admittance import build_ybus
from gridflow.exceptions import (
    AreaMapSyntaxError,
    DisconnectedAreaError,
    NoGeneratorInAreaError,
    PartitionError,
    UnassignedBusError,
    UnknownBusError,
)
from gridflow.fdpf.mismatch import compute_mismatch
from gridflow.fdpf.models import PowerFlowState, Solution
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network
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
from gridflow.partition.models import BranchEnd
from tests.networks import make_network
from tests.oracles import newton_raphson


def _two_area_chain() -> Network:
    """Buses 1-2 and 3-4 joined by a lossless tie 2-3; area 2 has one generator, at bus 3."""
    return make_network(
        [
            Bus(id=1, kind=BusKind.SLACK),
            Bus(id=2, kind=BusKind.PQ, pd=0.2),
            Bus(id=3, kind=BusKind.PV),
            Bus(id=4, kind=BusKind.PQ, pd=0.4),
        ],
        [
            Branch(from_bus=1, to_bus=2, x=0.1),
            Branch(from_bus=2, to_bus=3, x=0.1),
            Branch(from_bus=3, to_bus=4, x=0.1),
        ],
        [Generator(bus=1, pg=0.0, pmax=2.0), Generator(bus=3, pg=0.3, pmax=1.0)],
    )


TWO_AREAS = {1: 1, 2: 1, 3: 2, 4: 2}
TIE_STATE = PowerFlowState(vm=np.ones(4), va=np.array([0.0, 0.0, -0.05, -0.05]))


class TestAreaMapFiles:
    """Tests for reading and writing area maps."""

    def test_parse_with_comments_and_commas(self) -> None:
        """Test comments, blank lines and comma separators."""
        text = "# header\n\n1 1\n2, 1  # trailing\n3 2\n"

        assert parse_area_map(text) == {1: 1, 2: 1, 3: 2}

    @pytest.mark.parametrize(
        "text,line",
        [("1 1\n2\n", 2), ("1 one\n", 1), ("1 1\n2 1\n1 2\n", 3)],
    )
    def test_malformed_lines(self, text: str, line: int) -> None:
        """Test malformed or duplicated entries report their line."""
        with pytest.raises(AreaMapSyntaxError) as exc_info:
            parse_area_map(text)

        assert exc_info.value.line == line

    def test_format_then_parse(self) -> None:
        """Test a formatted map parses back with its header as a comment."""
        area_map = {1: 1, 2: 3, 7: 2}
        text = format_area_map(area_map, header="three buses")

        assert text.startswith("# three buses\n")
        assert parse_area_map(text) == area_map

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test an unreadable map is a partition error."""
        with pytest.raises(PartitionError, match="Cannot read area map"):
            read_area_map(tmp_path / "nope.areas")


class TestSplitAreas:
    """Tests for split_areas."""

    def test_case14_four_areas(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test inter-area branches, boundary buses and area contents."""
        partition = split_areas(case14, case14_areas)

        assert partition.areas == (1, 2, 3, 4)
        assert len(partition.inter_area_branches) == 7
        assert partition.boundary_buses == frozenset({2, 3, 4, 5, 6, 7, 9})
        assert impacted_bus_ratio(partition) == pytest.approx(0.5)
        assert partition.area_buses[2] == (3, 4)
        assert partition.area_networks[3].bus_ids == [7, 8]
        assert [g.bus for g in partition.area_networks[4].generators] == [6]

    def test_case14_cuts_branch_4_5(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test branch 4-5 links areas 1 and 2."""
        partition = split_areas(case14, case14_areas)
        cut = {
            (case14.branches[i].from_bus, case14.branches[i].to_bus)
            for i in partition.inter_area_branches
        }

        assert (4, 5) in cut
        assert case14_areas[5] == 1
        assert case14_areas[4] == 2

    def test_case118_four_areas(self, case118: Network, case118_areas: dict[int, int]) -> None:
        """Test the 118-bus split cuts few branches and touches few buses."""
        partition = split_areas(case118, case118_areas)

        assert len(partition.areas) == 4
        assert len(partition.inter_area_branches) == 9
        assert 0.08 <= impacted_bus_ratio(partition) <= 0.15

    def test_branch_counts_add_up(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test every branch is either intra-area or inter-area."""
        partition = split_areas(case14, case14_areas)
        intra = sum(len(sub.branches) for sub in partition.area_networks.values())

        assert intra + len(partition.inter_area_branches) == len(case14.branches)

    def test_single_area(self, case14: Network) -> None:
        """Test one area cuts nothing."""
        partition = split_areas(case14, single_area_map(case14))

        assert partition.inter_area_branches == ()
        assert impacted_bus_ratio(partition) == 0.0

    def test_unassigned_bus(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test a bus missing from the map is named."""
        area_map = {bus: area for bus, area in case14_areas.items() if bus != 7}

        with pytest.raises(UnassignedBusError, match="bus 7 unassigned"):
            split_areas(case14, area_map)

    def test_unknown_bus(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test a map entry for a bus the case does not have."""
        with pytest.raises(UnknownBusError):
            split_areas(case14, {**case14_areas, 99: 1})

    def test_disconnected_area(self, case14: Network, case14_areas: dict[int, int]) -> None:
        """Test an area that falls apart once its tie lines are removed."""
        area_map = {**case14_areas, 10: 3}

        with pytest.raises(DisconnectedAreaError) as exc_info:
            split_areas(case14, area_map)

        assert exc_info.value.area == 3


class TestBoundaryInjections:
    """Tests for equivalent boundary injections."""

    def test_conservation(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test extra loads sum to the losses of the removed branches."""
        partition = split_areas(case14, case14_areas)
        flows = case14_solution.branch_flows
        injections = boundary_injections(case14, partition, case14_solution.state)

        removed = list(partition.inter_area_branches)
        total_p, total_q = injections.total()

        assert total_p == pytest.approx(flows.p_loss[removed].sum(), abs=1e-10)
        assert total_q == pytest.approx(flows.q_loss[removed].sum(), abs=1e-10)
        assert set(injections.p_extra) == partition.boundary_buses

    def test_lossless_tie(self) -> None:
        """Test a lossless tie at a 0.05 rad angle gap gives equal and opposite loads."""
        net = _two_area_chain()
        partition = split_areas(net, TWO_AREAS)

        injections = boundary_injections(net, partition, TIE_STATE)

        assert injections.p_extra[2] == pytest.approx(np.sin(0.05) / 0.1, rel=1e-12)
        assert injections.p_extra[3] == pytest.approx(-np.sin(0.05) / 0.1, rel=1e-12)
        assert injections.total()[0] == pytest.approx(0.0, abs=1e-12)

    def test_provenance(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test each removed branch contributes one record per end."""
        partition = split_areas(case14, case14_areas)
        injections = boundary_injections(case14, partition, case14_solution.state)

        assert len(injections.provenance) == 2 * len(partition.inter_area_branches)
        first = injections.provenance[0]
        branch = case14.branches[first.branch]
        assert first.end is BranchEnd.FROM
        assert first.bus == branch.from_bus
        assert first.p == case14_solution.branch_flows.p_from[first.branch]

    def test_as_arrays_follow_network_order(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test the per-bus view over an area network."""
        partition = split_areas(case14, case14_areas)
        injections = boundary_injections(case14, partition, case14_solution.state)
        area = partition.area_networks[2]

        p, q = injections.as_arrays(area)

        assert p.tolist() == [injections.p_extra[3], injections.p_extra[4]]
        assert q.shape == (2,)

    def test_single_area_has_none(self, case14: Network, case14_solution: Solution) -> None:
        """Test no removed branches means an empty, falsy injection set."""
        partition = split_areas(case14, single_area_map(case14))

        injections = boundary_injections(case14, partition, case14_solution.state)

        assert not injections
        assert injections.total() == (0.0, 0.0)


class TestAreaSlacks:
    """Tests for slack selection and area network construction."""

    def test_case14_selection(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test the global slack is kept and other areas use their generator bus."""
        partition = split_areas(case14, case14_areas)

        slacks = select_area_slacks(partition, case14, case14_solution.state)

        assert {area: s.bus for area, s in slacks.items()} == {1: 1, 2: 3, 3: 8, 4: 6}
        index = case14.index_of(8)
        assert slacks[3].angle == case14_solution.state.va[index]

    def test_single_generator_area(self) -> None:
        """Test the only generator bus of an area becomes its slack at the reference angle."""
        net = _two_area_chain()
        partition = split_areas(net, TWO_AREAS)

        slacks = select_area_slacks(partition, net, TIE_STATE)

        assert slacks[1].bus == 1
        assert slacks[2].bus == 3
        assert slacks[2].angle == -0.05

    def test_largest_capacity_wins(self, case14: Network, case14_solution: Solution) -> None:
        """Test ties on capacity go to the lowest bus id."""
        area_map = {bus: 2 for bus in case14.bus_ids}
        area_map[1] = 1
        partition = split_areas(case14, area_map)

        slacks = select_area_slacks(partition, case14, case14_solution.state)
        capacity = {g.bus: g.pmax for g in case14.generators if g.bus != 1}
        best = min(capacity, key=lambda b: (-capacity[b], b))

        assert slacks[2].bus == best

    def test_area_without_generator(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test an area with no generator bus cannot be given a slack."""
        area_map = {**case14_areas, 3: 1}
        partition = split_areas(case14, area_map)

        with pytest.raises(NoGeneratorInAreaError) as exc_info:
            select_area_slacks(partition, case14, case14_solution.state)

        assert exc_info.value.area == 2

    def test_build_area_network(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test the chosen bus becomes the single pinned slack."""
        partition = split_areas(case14, case14_areas)
        slacks = select_area_slacks(partition, case14, case14_solution.state)

        sub = build_area_network(partition, slacks[3])

        assert sub.slack_ids() == [8]
        assert sub.bus(8).va0 == slacks[3].angle
        assert sub.bus(7).kind is BusKind.PQ

    def test_unchanged_area_is_reused(self, case14: Network, case14_solution: Solution) -> None:
        """Test an area whose slack already matches returns the split view itself."""
        partition = split_areas(case14, single_area_map(case14))
        slacks = select_area_slacks(partition, case14, case14_solution.state)

        assert build_area_network(partition, slacks[1]) is partition.area_networks[1]


class TestAreaExactness:
    """Tests that an exact reference state solves every area as it stands."""

    @pytest.mark.parametrize(
        ("case", "areas"), [("case14", "case14_areas"), ("case118", "case118_areas")]
    )
    def test_reference_state_has_no_area_mismatch(
        self, case: str, areas: str, request: pytest.FixtureRequest
    ) -> None:
        """Test every area's mismatch at the restricted Newton-Raphson state is below 1e-9."""
        net: Network = request.getfixturevalue(case)
        vm, va, _ = newton_raphson(net, tol=1e-11)
        reference = PowerFlowState(vm=vm, va=va)
        partition = split_areas(net, request.getfixturevalue(areas))
        injections = boundary_injections(net, partition, reference)
        slacks = select_area_slacks(partition, net, reference)

        assert len(partition.areas) == 4
        for area in partition.areas:
            sub = build_area_network(partition, slacks[area])
            index = np.array([net.index_of(b) for b in sub.bus_ids], dtype=np.int64)
            state = PowerFlowState(vm=vm[index], va=va[index])

            mismatch = compute_mismatch(sub, build_ybus(sub), state, injections)

            assert mismatch.max_p <= 1e-9, area
            assert mismatch.max_q <= 1e-9, area


class TestPerturbState:
    """Tests for reference-state noise."""

    def test_zero_sigma_copies(self, case14: Network, case14_solution: Solution) -> None:
        """Test sigma 0 leaves the state unchanged."""
        state = perturb_state(case14, case14_solution.state, 0.0)

        np.testing.assert_array_equal(state.va, case14_solution.state.va)
        assert state.va is not case14_solution.state.va

    def test_noise_spares_slack_angle_and_regulated_magnitudes(
        self, case14: Network, case14_solution: Solution
    ) -> None:
        """Test slack angles and generator magnitudes are kept."""
        reference = case14_solution.state

        state = perturb_state(case14, reference, 0.01, seed=4)

        slack, gen, load = (case14.index_of(b) for b in (1, 2, 14))
        assert state.va[slack] == reference.va[slack]
        assert state.vm[gen] == reference.vm[gen]
        assert state.vm[load] != reference.vm[load]
        assert state.va[load] != reference.va[load]

    def test_seeded(self, case14: Network, case14_solution: Solution) -> None:
        """Test a fixed seed reproduces the noise."""
        first = perturb_state(case14, case14_solution.state, 0.01, seed=9)
        second = perturb_state(case14, case14_solution.state, 0.01, seed=9)

        np.testing.assert_array_equal(first.vm, second.vm)
