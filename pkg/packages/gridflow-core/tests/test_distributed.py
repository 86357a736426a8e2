"""Tests for distributed area solving and solution comparison."""

import numpy as np
import pytest

from gridflow.config import Settings, SolverOptions
from gridflow.distributed.compare import VoltageProfile, compare_solutions, wrap_degrees
from gridflow.distributed.runner import run_distributed
from gridflow.exceptions import NoGeneratorInAreaError, SolutionMismatchError
from gridflow.fdpf.models import Solution
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.models import Network, NetworkArrays
from gridflow.partition.areas import single_area_map
from gridflow.partition.boundary import perturb_state
from gridflow.sparse.pool import WorkerPool
from tests.oracles import dense_mismatch

MAX_ANGLE_DEG = 0.01
MAX_VM_PU = 0.001
TIGHT = SolverOptions(tolerance=1e-8, max_iterations=100)


class TestRunDistributed:
    """Tests for run_distributed."""

    def test_single_area_is_bitwise_monolithic(
        self, case14: Network, case14_solution: Solution, settings: Settings
    ) -> None:
        """Test one area with no boundary reproduces the monolithic solve exactly."""
        monolithic = fdpf_solve(case14, TIGHT, settings=settings)

        result = run_distributed(
            case14, single_area_map(case14), case14_solution.state, TIGHT, settings=settings
        )

        np.testing.assert_array_equal(result.merged.state.vm, monolithic.state.vm)
        np.testing.assert_array_equal(result.merged.state.va, monolithic.state.va)
        assert result.merged.iterations == monolithic.iterations
        assert result.merged.history == monolithic.history

    def test_case14_four_areas(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test exact boundary injections reproduce the monolithic voltages."""
        result = run_distributed(case14, case14_areas, case14_solution.state, TIGHT)
        diff = compare_solutions(case14_solution, result.merged)

        assert result.converged
        assert result.failed_areas == ()
        assert sorted(result.per_area) == [1, 2, 3, 4]
        assert diff.within(MAX_ANGLE_DEG, MAX_VM_PU)

    def test_case118_four_areas(
        self, case118: Network, case118_areas: dict[int, int], case118_solution: Solution
    ) -> None:
        """Test the 118-bus four-area solve against the monolithic one."""
        result = run_distributed(case118, case118_areas, case118_solution.state, TIGHT)
        diff = compare_solutions(case118_solution, result.merged)

        assert result.converged
        assert diff.within(MAX_ANGLE_DEG, MAX_VM_PU)

    def test_case118_default_tolerance(
        self, case118: Network, case118_areas: dict[int, int], options: SolverOptions
    ) -> None:
        """Test areas at 1e-3 p.u. from the monolithic reference stay within the thresholds."""
        monolithic = fdpf_solve(case118, options)

        result = run_distributed(case118, case118_areas, monolithic.state, options)
        diff = compare_solutions(monolithic, result.merged)

        assert result.converged
        assert result.merged.iterations <= 10
        assert diff.within(MAX_ANGLE_DEG, MAX_VM_PU)

    def test_merged_state_solves_the_full_network(
        self,
        case118: Network,
        case118_areas: dict[int, int],
        case118_solution: Solution,
        options: SolverOptions,
    ) -> None:
        """Test the merged state on the whole network, ties restored, is within 2 * tol."""
        result = run_distributed(case118, case118_areas, case118_solution.state, options)
        arrays = NetworkArrays.from_network(case118)
        merged = result.merged.state

        dp, dq = dense_mismatch(case118, merged.vm, merged.va)

        assert np.abs(dp[arrays.nonslack_idx]).max() <= 2 * options.tolerance
        assert np.abs(dq[arrays.pq_idx]).max() <= 2 * options.tolerance

    def test_merged_timings(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test the merged factorization time is the slowest area's."""
        result = run_distributed(case14, case14_areas, case14_solution.state, TIGHT)
        timings = result.merged.timings

        per_area = result.per_area.values()
        assert timings.factorize_ms == max(s.timings.factorize_ms for s in per_area)
        assert timings.factorize_ms > 0.0
        assert timings.iterate_ms >= 0.0

    def test_merge_rules(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test iterations, history and flows of the merged solution."""
        result = run_distributed(case14, case14_areas, case14_solution.state, TIGHT)
        merged = result.merged
        per_area = list(result.per_area.values())

        assert merged.iterations == max(s.iterations for s in per_area)
        assert len(merged.history) == max(len(s.history) for s in per_area)
        assert merged.history[0][0] == max(s.history[0][0] for s in per_area)
        assert merged.half_history == ()
        assert merged.bus_ids.tolist() == case14.bus_ids
        assert merged.branch_flows.p_from.shape == (len(case14.branches),)

    def test_slack_angles_pinned(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test each area slack keeps the reference angle."""
        result = run_distributed(case14, case14_areas, case14_solution.state, TIGHT)

        for slack in result.slacks.values():
            index = case14.index_of(slack.bus)
            assert result.merged.state.va[index] == case14_solution.state.va[index]

    def test_thread_count_bitwise_identical(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test merged results do not depend on the number of workers."""
        with WorkerPool(1) as one, WorkerPool(4) as four:
            serial = run_distributed(case14, case14_areas, case14_solution.state, TIGHT, one)
            parallel = run_distributed(case14, case14_areas, case14_solution.state, TIGHT, four)

        np.testing.assert_array_equal(serial.merged.state.vm, parallel.merged.state.vm)
        np.testing.assert_array_equal(serial.merged.state.va, parallel.merged.state.va)
        assert parallel.thread_count == 4

    def test_noisy_reference_still_converges(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test a perturbed reference converges to a nearby but different state."""
        noisy = perturb_state(case14, case14_solution.state, 1e-3, seed=1)

        result = run_distributed(case14, case14_areas, noisy, TIGHT)
        diff = compare_solutions(case14_solution, result.merged)

        assert result.converged
        assert diff.max_angle_diff_deg > 0.0
        assert diff.max_angle_diff_deg < 1.0

    def test_iteration_cap_reports_failed_areas(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test areas that hit the cap are listed and the merge is not converged."""
        noisy = perturb_state(case14, case14_solution.state, 1e-2, seed=2)

        result = run_distributed(
            case14, case14_areas, noisy, SolverOptions(tolerance=1e-12, max_iterations=1)
        )

        assert not result.converged
        assert result.failed_areas
        assert set(result.failed_areas) <= {1, 2, 3, 4}

    def test_partition_errors_propagate(
        self, case14: Network, case14_areas: dict[int, int], case14_solution: Solution
    ) -> None:
        """Test a map with a generator-free area is rejected before solving."""
        with pytest.raises(NoGeneratorInAreaError):
            run_distributed(case14, {**case14_areas, 3: 1}, case14_solution.state, TIGHT)


class TestCompareSolutions:
    """Tests for compare_solutions."""

    def test_identical(self, case14_solution: Solution) -> None:
        """Test a solution compared with itself."""
        diff = compare_solutions(case14_solution, case14_solution, top_k=3)

        assert diff.max_angle_diff_deg == 0.0
        assert diff.max_vm_diff_pu == 0.0
        assert [b.bus for b in diff.worst] == [1, 2, 3]

    def test_shifted_bus_ranks_first(self, case14_solution: Solution) -> None:
        """Test a 0.5 degree shift at one bus tops the ranking."""
        reference = VoltageProfile.from_solution(case14_solution)
        va = reference.va.copy()
        va[6] += np.radians(0.5)
        shifted = VoltageProfile(bus_ids=reference.bus_ids, vm=reference.vm, va=va)

        diff = compare_solutions(reference, shifted)

        assert diff.worst[0].bus == 7
        assert diff.max_angle_diff_deg == pytest.approx(0.5)
        assert not diff.within(MAX_ANGLE_DEG, MAX_VM_PU)

    def test_bus_order_is_irrelevant(self, case14_solution: Solution) -> None:
        """Test profiles listing buses in another order compare by id."""
        reference = VoltageProfile.from_solution(case14_solution)
        order = np.arange(reference.bus_ids.size)[::-1]
        reversed_profile = VoltageProfile(
            bus_ids=reference.bus_ids[order], vm=reference.vm[order], va=reference.va[order]
        )

        diff = compare_solutions(reference, reversed_profile)

        assert diff.max_angle_diff_deg == 0.0

    def test_different_bus_sets(self, case14_solution: Solution) -> None:
        """Test solutions over different buses cannot be compared."""
        reference = VoltageProfile.from_solution(case14_solution)
        partial = VoltageProfile(
            bus_ids=reference.bus_ids[:-1], vm=reference.vm[:-1], va=reference.va[:-1]
        )

        with pytest.raises(SolutionMismatchError, match="different buses"):
            compare_solutions(reference, partial)

    def test_wrap_degrees(self) -> None:
        """Test wrapping into (-180, 180]."""
        wrapped = wrap_degrees(np.array([190.0, -190.0, 180.0, -180.0, 360.0]))

        np.testing.assert_allclose(wrapped, [-170.0, 170.0, 180.0, 180.0, 0.0])

    def test_full_turn_is_no_difference(self, case14_solution: Solution) -> None:
        """Test angles differing by 360 degrees are equal."""
        reference = VoltageProfile.from_solution(case14_solution)
        turned = VoltageProfile(
            bus_ids=reference.bus_ids, vm=reference.vm, va=reference.va + 2.0 * np.pi
        )

        diff = compare_solutions(reference, turned)

        assert diff.max_angle_diff_deg == pytest.approx(0.0, abs=1e-9)
