"""Tests for Ybus, B' and B'' assembly."""

import numpy as np
import pytest

from gridflow.admittance import (
    b_prime_full,
    b_prime_row,
    build_fdpf_matrices,
    build_ybus,
    ybus_row,
)
from gridflow.exceptions import ZeroImpedanceError
from gridflow.grid.models import Branch, Bus, BusKind, Generator, Network, NetworkArrays
from tests.networks import make_network
from tests.oracles import dense_ybus


def _phase_shifter() -> Network:
    return make_network(
        [Bus(id=1, kind=BusKind.SLACK), Bus(id=2, kind=BusKind.PQ, pd=0.3)],
        [Branch(from_bus=1, to_bus=2, r=0.005, x=0.08, tap=1.05, shift=np.radians(10.0))],
        [Generator(bus=1, pg=0.0)],
    )


class TestYbus:
    """Tests for the bus admittance matrix."""

    def test_case14_matches_dense_oracle(self, case14: Network) -> None:
        """Test the sparse Ybus equals the entry-by-entry dense build."""
        ybus = build_ybus(case14)

        np.testing.assert_allclose(ybus.to_dense(), dense_ybus(case14), rtol=1e-13, atol=1e-13)

    def test_two_bus_entries(self, two_bus: Network) -> None:
        """Test the 2-bus pi model entries."""
        y = 1.0 / complex(0.01, 0.1)
        dense = build_ybus(two_bus).to_dense()

        assert dense[0, 0] == pytest.approx(y + 0.01j)
        assert dense[0, 1] == pytest.approx(-y)
        assert dense[1, 0] == pytest.approx(-y)

    def test_case118_matches_dense_oracle(self, case118: Network) -> None:
        """Test the 118-bus Ybus against the dense build."""
        ybus = build_ybus(case118)

        np.testing.assert_allclose(ybus.to_dense(), dense_ybus(case118), rtol=1e-12, atol=1e-12)

    def test_lossless_branch_with_tap(self) -> None:
        """Test y / t^2 and y / t on a lossless branch with tap 2."""
        net = make_network(
            [Bus(id=1, kind=BusKind.SLACK), Bus(id=2, kind=BusKind.PQ)],
            [Branch(from_bus=1, to_bus=2, x=0.1, tap=2.0)],
            [Generator(bus=1, pg=0.0)],
        )

        dense = build_ybus(net).to_dense()

        np.testing.assert_allclose(dense, [[-2.5j, 5j], [5j, -10j]], atol=1e-12)

    def test_phase_shifter_is_asymmetric(self) -> None:
        """Test a phase shift makes Ybus non-symmetric while the oracle agrees."""
        net = _phase_shifter()
        ybus = build_ybus(net)

        assert not ybus.is_symmetric()
        np.testing.assert_allclose(ybus.to_dense(), dense_ybus(net), rtol=1e-13)

    def test_out_of_service_branch_excluded(self, two_bus: Network) -> None:
        """Test branches out of service contribute nothing."""
        branch = two_bus.branches[0].model_copy(update={"in_service": False})
        net = two_bus.model_copy(update={"branches": (branch,)})

        assert build_ybus(net).nnz == 0

    def test_zero_impedance(self, two_bus: Network) -> None:
        """Test r = x = 0 on an in-service branch."""
        branch = two_bus.branches[0].model_copy(update={"r": 0.0, "x": 0.0})
        net = two_bus.model_copy(update={"branches": (branch,)})

        with pytest.raises(ZeroImpedanceError):
            build_ybus(net)

    @pytest.mark.parametrize("bus_id", [1, 4, 7, 9, 14])
    def test_node_local_row(self, case14: Network, bus_id: int) -> None:
        """Test a row rebuilt from one bus's branches equals the assembled row."""
        i = case14.index_of(bus_id)
        dense = build_ybus(case14).to_dense()
        local = ybus_row(case14, bus_id)

        assert sorted(local) == list(np.flatnonzero(dense[i]))
        for j, value in local.items():
            assert value == pytest.approx(dense[i, j], rel=1e-12)


class TestFdpfMatrices:
    """Tests for the XB-scheme B' and B''."""

    def test_two_bus_values(self, two_bus: Network) -> None:
        """Test B' = 1/x and B'' = -Im(Y22) on the 2-bus case."""
        matrices = build_fdpf_matrices(two_bus)

        assert matrices.b_prime.to_dense()[0, 0] == pytest.approx(10.0)
        assert matrices.b_double_prime.to_dense()[0, 0] == pytest.approx(9.890990099, rel=1e-9)

    def test_case14_dimensions_and_symmetry(self, case14: Network) -> None:
        """Test B' spans non-slack buses and B'' spans PQ buses, both symmetric."""
        matrices = build_fdpf_matrices(case14)

        assert matrices.b_prime.n == 13
        assert matrices.b_double_prime.n == 9
        assert matrices.b_prime.is_symmetric()
        assert matrices.b_double_prime.is_symmetric()
        assert np.all(np.linalg.eigvalsh(matrices.b_prime.to_dense()) > 0)
        assert np.all(np.linalg.eigvalsh(matrices.b_double_prime.to_dense()) > 0)

    def test_b_double_prime_ignores_shift(self) -> None:
        """Test B'' stays symmetric with a phase shifter present."""
        net = make_network(
            [
                Bus(id=1, kind=BusKind.SLACK),
                Bus(id=2, kind=BusKind.PQ, pd=0.3),
                Bus(id=3, kind=BusKind.PQ, pd=0.2),
            ],
            [
                Branch(from_bus=1, to_bus=2, x=0.1),
                Branch(from_bus=2, to_bus=3, r=0.01, x=0.08, tap=0.98, shift=np.radians(5.0)),
            ],
            [Generator(bus=1, pg=0.0)],
        )

        matrices = build_fdpf_matrices(net)

        assert matrices.b_double_prime.is_symmetric()

    def test_trivial_network(self) -> None:
        """Test a slack-only network gives empty matrices."""
        net = make_network([Bus(id=1, kind=BusKind.SLACK)], [], [Generator(bus=1, pg=0.0)])

        matrices = build_fdpf_matrices(net)

        assert matrices.trivial
        assert matrices.b_prime.n == 0

    @pytest.mark.parametrize("bus_id", [2, 5, 9])
    def test_b_prime_node_local_row(self, case14: Network, bus_id: int) -> None:
        """Test B' rows rebuilt per bus match the assembled Laplacian."""
        i = case14.index_of(bus_id)
        dense = b_prime_full(NetworkArrays.from_network(case14)).to_dense()

        for j, value in b_prime_row(case14, bus_id).items():
            assert value == pytest.approx(dense[i, j], rel=1e-12)


def _without_shunts(net: Network) -> Network:
    buses = tuple(b.model_copy(update={"gs": 0.0, "bs": 0.0}) for b in net.buses)
    branches = tuple(
        br.model_copy(update={"b_charging": 0.0, "tap": 1.0, "shift": 0.0}) for br in net.branches
    )
    return net.model_copy(update={"buses": buses, "branches": branches})


class TestKirchhoffRows:
    """Tests for zero row sums once every path to ground is removed."""

    @pytest.mark.parametrize("case", ["case14", "case118"])
    def test_ybus_rows_sum_to_zero(self, case: str, request: pytest.FixtureRequest) -> None:
        """Test Ybus rows sum to zero without charging, shunts or off-nominal taps."""
        net = _without_shunts(request.getfixturevalue(case))

        rows = build_ybus(net).to_dense().sum(axis=1)

        np.testing.assert_allclose(rows, 0.0, atol=1e-9)

    @pytest.mark.parametrize("case", ["case14", "case118"])
    def test_b_prime_rows_sum_to_zero(self, case: str, request: pytest.FixtureRequest) -> None:
        """Test the full B' is a Laplacian on the unmodified case."""
        net = request.getfixturevalue(case)

        rows = b_prime_full(NetworkArrays.from_network(net)).to_dense().sum(axis=1)

        np.testing.assert_allclose(rows, 0.0, atol=1e-9)
