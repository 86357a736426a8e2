"""Test fixtures for gridflow."""

from pathlib import Path

import pytest

from gridflow.config import Settings, SolverOptions
from gridflow.fdpf.models import Solution
from gridflow.fdpf.solver import fdpf_solve
from gridflow.grid.io import load_case
from gridflow.grid.models import Network
from gridflow.partition.areas import read_area_map

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    """Directory holding case and area-map fixture files."""
    return FIXTURES


@pytest.fixture(scope="session")
def case14() -> Network:
    """IEEE 14-bus system parsed from the MatPower fixture."""
    return load_case(FIXTURES / "case14.m")


@pytest.fixture(scope="session")
def case14_areas() -> dict[int, int]:
    """Four-area map of the IEEE 14-bus system (7 inter-area branches)."""
    return read_area_map(FIXTURES / "ieee14_4area.areas")


@pytest.fixture(scope="session")
def two_bus() -> Network:
    """Slack feeding a 50 MW / 20 MVAr load over one line."""
    return load_case(FIXTURES / "two_bus.json")


@pytest.fixture(scope="session")
def case118() -> Network:
    """IEEE 118-bus system parsed from the MatPower fixture."""
    return load_case(FIXTURES / "case118.m")


@pytest.fixture(scope="session")
def case118_areas() -> dict[int, int]:
    """Four-area map of the IEEE 118-bus system."""
    return read_area_map(FIXTURES / "ieee118_4area.areas")


@pytest.fixture
def settings() -> Settings:
    """Settings independent of the environment, serial by default."""
    return Settings(_env_file=None, threads=1)  # type: ignore[call-arg]


@pytest.fixture
def options() -> SolverOptions:
    """Single-threaded solver options at the default tolerance."""
    return SolverOptions(threads=1)


@pytest.fixture(scope="session")
def case14_solution(case14: Network) -> Solution:
    """Monolithic case14 solution at a tight tolerance."""
    return fdpf_solve(case14, SolverOptions(tolerance=1e-8, max_iterations=100, threads=1))


@pytest.fixture(scope="session")
def case118_solution(case118: Network) -> Solution:
    """Monolithic case118 solution at a tight tolerance."""
    return fdpf_solve(case118, SolverOptions(tolerance=1e-8, max_iterations=100, threads=1))
