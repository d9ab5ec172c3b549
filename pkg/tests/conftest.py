import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dirac_spectra import BoundaryPair, DiracProblem, PotentialGrid, ReducedBC, Weights, boundary_preset

settings.register_profile(
    "numerics",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numerics")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def make_problem(b=(-1.0, 1.0), potential=None, bc="periodic", m=64):
    """Small helper used across the test modules."""
    weights = b if isinstance(b, Weights) else Weights(*b)
    if potential is None:
        potential = PotentialGrid.zero(m)
    if isinstance(bc, str):
        bc = boundary_preset(bc)
    elif isinstance(bc, ReducedBC):
        bc = bc.boundary_pair()
    return DiracProblem.from_weights(weights, potential, bc)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def separated_bc() -> BoundaryPair:
    return ReducedBC(0.0, 1.0, -2.0, 0.0).boundary_pair()
