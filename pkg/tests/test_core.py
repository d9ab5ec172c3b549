import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_problem
from dirac_spectra import (
    BoundaryPair,
    PotentialGrid,
    ReducedBC,
    Strip,
    Weights,
    adjoint_problem,
    boundary_preset,
    check_regularity,
    gauge_reduce,
    reduce_bc,
)
from dirac_spectra.core import probe_rational
from dirac_spectra.errors import InvalidBoundaryError, InvalidProblemError, NotReducibleError

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


# ----- weights -------------------------------------------------------------------


@pytest.mark.parametrize("b1,b2", [(1.0, 1.0), (-1.0, -1.0), (0.0, 1.0), (-1.0, math.inf)])
def test_weights_reject_bad_signs(b1, b2):
    with pytest.raises(InvalidProblemError):
        Weights(b1, b2)


def test_weights_tag_and_lattice():
    w = Weights(-2.0, 3.0, Fraction(2, 3))
    assert w.n1n2 == (2, 3)
    assert w.base == pytest.approx(1.0)
    assert w.spacing == pytest.approx(2 * math.pi / 5)
    with pytest.raises(InvalidProblemError):
        Weights(-2.0, 3.0, Fraction(1, 2))


def test_dirac_weights_tagged_automatically():
    assert Weights(-1.5, 1.5).ratio == 1
    assert Weights(-1.0, math.sqrt(2)).ratio is None


@pytest.mark.parametrize("value,expected", [(0.5, Fraction(1, 2)), (2 / 3, Fraction(2, 3)), (math.sqrt(2), None)])
def test_probe_rational(value, expected):
    assert probe_rational(value) == expected


# ----- potentials ----------------------------------------------------------------


def test_potential_grid_flags_and_interpolation():
    x = np.linspace(0, 1, 5)
    pot = PotentialGrid.from_entries(x, 2 * x)
    assert pot.m == 4
    assert pot.off_diagonal
    assert not pot.is_constant
    assert pot.entry(0, 1, 0.3) == pytest.approx(0.3)
    assert pot.entry(1, 0, 0.3) == pytest.approx(0.6)
    diag = PotentialGrid.from_entries(0.0, 0.0, q11=1.0, m=4)
    assert not diag.off_diagonal


def test_potential_rejects_nonfinite():
    with pytest.raises(InvalidProblemError):
        PotentialGrid.from_entries(np.array([0.0, np.nan, 1.0]), 0.0)


def test_potential_l1_norm_and_resample():
    x = np.linspace(0, 1, 129)
    pot = PotentialGrid.from_entries(2 * x, 2 * x)
    assert pot.l1_norm() == pytest.approx(1.0)
    coarse = pot.resampled(16)
    assert coarse.m == 16
    assert coarse.entry(0, 1, 0.5) == pytest.approx(1.0)


# ----- boundary conditions -------------------------------------------------------


def test_check_regularity_periodic_minors():
    m = check_regularity(boundary_preset("periodic"))
    assert (m.J12, m.J34, m.J32, m.J14) == (1, 1, -1, -1)
    assert m.regular


def test_check_regularity_all_at_zero():
    m = check_regularity(BoundaryPair.from_rows((1, 0, 0, 0), (0, 1, 0, 0)))
    assert m.J14 == 0 and not m.regular


def test_check_regularity_separated_rows():
    m = check_regularity(BoundaryPair.from_rows((1, 1, 0, 0), (0, 0, 2, 1)))
    assert m.J14 == 1 and m.J32 == -2 and m.regular


def test_rank_deficient_block_rejected():
    with pytest.raises(InvalidBoundaryError):
        BoundaryPair.from_rows((1, 0, 1, 0), (2, 0, 2, 0))


@pytest.mark.parametrize(
    "name,expected",
    [("periodic", (-1, 0, 0, -1)), ("antiperiodic", (1, 0, 0, 1))],
)
def test_reduce_bc_presets(name, expected):
    red = reduce_bc(boundary_preset(name))
    assert red.as_tuple() == pytest.approx(expected)


def test_reduce_bc_not_reducible():
    with pytest.raises(NotReducibleError):
        reduce_bc(BoundaryPair.from_rows((1, 0, 0, 0), (0, 1, 0, 0)))


@given(cplx, cplx, cplx, cplx)
def test_reduce_bc_idempotent(a, b, c, d):
    red = ReducedBC(a, b, c, d)
    again = reduce_bc(red.boundary_pair())
    assert again.as_tuple() == pytest.approx(red.as_tuple(), abs=1e-12)


@given(cplx, cplx, cplx, cplx, cplx.filter(lambda z: abs(z) > 0.1), cplx.filter(lambda z: abs(z) > 0.1))
def test_row_scaling_keeps_regularity_and_reduction(a, b, c, d, s1, s2):
    red = ReducedBC(a, b, c, d)
    pair = red.boundary_pair()
    S = np.diag([s1, s2])
    scaled = BoundaryPair(S @ pair.C, S @ pair.D)
    assert check_regularity(scaled).regular == check_regularity(pair).regular
    if red.regular:
        assert reduce_bc(scaled).as_tuple() == pytest.approx(red.as_tuple(), abs=1e-9)


def test_strip_validation():
    with pytest.raises(InvalidProblemError):
        Strip(0.0, -1, 1)
    with pytest.raises(InvalidProblemError):
        Strip(1.0, 1, 1)


def test_problem_size_mismatch():
    with pytest.raises(InvalidProblemError):
        make_problem(potential=PotentialGrid.zero(8, n=4))


# ----- adjoint -------------------------------------------------------------------


def test_adjoint_separated_rows():
    problem = make_problem(bc=ReducedBC(0.0, 1.0, -2.0, 0.0))
    adj = adjoint_problem(problem)
    block = adj.boundary.block
    assert np.allclose(block[0], [1, 1, 0, 0])
    assert np.allclose(block[1], [0, 0, 1, -2])
    red = reduce_bc(adj.boundary)
    assert red.a == 0 and red.d == 0


def test_adjoint_periodic_is_periodic():
    adj = adjoint_problem(make_problem(bc="periodic"))
    assert reduce_bc(adj.boundary).as_tuple() == pytest.approx((-1, 0, 0, -1))


@given(cplx, cplx, cplx, cplx)
def test_adjoint_involution(a, b, c, d):
    red = ReducedBC(a, b, c, d)
    if abs(red.det) < 1e-3:
        return
    x = np.linspace(0, 1, 9)
    pot = PotentialGrid.from_entries(x + 1j, 1 - 2j * x)
    problem = make_problem(b=(-1.0, 2.0), potential=pot, bc=red)
    twice = adjoint_problem(adjoint_problem(problem))
    assert reduce_bc(twice.boundary).as_tuple() == pytest.approx(red.as_tuple(), abs=1e-9)
    assert np.allclose(twice.potential.samples, pot.samples)
    assert check_regularity(adjoint_problem(problem).boundary).regular


# ----- gauge ---------------------------------------------------------------------


def test_gauge_constant_diagonal():
    q = 0.7
    pot = PotentialGrid.from_entries(1.0, 1.0, q11=q, m=32)
    res = gauge_reduce(make_problem(potential=pot))
    assert res.w1 == pytest.approx(np.exp(1j * q))
    assert res.w2 == pytest.approx(1.0)
    x = pot.nodes
    assert np.allclose(res.k, np.exp(-1j * q * x))
    assert res.problem.potential.off_diagonal


def test_gauge_identity_on_off_diagonal():
    pot = PotentialGrid.from_entries(1.0, 2.0, m=16)
    res = gauge_reduce(make_problem(potential=pot))
    assert res.w1 == 1 and res.w2 == 1
    assert np.allclose(res.problem.potential.samples, pot.samples)
