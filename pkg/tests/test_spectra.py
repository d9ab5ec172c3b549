import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_problem
from dirac_spectra import PotentialGrid, ReducedBC, Strip
from dirac_spectra.determinant import DeterminantHandle
from dirac_spectra.errors import PairingError
from dirac_spectra.spectra import (
    EigenvalueRecord,
    ZeroFinder,
    assign_indices,
    count_zeros_rect,
    find_zeros_strip,
    group_parentheses,
    pair_with_unperturbed,
)

SEPARATED = ReducedBC(0.0, 1.0, -2.0, 0.0)


def _closed(bc="periodic"):
    return DeterminantHandle.closed_form(make_problem(bc=bc, m=4))


@pytest.mark.parametrize(
    "bc,rect,expected",
    [
        ("periodic", (-1.0, 1.0, -1.0, 1.0), 2),
        (SEPARATED, (0.0, 3.2, -1.0, 1.0), 1),
        (SEPARATED, (2.0, 3.0, -1.0, 1.0), 0),
    ],
)
def test_count_zeros_rect(bc, rect, expected):
    assert count_zeros_rect(_closed(bc), rect) == expected


def test_count_polynomial():
    def f(z):
        return (z - 0.3j) ** 3 * (z + 2)

    assert count_zeros_rect(f, (-1, 1, -1, 1)) == 3
    assert count_zeros_rect(f, (-3, 1, -1, 1)) == 4


def test_polynomial_zeros_with_multiplicity():
    def f(z):
        return (z - 0.5) ** 2 * (z + 1.25 - 0.2j)

    recs = find_zeros_strip(f, Strip(1.0, -2.0, 2.0), width_cap=1.0)
    assert [r.multiplicity for r in recs] == [1, 2]
    assert recs[0].lam == pytest.approx(-1.25 + 0.2j, abs=1e-10)
    assert recs[1].lam == pytest.approx(0.5, abs=1e-8)


def test_periodic_double_zero_on_column_cut():
    # the symmetric window puts a column edge through the double zero at 0
    recs = find_zeros_strip(_closed(), Strip(1.0, -12.0, 12.0))
    assert [r.multiplicity for r in recs] == [2, 2, 2]
    assert np.allclose([r.lam for r in recs], [-2 * math.pi, 0, 2 * math.pi], atol=1e-7)
    assert [r.index for r in recs] == [-1, 0, 1]


def test_separated_zeros_closed_form():
    recs = find_zeros_strip(_closed(SEPARATED), Strip(1.0, 0.0, 10.0))
    expected = math.pi / 2 + math.pi * np.arange(3) - 0.5j * math.log(2)
    assert np.allclose([r.lam for r in recs], expected, atol=1e-10)


def test_conjugation_metamorphic():
    # replacing (Q, C, D) by (-conj Q, conj C, conj D) maps every eigenvalue
    # λ to -conj λ because the new transfer matrix is conj Φ(λ)
    x = np.linspace(0, 1, 129)
    q12, q21 = 1 + 0.5j * x, np.cos(3 * x) - 0.2j
    bc = ReducedBC(0.3 + 0.2j, 1.0, -0.5j, 0.1)
    problem = make_problem(potential=PotentialGrid.from_entries(q12, q21), bc=bc)
    mirror = make_problem(
        potential=PotentialGrid.from_entries(-np.conj(q12), -np.conj(q21)),
        bc=ReducedBC(*np.conj(bc.as_tuple())),
    )
    strip = Strip(2.5, -10.0, 10.0)
    lams = np.array([r.lam for r in find_zeros_strip(DeterminantHandle.propagator(problem), strip)])
    other = np.array([r.lam for r in find_zeros_strip(DeterminantHandle.propagator(mirror), strip)])
    assert lams.size >= 5 and lams.size == other.size
    assert np.max(np.min(np.abs(lams[:, None] + np.conj(other)[None, :]), axis=1)) < 1e-8


def test_two_level_matches_direct():
    x = np.linspace(0, 1, 257)
    problem = make_problem(potential=PotentialGrid.from_entries(2 * x, 2 * x), bc=SEPARATED)
    handle = DeterminantHandle.propagator(problem)
    strip = Strip(1.5, -8.0, 8.0)
    direct = find_zeros_strip(handle, strip)
    two = find_zeros_strip(handle, strip, coarse=handle.coarse())
    assert len(direct) == len(two)
    assert np.allclose([r.lam for r in direct], [r.lam for r in two], atol=1e-9)


def test_newton_and_residual():
    finder = ZeroFinder(_closed(SEPARATED))
    z = finder.newton(1.5 - 0.3j)
    assert z == pytest.approx(math.pi / 2 - 0.5j * math.log(2), abs=1e-12)
    assert finder.residual(z) < 1e-12


def test_assign_indices():
    recs = assign_indices([EigenvalueRecord(complex(v)) for v in (3.0, -1.0, 0.0, -2.0)])
    assert [(r.lam.real, r.index) for r in recs] == [(-2, -2), (-1, -1), (0, 0), (3, 1)]


def test_record_rejects_zero_multiplicity():
    with pytest.raises(ValueError):
        EigenvalueRecord(1.0, 0)


def test_pairing_small_shift():
    base = [EigenvalueRecord(complex(n)) for n in range(-5, 6)]
    moved = [EigenvalueRecord(complex(n) + 0.1j) for n in range(-5, 6)]
    summary = pair_with_unperturbed(moved, base)
    assert summary.unmatched == 0
    assert all(r.gap == pytest.approx(0.1) for r in summary.records)
    assert [r.lam0 for r in summary.records] == [complex(n) for n in range(-5, 6)]


def test_pairing_expands_multiplicity():
    base = [EigenvalueRecord(0.0, 2)]
    split = [EigenvalueRecord(-0.1), EigenvalueRecord(0.1)]
    summary = pair_with_unperturbed(split, base)
    assert [r.lam0 for r in summary.records] == [0, 0]


def test_pairing_rejects_interior_loose_zero():
    base = [EigenvalueRecord(complex(n)) for n in range(-5, 6)]
    moved = [r for r in base if r.lam != 0]
    with pytest.raises(PairingError):
        pair_with_unperturbed(moved, base, window=(-5.0, 5.0), edge_allowance=1.0)
    # the same loss near the edge is tolerated
    near_edge = [r for r in base if r.lam != 5]
    assert pair_with_unperturbed(near_edge, base, window=(-5.0, 5.0), edge_allowance=1.0).unmatched == 1


@given(st.floats(0.5, 5.0), st.integers(2, 20))
def test_parentheses_singletons_for_separated_sequence(gap, n):
    lams = gap * np.arange(n) + 0.1j
    blocks = group_parentheses(lams, gap / 4)
    assert blocks == [[k] for k in range(n)]


@given(st.floats(0.5, 5.0), st.integers(2, 12), st.floats(0.01, 0.2))
def test_parentheses_merge_interleaved_progressions(gap, n, offset):
    # two progressions with offset well below 2ε pair up into blocks of two
    lams = np.concatenate([gap * np.arange(n), gap * np.arange(n) + offset * gap])
    blocks = group_parentheses(lams, gap / 4)
    assert len(blocks) == n
    assert all(len(b) == 2 for b in blocks)


def test_parentheses_multiplicity_copies():
    blocks = group_parentheses([EigenvalueRecord(0.0, 2), EigenvalueRecord(5.0)], 0.5)
    assert blocks == [[0, 1], [2]]
    with pytest.raises(ValueError):
        group_parentheses([1.0], 0.0)
