import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_problem
from dirac_spectra import ReducedBC, Strip, Weights, boundary_preset
from dirac_spectra.determinant import DeterminantHandle, delta0_eval
from dirac_spectra.errors import InvalidProblemError
from dirac_spectra.regularity import (
    RegularityVerdict,
    a0_real_zeros,
    classify_strict,
    critical_d,
    find_strictifying_weight,
    numerical_separation,
    weighted_boundary,
    weighted_polynomial,
)
from dirac_spectra.spectra import find_zeros_strip

DIRAC = Weights(-1.0, 1.0)
IRRATIONAL = Weights(-1.0, math.sqrt(2))


@pytest.mark.parametrize(
    "bc,weights,strict,branch",
    [
        (ReducedBC(1.0, 1.0, 1.0, 1.0), DIRAC, "no", "not-regular"),
        (ReducedBC(0.0, 1.0, -2.0, 0.0), IRRATIONAL, "yes", "separated"),
        (ReducedBC(2.0, 0.0, 0.0, 1.0), DIRAC, "yes", "bc0-i"),
        (ReducedBC(1.0, 0.0, 0.0, 1.0), DIRAC, "no", "dirac-discriminant"),
        (ReducedBC(-1.0, 0.0, 0.0, -1.0), DIRAC, "no", "dirac-discriminant"),
        (ReducedBC(1.0, 1.0, 1.0, 0.5), DIRAC, "yes", "dirac-discriminant"),
        (ReducedBC(1.0, 0.0, 0.0, 1.0), IRRATIONAL, "no", "bc0-ii"),
        (ReducedBC(0.0, 1.0, 1.0, 0.5), IRRATIONAL, "yes", "a0-irrational"),
        (ReducedBC(0.3, 1.0, 1.0, 0.2), IRRATIONAL, "undetermined", "numerical"),
        (ReducedBC(1.0, 0.0, 0.0, -1.0), Weights(-1.0, 2.0, Fraction(1, 2)), "no", "bc0-iii"),
        (ReducedBC(1.0, 0.0, 0.0, 1.0), Weights(-1.0, 2.0, Fraction(1, 2)), "yes", "bc0-iii"),
        (ReducedBC(0.5, 1.0, 1.0, -0.3), Weights(-1.0, 2.0, Fraction(1, 2)), "yes", "rational-poly"),
    ],
)
def test_classifier_examples(bc, weights, strict, branch):
    verdict = classify_strict(bc, weights)
    assert (verdict.strict, verdict.branch) == (strict, branch)


def test_bc0_i_witness():
    verdict = classify_strict(ReducedBC(2.0, 0.0, 0.0, 1.0), DIRAC)
    assert verdict.witnesses["crit"] == pytest.approx(math.log(2))


def test_a0_rational_critical_value():
    # with n1 = 1, n2 = 2 the lattice polynomial z^3 + bc' z^2 ... has a double
    # root exactly when 4 (-d)^3 = 27 (-bc)^2
    w = Weights(-1.0, 2.0, Fraction(1, 2))
    bcp = -1.0
    d = -((27 / 4) ** (1 / 3))
    assert classify_strict(ReducedBC(0.0, 1.0, bcp, d), w).strict == "no"
    assert classify_strict(ReducedBC(0.0, 1.0, bcp, d + 0.1), w).strict == "yes"
    assert classify_strict(ReducedBC(0.0, 1.0, bcp, d), w).branch == "a0-rational"


def test_critical_d_value():
    assert critical_d(1.0, math.sqrt(2)) == pytest.approx(-1.97063, abs=1e-5)


def test_a0_irrational_at_critical_d():
    d_star = critical_d(1.0, math.sqrt(2))
    verdict = classify_strict(ReducedBC(0.0, 1.0, 1.0, d_star), IRRATIONAL)
    assert verdict.strict == "no"
    assert verdict.witnesses["d_star"] == pytest.approx(d_star)


cplx = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


@given(cplx, cplx, cplx, cplx)
def test_dirac_verdict_matches_closed_form_zeros(a, b, c, d):
    red = ReducedBC(a, b, c, d)
    if abs(red.det) < 0.2:
        return
    verdict = classify_strict(red, DIRAC)
    disc = (a - d) ** 2 + 4 * b * c
    # Dirac Δ0 is a quadratic in e^{iλ}: a double root needs a vanishing discriminant
    assert (verdict.strict == "no") == (abs(disc) <= 1e-12 * (abs(a - d) ** 2 + 4 * abs(b * c)))


def test_a0_real_zeros_match_strip_search():
    red = ReducedBC(0.0, 1.0, 1.0, 0.5)
    zs = np.array(a0_real_zeros(red, IRRATIONAL, -12.0, 12.0))
    handle = DeterminantHandle.closed_form(make_problem(b=IRRATIONAL, bc=red, m=4))
    recs = find_zeros_strip(handle, Strip(3.0, -12.0, 12.0))
    ref = np.array([r.lam for r in recs if -12 <= r.lam.real <= 12])
    assert zs.size == ref.size
    assert np.allclose(np.sort_complex(zs), np.sort_complex(ref), atol=1e-8)
    assert np.all(np.abs(delta0_eval(red, IRRATIONAL, zs)) < 1e-9)


def test_a0_real_zeros_rejects_complex_data():
    with pytest.raises(InvalidProblemError):
        a0_real_zeros(ReducedBC(0.0, 1.0, 1j, 0.5), IRRATIONAL, 0, 1)


def _lattice(offsets, spacing=1.0):
    def source(T):
        pts = []
        for n in range(-int(T) - 2, int(T) + 3):
            for off in offsets(n):
                pts.append((complex(n * spacing + off), 1))
        return [(z, m) for z, m in pts if abs(z.real) <= T]

    return source


def test_numerical_separation_flat():
    report = numerical_separation(None, zero_source=_lattice(lambda n: (0.0, 0.5)), T0=10, levels=3)
    assert report.trend == "flat" and report.hint == "separated"
    assert report.windows == (10, 20, 40)


def test_numerical_separation_collapsing():
    report = numerical_separation(None, zero_source=_lattice(lambda n: (0.0, 1.0 / (abs(n) + 2))), T0=10, levels=3)
    assert report.trend == "decreasing" and report.hint == "collapsing"


def test_numerical_separation_multiple_zero():
    def source(T):
        return [(complex(n), 2) for n in range(-int(T), int(T) + 1)]

    assert numerical_separation(None, zero_source=source, T0=5, levels=2).min_gaps == (0.0, 0.0)


def test_numerical_separation_levels_bound():
    with pytest.raises(ValueError):
        numerical_separation(ReducedBC(0, 1, 1, 0), DIRAC, levels=5)


def test_numerical_separation_on_reduced_rows():
    report = numerical_separation(ReducedBC(0.0, 1.0, -2.0, 0.0), DIRAC, T0=25, levels=2)
    assert report.hint == "separated"
    assert report.min_gaps[0] == pytest.approx(math.pi, rel=1e-6)


@pytest.mark.parametrize("name", ["periodic", "antiperiodic"])
def test_strictifying_weight_for_double_spectra(name):
    bc = boundary_preset(name)
    w = find_strictifying_weight(bc, DIRAC)
    assert w == 1.5
    weighted = weighted_boundary(bc, w)
    roots = np.roots(weighted_polynomial(weighted, DIRAC, 1.0))
    assert abs(roots[0] - roots[1]) > 0.1


def test_weighted_polynomial_needs_tag():
    with pytest.raises(InvalidProblemError):
        weighted_polynomial(boundary_preset("periodic"), IRRATIONAL, 1.0)


def test_verdict_validation():
    with pytest.raises(ValueError):
        RegularityVerdict(True, "maybe", "x", {"det": 1})
    with pytest.raises(ValueError):
        RegularityVerdict(False, "yes", "x", {"det": 1})
    with pytest.raises(ValueError):
        RegularityVerdict(True, "yes", "x", {})


def test_verdict_json_deterministic():
    bc = ReducedBC(0.3 + 0.1j, 1.0, 1.0, 0.2)
    first = classify_strict(bc, IRRATIONAL).with_hint("inconclusive").to_json()
    second = classify_strict(bc, IRRATIONAL).with_hint("inconclusive").to_json()
    assert first == second
    data = json.loads(first)
    assert data["numerical_hint"] == "inconclusive"
    assert data["witnesses"]["det"] == [pytest.approx(0.06 - 1), pytest.approx(0.02)]
