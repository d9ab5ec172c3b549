import math

import numpy as np
import pytest

from conftest import make_problem
from dirac_spectra import PotentialGrid, Strip
from dirac_spectra.basis import (
    RootPair,
    boundary_residual,
    eigenpair_functions,
    equation_residual,
    gram_diagnostics,
    inner_product,
    normalize_biorthogonal,
)
from dirac_spectra.determinant import DeterminantHandle
from dirac_spectra.errors import InsufficientDataError, NotAnEigenvalueError
from dirac_spectra.spectra import find_zeros_strip

SEP_LAMBDA = math.pi / 2 - 0.5j * math.log(2)


def _pairs(problem, window, h=1.5):
    handle = DeterminantHandle.propagator(problem)
    recs = find_zeros_strip(handle, Strip(h, *window))
    pairs = [p for r in recs for p in eigenpair_functions(problem, r)]
    return normalize_biorthogonal(pairs)


def test_separated_null_vector():
    problem = make_problem(bc="separated")
    (pair,) = eigenpair_functions(problem, SEP_LAMBDA)
    v = pair.f[0] / np.linalg.norm(pair.f[0])
    assert abs(abs(np.vdot(v, [1, -1])) / math.sqrt(2) - 1) < 1e-12
    assert boundary_residual(problem, pair) < 1e-12
    # central differences leave an O(|λ|² h²) residual
    assert equation_residual(problem, pair) < abs(SEP_LAMBDA) ** 2 / 64**2


def test_not_an_eigenvalue():
    with pytest.raises(NotAnEigenvalueError):
        eigenpair_functions(make_problem(bc="separated"), SEP_LAMBDA + 0.1)


def test_periodic_double_gives_two_pairs():
    pairs = eigenpair_functions(make_problem(bc="periodic"), 2 * math.pi)
    assert len(pairs) == 2
    normed = normalize_biorthogonal(pairs)
    cross = np.array([[inner_product(a.f_quad, b.g_quad) for b in normed] for a in normed])
    assert np.allclose(cross, np.eye(2), atol=1e-12)


def test_biorthogonality_with_potential():
    x = np.linspace(0, 1, 129)
    problem = make_problem(potential=PotentialGrid.from_entries(1 + x, 2j * x), bc="separated")
    pairs = _pairs(problem, (-12.0, 12.0), h=2.0)
    assert len(pairs) >= 6
    for p in pairs:
        assert p.norm_f == pytest.approx(1.0)
        assert boundary_residual(problem, p) < 1e-10
    cross = np.array([[inner_product(a.f_quad, b.g_quad) for b in pairs] for a in pairs])
    assert np.max(np.abs(cross - np.eye(len(pairs)))) < 1e-9


def test_gram_on_orthonormal_exponentials():
    # e^{2πikx} e1 are orthonormal and biorthogonal to themselves
    m = 16
    nodes = np.polynomial.legendre.leggauss(8)[0] * 0.5 + 0.5
    xq = (np.arange(m)[:, None] + nodes[None, :]) / m
    pairs = []
    for k in range(-3, 4):
        q = np.zeros((m, 8, 2), dtype=complex)
        q[:, :, 0] = np.exp(2j * math.pi * k * xq)
        pairs.append(RootPair(k, complex(2 * math.pi * k), q[:, 0], q[:, 0], q, q, 1.0))
    report = gram_diagnostics(pairs)
    assert report.window == 7 and report.half_window == 3
    assert report.cond == pytest.approx(1.0, abs=1e-10)
    assert report.residual < 1e-12
    assert report.bessel == pytest.approx(1.0)
    eps_report = gram_diagnostics(pairs, eps=0.5)
    assert eps_report.blocks == [[k] for k in range(7)]


def test_gram_requires_five_pairs():
    pairs = eigenpair_functions(make_problem(bc="periodic"), 0.0)
    with pytest.raises(InsufficientDataError):
        gram_diagnostics(normalize_biorthogonal(pairs))


def test_gram_report_serialises():
    pairs = _pairs(make_problem(bc="separated"), (-10.0, 10.0))
    report = gram_diagnostics(pairs, window=5)
    data = report.to_dict()
    assert data["window"] == 5
    assert report.to_json() == gram_diagnostics(pairs, window=5).to_json()
    assert report.cond_growth == pytest.approx(report.cond / report.half_cond)
