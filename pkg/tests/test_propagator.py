import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import make_problem
from dirac_spectra import PotentialGrid, Weights
from dirac_spectra.errors import StripTooTallError
from dirac_spectra.propagator import (
    adjoint_propagate,
    check_strip,
    expm_2x2,
    propagate,
    solve_cauchy_pm,
    transfer_matrix,
    transfer_matrix_derivative,
)

small = st.floats(-4, 4, allow_nan=False)
cplx = st.builds(complex, small, small)


@given(st.lists(cplx, min_size=4, max_size=4))
def test_expm_2x2_matches_scipy(entries):
    A = np.array(entries, dtype=complex).reshape(2, 2)
    assert np.allclose(expm_2x2(A), expm(A), rtol=1e-11, atol=1e-11)


def test_zero_potential_at_pi():
    phi = propagate(make_problem(m=8), math.pi).end
    assert np.allclose(phi, -np.eye(2), atol=1e-14)


def test_initial_value_is_identity():
    traj = propagate(make_problem(m=8), 1.0 + 0.5j)
    assert np.array_equal(traj.phi[0], np.eye(2))


@pytest.mark.parametrize("lam", [0.7, 3.0, 5 + 0.5j])
def test_constant_codiag_solution(lam):
    q = 1.0
    problem = make_problem(potential=PotentialGrid.from_entries(q, 0.0, m=8))
    e = solve_cauchy_pm(problem, lam, 1)
    x = problem.potential.nodes
    expected = np.stack([np.exp(-1j * lam * x) + 1j * q * np.sin(lam * x) / lam, np.exp(1j * lam * x)], axis=1)
    assert np.allclose(e, expected, atol=1e-12)


@pytest.mark.parametrize("sign", [1, -1])
def test_cauchy_zero_lambda_is_constant(sign):
    e = solve_cauchy_pm(make_problem(m=8), 0.0, sign)
    assert np.allclose(e, [[1.0, sign]] * 9)


def test_bad_sign_rejected():
    with pytest.raises(ValueError):
        solve_cauchy_pm(make_problem(m=8), 1.0, 0)


@given(st.floats(-30, 30), st.floats(-2, 2))
def test_wronskian_off_diagonal(re, im):
    x = np.linspace(0, 1, 33)
    w = Weights(-1.0, math.sqrt(3.0))
    problem = make_problem(b=w, potential=PotentialGrid.from_entries(1 + x, np.sin(4 * x) + 1j))
    lam = complex(re, im)
    det = np.linalg.det(transfer_matrix(problem, lam))
    assert abs(det - np.exp(1j * (w.b1 + w.b2) * lam)) < 1e-9 * max(1.0, abs(det))


def test_wronskian_with_diagonal_trace():
    x = np.linspace(0, 1, 65)
    w = Weights(-1.0, 2.0)
    pot = PotentialGrid.from_entries(0 * x, 0 * x, q11=np.ones_like(x), q22=x)
    lam = 2.0 + 0.3j
    det = np.linalg.det(transfer_matrix(make_problem(b=w, potential=pot), lam))
    trace_integral = w.b1 * 1.0 + w.b2 * 0.5
    assert det == pytest.approx(np.exp(1j * (w.b1 + w.b2) * lam - 1j * trace_integral), rel=1e-12)


def test_second_order_convergence():
    lam = 4.0
    fine = []
    for m in (32, 64, 128):
        x = np.linspace(0, 1, m + 1)
        fine.append(transfer_matrix(make_problem(potential=PotentialGrid.from_entries(np.cos(3 * x), x**2)), lam))
    ratio = np.linalg.norm(fine[0] - fine[1]) / np.linalg.norm(fine[1] - fine[2])
    assert 3.5 < ratio < 4.5


def test_uniform_asymptotics_trend():
    x = np.linspace(0, 1, 1025)
    problem = make_problem(potential=PotentialGrid.from_entries(1 + x, 1 - x))
    devs = []
    for lam in (20.0, 40.0, 80.0, 160.0):
        phi = propagate(problem, lam).phi
        ref = np.zeros_like(phi)
        ref[:, 0, 0] = np.exp(-1j * lam * x)
        ref[:, 1, 1] = np.exp(1j * lam * x)
        devs.append(float(np.max(np.abs(phi - ref))))
    assert all(b <= 1.1 * a for a, b in zip(devs, devs[1:]))


def test_adjoint_propagate_real_symmetric():
    x = np.linspace(0, 1, 17)
    problem = make_problem(potential=PotentialGrid.from_entries(x, x))
    lam = 2.5
    assert np.allclose(adjoint_propagate(problem, lam).phi, propagate(problem, lam).phi)


def test_overflow_guard():
    with pytest.raises(StripTooTallError):
        check_strip((-1.0, 1.0), 800j)
    with pytest.raises(StripTooTallError):
        transfer_matrix(make_problem(m=4), 1000j)


def test_derivative_matches_difference():
    x = np.linspace(0, 1, 65)
    problem = make_problem(b=(-1.0, 1.7), potential=PotentialGrid.from_entries(1 + x, 2j * x))
    lam = np.array([1.3 + 0.2j, -4.0 - 0.4j])
    _, dphi = transfer_matrix_derivative(problem, lam)
    h = 1e-5
    fd = (transfer_matrix(problem, lam + h) - transfer_matrix(problem, lam - h)) / (2 * h)
    assert np.allclose(dphi, fd, rtol=1e-7, atol=1e-8)


def test_four_by_four_block_diagonal():
    from dirac_spectra import BoundaryPair, DiracProblem

    pot = PotentialGrid.zero(8, n=4)
    bc = BoundaryPair(np.eye(4), -np.eye(4))
    problem = DiracProblem((-1.0, 1.0, -2.0, 2.0), pot, bc)
    phi = transfer_matrix(problem, 0.5)
    assert np.allclose(np.diag(phi), np.exp(1j * np.array([-1, 1, -2, 2]) * 0.5))
