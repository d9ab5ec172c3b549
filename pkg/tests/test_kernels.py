import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_problem
from dirac_spectra import PotentialGrid, Weights
from dirac_spectra.errors import InvalidProblemError, KernelDivergenceError
from dirac_spectra.kernels import (
    KernelField,
    TriangleGrid,
    apply_transform,
    assemble_K,
    dump_kernel,
    goursat_residuals,
    kernel_norms,
    kernel_pair,
    load_kernel,
    p_system_residual,
    phi_via_kernels,
    side_condition_residuals,
    solve_P,
    solve_R,
    volterra_l1_norm,
)
from dirac_spectra.propagator import solve_cauchy_pm, transfer_matrix

DIRAC = Weights(-1.0, 1.0)


@pytest.fixture(scope="module")
def constant_pair():
    q = 1.0
    pot = PotentialGrid.from_entries(q, 0.0, m=32)
    return q, pot, kernel_pair(pot, DIRAC, TriangleGrid(32))


@pytest.fixture(scope="module")
def smooth_pair():
    x = np.linspace(0, 1, 65)
    pot = PotentialGrid.from_entries(np.ones_like(x), x)
    return pot, kernel_pair(pot, DIRAC, TriangleGrid(64))


def test_grid_minimum_size():
    with pytest.raises(InvalidProblemError):
        TriangleGrid(3)


def test_zero_potential_gives_zero_kernels():
    pair = kernel_pair(PotentialGrid.zero(16), DIRAC, TriangleGrid(16))
    for field in (pair.R, pair.K_plus, pair.K_minus):
        assert np.all(field.values == 0)
    assert np.all(pair.P_plus == 0)


def test_constant_R(constant_pair):
    q, _, pair = constant_pair
    mask = pair.R.grid.mask
    assert np.allclose(pair.R.entry(0, 1)[mask], 0.5j * q)
    for j, k in ((0, 0), (1, 0), (1, 1)):
        assert np.allclose(pair.R.entry(j, k), 0.0)


@pytest.mark.parametrize("sign", [1, -1])
def test_constant_P_and_K(constant_pair, sign):
    q, _, pair = constant_pair
    P = pair.P_plus if sign > 0 else pair.P_minus
    K = pair.K_plus if sign > 0 else pair.K_minus
    assert np.allclose(P[:, 0], sign * 0.5j * q)
    assert np.allclose(P[:, 1], 0.0)
    mask = K.grid.mask
    assert np.allclose(K.entry(0, 0)[mask], sign * 0.5j * q)
    assert np.allclose(K.entry(0, 1)[mask], 0.5j * q)
    assert np.allclose(K.entry(1, 0), 0.0) and np.allclose(K.entry(1, 1), 0.0)


def test_constant_kernel_norms(constant_pair):
    q, _, pair = constant_pair
    norms = kernel_norms(pair.K_plus)
    assert norms["Xinf"] == pytest.approx(abs(q) / 2)
    assert norms["entries"]["12"]["Xinf"] == pytest.approx(abs(q) / 2)


def test_goursat_residuals_small(smooth_pair):
    pot, pair = smooth_pair
    res = goursat_residuals(pair.R, pot, DIRAC)
    assert set(res) == {"R11", "R12", "R21", "R22"}
    assert max(res.values()) < 1e-8


def test_diagonal_trace_identity(smooth_pair):
    pot, pair = smooth_pair
    a1, a2 = DIRAC.a
    diag = pair.R.diagonal()
    x = pair.R.grid.nodes
    assert np.allclose(diag[:, 0, 1], 1j * pot.entry(0, 1, x) / (a2 - a1), atol=1e-10)
    assert np.allclose(diag[:, 1, 0], 1j * pot.entry(1, 0, x) / (a1 - a2), atol=1e-10)


@pytest.mark.parametrize("sign", [1, -1])
def test_p_system_and_side_conditions(smooth_pair, sign):
    pot, pair = smooth_pair
    P = pair.P_plus if sign > 0 else pair.P_minus
    K = pair.K_plus if sign > 0 else pair.K_minus
    assert p_system_residual(pair.R, DIRAC, P, sign) < 1e-8
    res = side_condition_residuals(K, pot, DIRAC, sign)
    assert res["jump"] < 1e-3 and res["edge"] < 1e-3


@pytest.mark.parametrize("lam", [0.0, 3.0, 5 + 0.5j])
def test_transform_first_order(lam):
    x = np.linspace(0, 1, 513)
    pot = PotentialGrid.from_entries(np.ones_like(x), x)
    problem = make_problem(potential=pot)
    errs = []
    for N in (32, 64):
        pair = kernel_pair(pot.resampled(N), DIRAC, TriangleGrid(N))
        ref = solve_cauchy_pm(problem, lam, 1)[:: 512 // N]
        errs.append(np.max(np.abs(apply_transform(pair.K_plus, DIRAC, lam, 1) - ref)))
    assert errs[1] < errs[0] / 2 or errs[1] < 1e-12


def test_transform_identity_at_zero_potential():
    pair = kernel_pair(PotentialGrid.zero(8), DIRAC, TriangleGrid(8))
    t = pair.K_plus.grid.nodes
    e = apply_transform(pair.K_minus, DIRAC, 2.0, -1)
    assert np.allclose(e, np.stack([np.exp(-2j * t), -np.exp(2j * t)], axis=1))


def test_phi_via_kernels_matches_propagator(smooth_pair):
    pot, pair = smooth_pair
    lam = np.array([0.0, 2.0, -4 + 0.3j])
    phi = phi_via_kernels(pair.r_plus, pair.r_minus, DIRAC, lam)
    ref = transfer_matrix(make_problem(potential=pot), lam)
    assert np.max(np.abs(phi - ref)) < 5e-3


def test_divergence_error_reports_update():
    pot = PotentialGrid.from_entries(5.0, 5.0, m=16)
    with pytest.raises(KernelDivergenceError) as info:
        solve_R(pot, DIRAC, TriangleGrid(16), max_sweeps=2)
    assert info.value.last_update > 0


def test_diagonal_potential_rejected():
    pot = PotentialGrid.from_entries(0.0, 0.0, q11=1.0, m=8)
    with pytest.raises(InvalidProblemError):
        solve_R(pot, DIRAC, TriangleGrid(8))


def test_solve_P_bad_sign(constant_pair):
    with pytest.raises(ValueError):
        solve_P(constant_pair[2].R, DIRAC, 0)


def test_norms_of_constant_field():
    grid = TriangleGrid(16)
    ones = np.where(grid.mask, 1.0, 0.0)
    norms = kernel_norms(ones)
    assert norms["X1"] == pytest.approx(1.0)
    assert norms["Xinf"] == pytest.approx(1.0)
    assert kernel_norms(np.zeros((17, 17))) == {"X1": 0.0, "Xinf": 0.0}


@given(st.integers(4, 40), st.floats(0.1, 5))
def test_volterra_norm_equals_x1(n, c):
    # for kernels depending on t only the operator norm is the X1 norm
    grid = TriangleGrid(n)
    t = grid.nodes
    f = np.where(grid.mask, c * (1 + t[None, :]), 0.0)
    x1 = kernel_norms(f)["X1"]
    assert volterra_l1_norm(f) == pytest.approx(x1, rel=3.0 / n)


def test_dump_load_round_trip(tmp_path, constant_pair):
    _, _, pair = constant_pair
    path = tmp_path / "k.bin"
    dump_kernel(pair.K_minus, DIRAC, path)
    field, weights = load_kernel(path)
    assert field.role == "K-" and field.grid.N == 32
    assert (weights.b1, weights.b2) == (-1.0, 1.0)
    assert np.allclose(field.values, pair.K_minus.values, atol=1e-7)
    assert path.stat().st_size == 64 + 33 * 33 * 4 * 8


def test_kernel_field_validation():
    grid = TriangleGrid(4)
    with pytest.raises(InvalidProblemError):
        KernelField(grid, np.zeros((5, 5, 2, 2)), "bogus")
    with pytest.raises(InvalidProblemError):
        KernelField(grid, np.zeros((4, 4, 2, 2)))


def test_assemble_K_from_zero_profile():
    grid = TriangleGrid(8)
    R = KernelField(grid, np.zeros((9, 9, 2, 2)))
    K = assemble_K(R, np.zeros((9, 2)), 1)
    assert K.role == "K+" and not np.any(K.values)


def test_kernel_trace_order():
    # Δ from traces converges to the propagator value as N grows
    x = np.linspace(0, 1, 257)
    pot = PotentialGrid.from_entries(np.cos(2 * math.pi * x), 1 + x)
    from dirac_spectra.determinant import DeterminantHandle

    problem = make_problem(potential=pot, bc="periodic")
    lam = np.array([1.0, 4 + 0.2j])
    ref = DeterminantHandle.propagator(problem)(lam)
    errs = [np.max(np.abs(DeterminantHandle.kernel_trace(problem, N)(lam) - ref)) for N in (32, 64)]
    assert errs[1] < errs[0]
