"""Fundamental matrices of ``y' = iB(λI - Q(x))y`` on ``[0, 1]``.

Each grid interval is advanced with the exact exponential of the system
frozen at the interval midpoint (the potential is averaged from the two
neighbouring nodes).  The discrete solution is therefore the exact solution
for a piecewise-constant potential, which makes the scheme exact when
``Q = 0`` and keeps ``det Φ`` equal to ``exp(i tr(B) λ x - i∫tr(BQ))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import DiracProblem
from .errors import StripTooTallError

__all__ = [
    "Trajectory",
    "OVERFLOW_LIMIT",
    "check_strip",
    "expm_2x2",
    "step_matrices",
    "step_matrices_grid",
    "transfer_matrix",
    "transfer_matrix_derivative",
    "propagate",
    "propagate_many",
    "solve_cauchy_pm",
    "adjoint_propagate",
    "interval_values",
]

OVERFLOW_LIMIT = 700.0
_SUBSTEP_EXPONENT = 0.5


@dataclass(frozen=True)
class Trajectory:
    """Node values of the fundamental matrix for one spectral parameter.

    Attributes
    ----------
    lam : complex
    x : ndarray, shape (M + 1,)
    phi : ndarray, shape (M + 1, n, n)
        ``Φ(x_i, λ)`` with ``Φ(0, λ) = I``.
    """

    lam: complex
    x: np.ndarray
    phi: np.ndarray

    @property
    def end(self) -> np.ndarray:
        return self.phi[-1]

    def column(self, vector) -> np.ndarray:
        """``Φ(x_i, λ)·v`` at every node, shape (M + 1, n)."""
        return self.phi @ np.asarray(vector, dtype=complex)


def check_strip(b, lam) -> None:
    """Raise :class:`StripTooTallError` when exponentials could overflow."""
    worst = float(np.max(np.abs(np.imag(lam)), initial=0.0)) * float(np.max(np.abs(b)))
    if worst > OVERFLOW_LIMIT:
        raise StripTooTallError(f"|Im λ|·max|b| = {worst:.1f} exceeds {OVERFLOW_LIMIT}")


def expm_2x2(A: np.ndarray) -> np.ndarray:
    """Batched closed-form exponential of 2x2 matrices.

    Uses ``exp(A) = e^μ (cosh(s) I + sinh(s)/s (A - μI))`` with ``μ`` the
    half-trace and ``s² = ((A11 - A22)/2)² + A12 A21``; both ``cosh`` and
    ``sinh(s)/s`` are even in ``s`` so the square-root branch is irrelevant.
    """
    a11, a12, a21, a22 = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    mu = 0.5 * (a11 + a22)
    delta = 0.5 * (a11 - a22)
    s2 = delta * delta + a12 * a21
    s = np.sqrt(s2)
    small = np.abs(s) < 1e-3
    safe_s = np.where(small, 1.0, s)
    sinhc = np.where(small, 1.0 + s2 / 6.0 + s2 * s2 / 120.0, np.sinh(safe_s) / safe_s)
    cosh = np.cosh(s)
    scale = np.exp(mu)
    out = np.empty(A.shape, dtype=complex)
    out[..., 0, 0] = scale * (cosh + sinhc * delta)
    out[..., 1, 1] = scale * (cosh - sinhc * delta)
    out[..., 0, 1] = scale * sinhc * a12
    out[..., 1, 0] = scale * sinhc * a21
    return out


def expm_2x2_derivative(A: np.ndarray, dA_diag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``exp(A)`` and its derivative along a diagonal direction ``dA``.

    ``dA_diag`` has shape ``(..., 2)``; the off-diagonal part of ``A`` is
    held fixed, which is the situation of ``A = h·iB(λI - Q)`` differentiated
    in ``λ``.
    """
    a11, a12, a21, a22 = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    mu = 0.5 * (a11 + a22)
    delta = 0.5 * (a11 - a22)
    dmu = 0.5 * (dA_diag[..., 0] + dA_diag[..., 1])
    ddelta = 0.5 * (dA_diag[..., 0] - dA_diag[..., 1])
    s2 = delta * delta + a12 * a21
    s = np.sqrt(s2)
    small = np.abs(s) < 1e-3
    safe_s = np.where(small, 1.0, s)
    safe_s2 = np.where(small, 1.0, s2)
    sinhc = np.where(small, 1.0 + s2 / 6.0 + s2 * s2 / 120.0, np.sinh(safe_s) / safe_s)
    cosh = np.cosh(s)
    # d sinhc / d(s^2)
    ksinhc = np.where(small, 1.0 / 6.0 + s2 / 60.0 + s2 * s2 / 1680.0, (cosh - sinhc) / (2.0 * safe_s2))
    ds2 = 2.0 * delta * ddelta
    dcosh = 0.5 * sinhc * ds2
    dsinhc = ksinhc * ds2
    scale = np.exp(mu)
    E = np.empty(A.shape, dtype=complex)
    E[..., 0, 0] = scale * (cosh + sinhc * delta)
    E[..., 1, 1] = scale * (cosh - sinhc * delta)
    E[..., 0, 1] = scale * sinhc * a12
    E[..., 1, 0] = scale * sinhc * a21
    dE = dmu[..., None, None] * E
    dE[..., 0, 0] += scale * (dcosh + dsinhc * delta + sinhc * ddelta)
    dE[..., 1, 1] += scale * (dcosh - dsinhc * delta - sinhc * ddelta)
    dE[..., 0, 1] += scale * dsinhc * a12
    dE[..., 1, 0] += scale * dsinhc * a21
    return E, dE


def _expm(A: np.ndarray) -> np.ndarray:
    if A.shape[-1] == 2:
        return expm_2x2(A)
    flat = A.reshape((-1,) + A.shape[-2:])
    return expm(flat).reshape(A.shape)


def _interval_data(problem: DiracProblem) -> tuple[np.ndarray, float]:
    """Midpoint potentials and the common interval length.

    A constant potential collapses to a single interval of length one, which
    is the same piecewise-constant propagation computed in one step.
    """
    pot = problem.potential
    if pot.is_constant:
        return pot.samples[:1], 1.0
    return pot.midpoints(), 1.0 / pot.m


def _generator(b: np.ndarray, lam: np.ndarray, qmid: np.ndarray, h: float) -> np.ndarray:
    """``h·iB(λI - Q)`` with shape (K, L, n, n) for K intervals and L parameters."""
    n = b.size
    eye = np.eye(n)
    mat = lam[None, :, None, None] * eye - qmid[:, None, :, :]
    return 1j * h * b[None, None, :, None] * mat


def _substeps(b: np.ndarray, lam: np.ndarray, h: float) -> int:
    """Power of two keeping ``h·|b|·|Im λ|`` per substep below one half."""
    worst = h * float(np.max(np.abs(b))) * float(np.max(np.abs(np.imag(lam)), initial=0.0))
    r = 1
    while worst / r > _SUBSTEP_EXPONENT:
        r *= 2
    return r


def step_matrices(problem: DiracProblem, lam, theta: float = 1.0) -> np.ndarray:
    """Exponentials ``exp(θ h iB(λI - Q_mid))``, shape (K, L, n, n).

    A constant potential gives ``K = 1`` (the whole interval in one step).
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    check_strip(problem.b, lam)
    b = np.asarray(problem.b, dtype=float)
    qmid, h = _interval_data(problem)
    h = h * theta
    r = _substeps(b, lam, h)
    E = _expm(_generator(b, lam, qmid, h / r))
    while r > 1:
        E = E @ E
        r //= 2
    return E


def _tree_product(E: np.ndarray) -> np.ndarray:
    """``E[K-1] @ ... @ E[0]`` by pairwise reduction over the first axis."""
    while E.shape[0] > 1:
        if E.shape[0] % 2:
            E = np.concatenate([E, np.broadcast_to(np.eye(E.shape[-1]), (1,) + E.shape[1:])], axis=0)
        E = E[1::2] @ E[0::2]
    return E[0]


def transfer_matrix(problem: DiracProblem, lam) -> np.ndarray:
    """``Φ(1, λ)`` for an array of spectral parameters, shape ``lam.shape + (n, n)``."""
    lam_arr = np.asarray(lam, dtype=complex)
    flat = lam_arr.ravel()
    n = problem.n
    out = np.empty((flat.size, n, n), dtype=complex)
    # bound the (intervals x parameters) work arrays to a few tens of MB
    chunk = max(1, 2**20 // max(1, problem.potential.m * n * n))
    for start in range(0, flat.size, chunk):
        E = step_matrices(problem, flat[start : start + chunk])
        out[start : start + chunk] = _tree_product(E)
    return out.reshape(lam_arr.shape + (n, n))


def _tree_product_derivative(E: np.ndarray, dE: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ordered product and its derivative by pairwise reduction."""
    while E.shape[0] > 1:
        if E.shape[0] % 2:
            eye = np.broadcast_to(np.eye(E.shape[-1]), (1,) + E.shape[1:])
            E = np.concatenate([E, eye], axis=0)
            dE = np.concatenate([dE, np.zeros_like(eye)], axis=0)
        left, right = E[1::2], E[0::2]
        dE = dE[1::2] @ right + left @ dE[0::2]
        E = left @ right
    return E[0], dE[0]


def transfer_matrix_derivative(problem: DiracProblem, lam) -> tuple[np.ndarray, np.ndarray]:
    """``Φ(1, λ)`` and ``∂Φ(1, λ)/∂λ`` of the discrete scheme (2x2 problems).

    The derivative is exact for the piecewise-constant propagation, so it
    is consistent with :func:`transfer_matrix` to round-off.
    """
    if problem.n != 2:
        raise ValueError("analytic λ-derivative is implemented for 2x2 problems")
    lam_arr = np.asarray(lam, dtype=complex)
    flat = lam_arr.ravel()
    check_strip(problem.b, flat)
    b = np.asarray(problem.b, dtype=float)
    qmid, h = _interval_data(problem)
    phi = np.empty((flat.size, 2, 2), dtype=complex)
    dphi = np.empty_like(phi)
    chunk = max(1, 2**19 // max(1, problem.potential.m * 4))
    for start in range(0, flat.size, chunk):
        part = flat[start : start + chunk]
        r = _substeps(b, part, h)
        A = _generator(b, part, qmid, h / r)
        dA = np.broadcast_to(1j * (h / r) * b, A.shape[:-2] + (2,))
        E, dE = expm_2x2_derivative(A, dA)
        while r > 1:
            dE = dE @ E + E @ dE
            E = E @ E
            r //= 2
        phi[start : start + chunk], dphi[start : start + chunk] = _tree_product_derivative(E, dE)
    shape = lam_arr.shape + (2, 2)
    return phi.reshape(shape), dphi.reshape(shape)


def step_matrices_grid(problem: DiracProblem, lam, theta: float = 1.0) -> np.ndarray:
    """Like :func:`step_matrices` but always one matrix per grid interval."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    pot = problem.potential
    check_strip(problem.b, lam)
    b = np.asarray(problem.b, dtype=float)
    h = theta / pot.m
    r = _substeps(b, lam, h)
    qmid = pot.samples[:1] if pot.is_constant else pot.midpoints()
    E = _expm(_generator(b, lam, qmid, h / r))
    while r > 1:
        E = E @ E
        r //= 2
    if pot.is_constant:
        E = np.broadcast_to(E, (pot.m,) + E.shape[1:])
    return E


def propagate_many(problem: DiracProblem, lams) -> np.ndarray:
    """Node values ``Φ(x_i, λ_l)``, shape (L, M + 1, n, n)."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    E = step_matrices_grid(problem, lams)
    m, n = problem.potential.m, problem.n
    phi = np.empty((lams.size, m + 1, n, n), dtype=complex)
    phi[:, 0] = np.eye(n)
    current = np.broadcast_to(np.eye(n), (lams.size, n, n)).astype(complex)
    for i in range(m):
        current = E[i] @ current
        phi[:, i + 1] = current
    return phi


def propagate(problem: DiracProblem, lam: complex) -> Trajectory:
    """Fundamental matrix ``Φ(x_i, λ)`` on the potential grid."""
    phi = propagate_many(problem, [lam])[0]
    return Trajectory(complex(lam), problem.potential.nodes, phi)


def solve_cauchy_pm(problem: DiracProblem, lam: complex, sign: int) -> np.ndarray:
    """Solution with ``e(0) = (1, ±1)``, shape (M + 1, 2)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return propagate(problem, lam).column([1.0, float(sign)])


def adjoint_propagate(problem: DiracProblem, lam: complex) -> Trajectory:
    """Fundamental matrix of the system with potential ``Q^*``."""
    return propagate(problem.with_potential(problem.potential.conj_transpose()), lam)


def interval_values(problem: DiracProblem, lam: complex, start_values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Solution values inside every interval.

    Parameters
    ----------
    start_values : ndarray, shape (M + 1, n)
        Solution at the grid nodes (only the first M are used).
    theta : ndarray, shape (Q,)
        Relative positions in ``[0, 1]`` inside each interval.

    Returns
    -------
    ndarray, shape (M, Q, n)
        ``y(x_i + θ_q h)`` obtained by exact propagation from ``x_i``.
    """
    out = np.empty((problem.potential.m, len(theta), problem.n), dtype=complex)
    for q, th in enumerate(theta):
        E = step_matrices_grid(problem, [lam], theta=float(th))[:, 0]
        out[:, q] = np.einsum("ijk,ik->ij", E, start_values[:-1])
    return out
