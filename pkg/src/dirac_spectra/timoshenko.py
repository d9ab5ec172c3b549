"""Damped Timoshenko beam as a 4x4 Dirac-type system.

The beam coefficients are sampled on a grid over ``[0, ℓ]``.  Under the
standing hypothesis that ``ν = EI·ρ / (K·I_ρ)`` is constant, the change of
variable ``t(x) = ∫_0^x γ`` turns the beam generator into

    -iB^{-1} y' + Q4(t) y = λ y,    C y(0) + D y(1) = 0,

with ``B = diag(-b1, b1, -b2, b2)``.  When ``β1 = β2 = 0`` the system splits
into two separated 2x2 problems plus a bounded coupling block ``w̃Q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .core import BoundaryPair, DiracProblem, PotentialGrid, Strip, Weights, check_regularity, reduce_bc
from .determinant import DeterminantHandle, delta0_strip_bound
from .errors import (
    InvalidProfileError,
    NonRegularError,
    NotDecoupledError,
    ReductionHypothesisError,
)
from .spectra import EigenvalueRecord, find_zeros_strip

__all__ = [
    "BeamCoefficients",
    "BeamReduction",
    "Decoupling",
    "BeamSpectrum",
    "NU_TOL",
    "validate_nu",
    "build_reduction",
    "decouple",
    "beam_spectrum",
    "hausdorff_distance",
]

NU_TOL = 1e-8
ROUND_TRIP_TOL = 1e-10


def _profile(value, x: np.ndarray, name: str, dtype=float) -> np.ndarray:
    arr = np.asarray(value, dtype=dtype)
    if arr.ndim == 0:
        arr = np.full(x.shape, arr.item(), dtype=dtype)
    if arr.shape != x.shape:
        raise InvalidProfileError(f"profile {name} has shape {arr.shape}, expected {x.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidProfileError(f"profile {name} has non-finite samples")
    return arr


@dataclass(frozen=True)
class BeamCoefficients:
    """Sampled beam data.

    Parameters
    ----------
    x : ndarray
        Increasing sample points with ``x[0] = 0`` and ``x[-1] = ℓ``.
    rho, I_rho, K, EI : ndarray
        Positive material profiles (scalars are broadcast).
    p1, p2 : ndarray
        Damping profiles, possibly complex.
    alpha1, alpha2, beta1, beta2 : complex
        Boundary parameters at ``x = ℓ``.
    """

    x: np.ndarray
    rho: np.ndarray
    I_rho: np.ndarray
    K: np.ndarray
    EI: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    alpha1: complex = 0.0
    alpha2: complex = 0.0
    beta1: complex = 0.0
    beta2: complex = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 3 or x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise InvalidProfileError("x must be an increasing grid starting at 0 with at least 3 points")
        object.__setattr__(self, "x", x)
        for name in ("rho", "I_rho", "K", "EI"):
            arr = _profile(getattr(self, name), x, name)
            if np.any(arr <= 0):
                raise InvalidProfileError(f"profile {name} must be positive")
            object.__setattr__(self, name, arr)
        for name in ("p1", "p2"):
            object.__setattr__(self, name, _profile(getattr(self, name), x, name, complex))
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def constant(
        cls,
        length: float = 1.0,
        m: int = 64,
        rho: float = 1.0,
        I_rho: float = 1.0,
        K: float = 1.0,
        EI: float = 1.0,
        p1: complex = 0.0,
        p2: complex = 0.0,
        **boundary,
    ) -> "BeamCoefficients":
        """Uniform beam sampled at ``m + 1`` equispaced points."""
        x = np.linspace(0.0, float(length), m + 1)
        return cls(x, rho, I_rho, K, EI, p1, p2, **boundary)

    @property
    def length(self) -> float:
        return float(self.x[-1])

    @property
    def h1(self) -> np.ndarray:
        return np.sqrt(self.EI * self.I_rho)

    @property
    def h2(self) -> np.ndarray:
        return np.sqrt(self.K * self.rho)


def validate_nu(coeffs: BeamCoefficients) -> float:
    """Check that ``ν = EI·ρ/(K·I_ρ)`` is constant and return it.

    Raises
    ------
    ReductionHypothesisError
        If the relative spread of the sampled ``ν`` reaches ``NU_TOL``.
    """
    nu = coeffs.EI * coeffs.rho / (coeffs.K * coeffs.I_rho)
    spread = (nu.max() - nu.min()) / abs(nu.mean())
    if spread >= NU_TOL:
        raise ReductionHypothesisError(f"EI·ρ/(K·I_ρ) is not constant (relative spread {spread:.3e})")
    return float(nu.mean())


@dataclass(frozen=True)
class BeamReduction:
    """Result of :func:`build_reduction`.

    Attributes
    ----------
    b1, b2 : float
        Positive weights; ``B = diag(-b1, b1, -b2, b2)``.
    gamma, t : ndarray
        Density ``γ`` on the x-grid (``∫γ = 1``) and ``t(x) = ∫_0^x γ``.
    q_hat : ndarray
        ``Q̂(x)`` on the x-grid, shape ``(len(x), 4, 4)``.
    h1_end, h2_end : float
        ``h1(ℓ)`` and ``h2(ℓ)``.
    problem : DiracProblem
        4x4 problem on the uniform t-grid.
    """

    coeffs: BeamCoefficients = field(repr=False)
    nu: float
    b1: float
    b2: float
    gamma: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    q_hat: np.ndarray = field(repr=False)
    h1_end: float
    h2_end: float
    problem: DiracProblem = field(repr=False)

    @property
    def B(self) -> np.ndarray:
        return self.problem.B

    @property
    def C(self) -> np.ndarray:
        return self.problem.boundary.C

    @property
    def D(self) -> np.ndarray:
        return self.problem.boundary.D

    def x_of_t(self, t) -> np.ndarray:
        """Inverse change of variable by monotone linear interpolation."""
        return np.interp(t, self.t, self.coeffs.x)

    def coupling(self) -> PotentialGrid:
        """The off-diagonal 2x2 blocks of ``Q4`` (the coupling ``w̃Q``)."""
        s = np.array(self.problem.potential.samples)
        s[:, :2, :2] = 0.0
        s[:, 2:, 2:] = 0.0
        return PotentialGrid(s)

    def with_coupling_scale(self, factor: float) -> DiracProblem:
        """The 4x4 problem with ``w̃Q`` multiplied by ``factor``."""
        s = np.array(self.problem.potential.samples)
        s[:, :2, 2:] *= factor
        s[:, 2:, :2] *= factor
        return self.problem.with_potential(PotentialGrid(s))

    def to_dict(self) -> dict:
        def cmat(a):
            a = np.asarray(a)
            return {"re": a.real.tolist(), "im": a.imag.tolist()}

        return {
            "b1": self.b1,
            "b2": self.b2,
            "nu": self.nu,
            "h1_end": self.h1_end,
            "h2_end": self.h2_end,
            "B": cmat(self.B.astype(complex)),
            "C": cmat(self.C),
            "D": cmat(self.D),
            "Q_hat_at_0": cmat(self.q_hat[0]),
        }


def _interp_complex(t_new: np.ndarray, t: np.ndarray, values: np.ndarray) -> np.ndarray:
    flat = values.reshape(values.shape[0], -1)
    out = np.empty((t_new.size, flat.shape[1]), dtype=complex)
    for k in range(flat.shape[1]):
        out[:, k] = np.interp(t_new, t, flat[:, k].real) + 1j * np.interp(t_new, t, flat[:, k].imag)
    return out.reshape((t_new.size,) + values.shape[1:])


def build_reduction(coeffs: BeamCoefficients, m: int | None = None) -> BeamReduction:
    """Reduce the beam to a 4x4 Dirac-type problem on ``[0, 1]``.

    Parameters
    ----------
    coeffs : BeamCoefficients
    m : int, optional
        Number of intervals of the uniform t-grid (defaults to the number of
        x-intervals).
    """
    nu = validate_nu(coeffs)
    x = coeffs.x
    root1 = np.sqrt(coeffs.I_rho / coeffs.EI)
    b1 = float(trapezoid(root1, x))
    if not (math.isfinite(b1) and b1 > 0):
        raise InvalidProfileError("√(I_ρ/EI) is not integrable")
    gamma = root1 / b1
    b2 = float(np.mean(np.sqrt(coeffs.rho / coeffs.K) / gamma))

    t = cumulative_trapezoid(gamma, x, initial=0.0)
    t = t / t[-1]
    if np.any(np.diff(t) <= 0):
        raise InvalidProfileError("the change of variable is not strictly increasing")
    if np.max(np.abs(np.interp(t, t, x) - x)) > ROUND_TRIP_TOL * max(1.0, coeffs.length):
        raise InvalidProfileError("change of variable round trip failed")

    h1, h2 = coeffs.h1, coeffs.h2
    dh1 = np.gradient(h1, x)
    dh2 = np.gradient(h2, x)
    p1, p2 = coeffs.p1, coeffs.p2
    z = np.zeros_like(p1)
    inner = np.stack(
        [
            np.stack([p1 + dh1, p1 - dh1, h2 + z, -h2 + z], axis=-1),
            np.stack([p1 + dh1, p1 - dh1, h2 + z, -h2 + z], axis=-1),
            np.stack([-h2 + z, -h2 + z, p2 + dh2, p2 - dh2], axis=-1),
            np.stack([h2 + z, h2 + z, p2 + dh2, p2 - dh2], axis=-1),
        ],
        axis=-2,
    )
    theta_inv = 1.0 / (-2j * np.stack([coeffs.I_rho, coeffs.I_rho, coeffs.rho, coeffs.rho], axis=-1))
    q_hat = theta_inv[:, :, None] * inner

    m = m if m is not None else x.size - 1
    t_grid = np.linspace(0.0, 1.0, m + 1)
    q4 = _interp_complex(t_grid, t, q_hat)

    h1_end, h2_end = float(h1[-1]), float(h2[-1])
    a1, a2, be1, be2 = coeffs.alpha1, coeffs.alpha2, coeffs.beta1, coeffs.beta2
    C = np.array([[1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, 0]], dtype=complex)
    D = np.array(
        [
            [0, 0, 0, 0],
            [a1 - h1_end, a1 + h1_end, be1, be1],
            [0, 0, 0, 0],
            [be2, be2, a2 - h2_end, a2 + h2_end],
        ],
        dtype=complex,
    )
    problem = DiracProblem((-b1, b1, -b2, b2), PotentialGrid(q4), BoundaryPair(C, D))
    return BeamReduction(coeffs, nu, b1, b2, gamma, t, q_hat, h1_end, h2_end, problem)


@dataclass(frozen=True)
class Decoupling:
    """Two separated 2x2 problems and the size of the coupling block."""

    problems: tuple
    coupling_sup: float
    coupling: PotentialGrid = field(repr=False)


def decouple(reduction: BeamReduction) -> Decoupling:
    """Split a ``β1 = β2 = 0`` beam into two 2x2 problems.

    Sub-problem ``j`` has weights ``(-b_j, b_j)``, the diagonal block of
    ``Q4`` as potential, and rows ``y1(0) + y2(0) = 0``,
    ``(α_j - h_j(ℓ)) y1(1) + (α_j + h_j(ℓ)) y2(1) = 0``.

    Raises
    ------
    NotDecoupledError
        If ``β1`` or ``β2`` is nonzero.
    NonRegularError
        If ``α_j = ±h_j(ℓ)`` for some ``j``.
    """
    c = reduction.coeffs
    if c.beta1 != 0 or c.beta2 != 0:
        raise NotDecoupledError("β1 or β2 is nonzero; use the full 4x4 problem")
    samples = reduction.problem.potential.samples
    problems = []
    for j, (b, alpha, h) in enumerate(
        [(reduction.b1, c.alpha1, reduction.h1_end), (reduction.b2, c.alpha2, reduction.h2_end)], start=1
    ):
        bc = BoundaryPair(
            np.array([[1, 1], [0, 0]], dtype=complex),
            np.array([[0, 0], [alpha - h, alpha + h]], dtype=complex),
        )
        if not check_regularity(bc).regular:
            raise NonRegularError(f"α{j} = ±h{j}(ℓ): sub-problem {j} is not regular")
        block = slice(2 * (j - 1), 2 * j)
        pot = PotentialGrid(np.ascontiguousarray(samples[:, block, block]))
        problems.append(DiracProblem.from_weights(Weights(-b, b), pot, bc))
    coupling = reduction.coupling()
    return Decoupling(tuple(problems), float(np.abs(coupling.samples).max()), coupling)


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two finite point sets in the plane."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


@dataclass(frozen=True)
class BeamSpectrum:
    """Coupled and decoupled eigenvalues over one window.

    ``drift`` is the Hausdorff distance between the coupled zeros and the
    union of the decoupled ones, both restricted to the inner window (one
    spacing away from each edge) and measured against the full other set.
    """

    coupled: list
    subsystems: tuple
    strip: Strip
    coupling_scale: float
    drift: float | None

    def modal_rows(self) -> list[tuple[str, EigenvalueRecord]]:
        rows = [("coupled", r) for r in self.coupled]
        for j, recs in enumerate(self.subsystems, start=1):
            rows.extend((str(j), r) for r in recs)
        return rows


def _expand(records) -> np.ndarray:
    return np.array([r.lam for r in records for _ in range(r.multiplicity)], dtype=complex)


def beam_spectrum(
    reduction: BeamReduction,
    window: tuple[float, float],
    strip_h: float | None = None,
    coupling_scale: float = 1.0,
    workers: int | None = None,
) -> BeamSpectrum:
    """Zeros of ``det(C + D·Φ4(1, λ))`` over ``window``.

    Parameters
    ----------
    reduction : BeamReduction
    window : (float, float)
        Real-part range.
    strip_h : float, optional
        Half-height of the search strip.  The default is the largest
        unperturbed zero height of the decoupled sub-problems plus
        ``1 + sup|w̃Q|``; it needs ``β1 = β2 = 0``.
    coupling_scale : float
        Factor applied to ``w̃Q`` before the search (``0`` decouples).
    """
    re_min, re_max = window
    subsystems: tuple = ()
    parts = None
    try:
        parts = decouple(reduction)
    except NotDecoupledError:
        if strip_h is None:
            raise
    if strip_h is None:
        height = max(delta0_strip_bound(reduce_bc(p.boundary), p.weights) for p in parts.problems)
        strip_h = height + 1.0 + coupling_scale * parts.coupling_sup
    strip = Strip(strip_h, re_min, re_max)
    coupled_problem = reduction.with_coupling_scale(coupling_scale)
    coupled = find_zeros_strip(DeterminantHandle.propagator(coupled_problem), strip, workers=workers)
    drift = None
    if parts is not None:
        subsystems = tuple(
            find_zeros_strip(DeterminantHandle.propagator(p), strip, workers=workers) for p in parts.problems
        )
        margin = DeterminantHandle.propagator(coupled_problem).spacing
        union = np.concatenate([_expand(s) for s in subsystems])
        mine = _expand(coupled)

        def inner(z):
            return z[(z.real >= re_min + margin) & (z.real <= re_max - margin)]

        if inner(mine).size or inner(union).size:
            to_union = max((np.abs(union - z).min() for z in inner(mine)), default=0.0) if union.size else math.inf
            to_mine = max((np.abs(mine - z).min() for z in inner(union)), default=0.0) if mine.size else math.inf
            drift = float(max(to_union, to_mine))
        else:
            drift = 0.0
    return BeamSpectrum(coupled, subsystems, strip, float(coupling_scale), drift)
