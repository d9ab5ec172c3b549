"""Characteristic determinants and closed-form zero families.

For reduced boundary rows ``(a, b, c, d)`` the unperturbed determinant is

    Δ0(λ) = d + a e^{i(b1+b2)λ} + (ad - bc) e^{ib1λ} + e^{ib2λ}.

Across module boundaries only zero sets are compared; raw values of full and
reduced determinants differ by the constant ``J14``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DiracProblem, ReducedBC, Weights, check_regularity, reduce_bc
from .errors import NonRegularError
from .propagator import check_strip, transfer_matrix, transfer_matrix_derivative

__all__ = [
    "DeterminantHandle",
    "ZeroFamily",
    "delta0_eval",
    "delta0_derivative",
    "delta0_scale",
    "delta_via_propagator",
    "delta_derivative_via_propagator",
    "delta0_zero_family",
    "delta0_strip_bound",
    "cluster_roots",
]

ROOT_CLUSTER_TOL = 1e-8


def _exps(weights: Weights, lam):
    lam = np.asarray(lam, dtype=complex)
    check_strip((weights.b1, weights.b2), lam)
    e1 = np.exp(1j * weights.b1 * lam)
    e2 = np.exp(1j * weights.b2 * lam)
    return e1, e2


def delta0_eval(bc: ReducedBC, weights: Weights, lam) -> np.ndarray:
    """Unperturbed determinant for reduced rows (vectorised in ``λ``)."""
    e1, e2 = _exps(weights, lam)
    return bc.d + bc.a * e1 * e2 + bc.det * e1 + e2


def delta0_derivative(bc: ReducedBC, weights: Weights, lam) -> np.ndarray:
    """Exact ``dΔ0/dλ``."""
    e1, e2 = _exps(weights, lam)
    b1, b2 = weights.b1, weights.b2
    return 1j * ((b1 + b2) * bc.a * e1 * e2 + b1 * bc.det * e1 + b2 * e2)


def delta0_scale(bc: ReducedBC, weights: Weights, lam) -> np.ndarray:
    """Sum of the moduli of the four exponential terms (local size of Δ0)."""
    y = np.imag(np.asarray(lam, dtype=complex))
    b1, b2 = weights.b1, weights.b2
    return (
        abs(bc.d)
        + abs(bc.a) * np.exp(-(b1 + b2) * y)
        + abs(bc.det) * np.exp(-b1 * y)
        + np.exp(-b2 * y)
    )


def _full_scale(b, lam) -> np.ndarray:
    y = np.imag(np.asarray(lam, dtype=complex))
    total = np.ones_like(y)
    for bj in b:
        total = total * np.maximum(1.0, np.exp(-bj * y))
    return total


def delta_derivative_via_propagator(problem: DiracProblem, lam) -> np.ndarray:
    """``dΔ/dλ`` for 2x2 problems, ``tr(adj(U)·D·∂Φ)`` with ``U = C + DΦ``."""
    lam = np.asarray(lam, dtype=complex)
    phi, dphi = transfer_matrix_derivative(problem, lam)
    C, D = problem.boundary.C, problem.boundary.D
    U = C + D @ phi
    dU = D @ dphi
    adj = np.empty_like(U)
    adj[..., 0, 0] = U[..., 1, 1]
    adj[..., 1, 1] = U[..., 0, 0]
    adj[..., 0, 1] = -U[..., 0, 1]
    adj[..., 1, 0] = -U[..., 1, 0]
    return np.einsum("...ij,...ji->...", adj, dU)


def delta_via_propagator(problem: DiracProblem, lam) -> np.ndarray:
    """``det(C + D·Φ(1, λ))`` with the problem's own boundary rows."""
    lam = np.asarray(lam, dtype=complex)
    phi = transfer_matrix(problem, lam)
    C, D = problem.boundary.C, problem.boundary.D
    return np.linalg.det(C + D @ phi)


@dataclass
class DeterminantHandle:
    """Callable determinant bound to a problem.

    Parameters
    ----------
    mode : {"closed-form", "propagator", "kernel-trace"}
    problem : DiracProblem
    reduced : ReducedBC, optional
        Cached reduction of the boundary rows (2x2 problems).
    evaluator : callable
        Vectorised ``λ -> Δ(λ)``.
    derivative : callable, optional
        Exact derivative when known (closed form only).
    """

    mode: str
    problem: DiracProblem
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    reduced: ReducedBC | None = None
    derivative: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __call__(self, lam) -> np.ndarray:
        return self.evaluator(np.asarray(lam, dtype=complex))

    def scale(self, lam) -> np.ndarray:
        """Local magnitude used for relative tolerances."""
        if self.reduced is not None:
            return delta0_scale(self.reduced, self.problem.weights, lam)
        bc = self.problem.boundary
        norm = (1.0 + np.abs(bc.C).max()) * (1.0 + np.abs(bc.D).max())
        return norm * _full_scale(self.problem.b, lam)

    @property
    def spacing(self) -> float:
        """Asymptotic zero spacing used to cap box widths."""
        b = np.asarray(self.problem.b)
        if self.problem.n == 2:
            return self.problem.weights.spacing
        # a block-diagonal weight behaves like a superposition of 2x2 systems
        return 2.0 * math.pi / float(np.sum(np.abs(b)))

    @classmethod
    def closed_form(cls, problem: DiracProblem) -> "DeterminantHandle":
        """Δ0 of the problem's boundary rows (the potential is ignored)."""
        red = _require_reduced(problem)
        w = problem.weights
        return cls(
            "closed-form",
            problem,
            lambda lam: delta0_eval(red, w, lam),
            reduced=red,
            derivative=lambda lam: delta0_derivative(red, w, lam),
        )

    @classmethod
    def propagator(cls, problem: DiracProblem) -> "DeterminantHandle":
        """Propagator determinant; 2x2 problems use their reduced rows."""
        if problem.n == 2:
            red = _require_reduced(problem)
            reduced_problem = problem.with_boundary(red)
            return cls(
                "propagator",
                problem,
                lambda lam: delta_via_propagator(reduced_problem, lam),
                reduced=red,
                derivative=lambda lam: delta_derivative_via_propagator(reduced_problem, lam),
            )
        return cls("propagator", problem, lambda lam: delta_via_propagator(problem, lam))

    def coarse(self, m: int = 64) -> "DeterminantHandle | None":
        """Propagator handle on a potential resampled to ``m`` intervals.

        Returns ``None`` when the potential is constant or already coarse,
        i.e. when a two-level search would not save work.
        """
        pot = self.problem.potential
        if self.mode != "propagator" or pot.is_constant or pot.m <= m:
            return None
        return DeterminantHandle.propagator(self.problem.with_potential(pot.resampled(m)))

    @classmethod
    def kernel_trace(cls, problem: DiracProblem, n_triangle: int = 128) -> "DeterminantHandle":
        """Δ0 plus the trace integrals ``∫g1 e^{ib1λt} + ∫g2 e^{ib2λt}``."""
        from .kernels import TriangleGrid, kernel_pair, trace_g, delta_via_traces

        red = _require_reduced(problem)
        pair = kernel_pair(problem.potential, problem.weights, TriangleGrid(n_triangle))
        g1, g2 = trace_g(pair.r_plus, pair.r_minus, red)
        w = problem.weights
        return cls(
            "kernel-trace",
            problem,
            lambda lam: delta_via_traces(g1, g2, red, w, lam),
            reduced=red,
        )


def _require_reduced(problem: DiracProblem) -> ReducedBC:
    minors = check_regularity(problem.boundary)
    if not minors.regular:
        raise NonRegularError("boundary conditions are not regular (J14·J32 = 0)")
    return reduce_bc(problem.boundary)


def cluster_roots(roots: np.ndarray, tol: float = ROOT_CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group roots closer than ``tol`` (single linkage); returns (centroid, count)."""
    roots = np.asarray(roots, dtype=complex)
    remaining = list(range(roots.size))
    clusters = []
    while remaining:
        members = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for idx in list(remaining):
                if np.min(np.abs(roots[members] - roots[idx])) < tol:
                    members.append(idx)
                    remaining.remove(idx)
                    grew = True
        clusters.append((complex(np.mean(roots[members])), len(members)))
    return clusters


@dataclass(frozen=True)
class ZeroFamily:
    """Closed-form description of the zeros of Δ0.

    Each progression is ``λ_k = (theta + 2πk - i·ln r)/step`` for integer ``k``
    and carries a multiplicity.

    Attributes
    ----------
    kind : {"bc0", "separated", "rational", "none"}
    progressions : tuple of (theta, log_r, step, multiplicity)
    """

    kind: str
    progressions: tuple = ()

    @property
    def available(self) -> bool:
        return self.kind != "none"

    def max_abs_imag(self) -> float:
        vals = [abs(log_r / step) for _, log_r, step, _ in self.progressions]
        return max(vals, default=0.0)

    def zeros(self, re_min: float, re_max: float, merge_tol: float = 1e-8) -> list[tuple[complex, int]]:
        """All zeros with ``re_min <= Re λ <= re_max``, Re-sorted, coincidences merged."""
        points: list[tuple[complex, int]] = []
        for theta, log_r, step, mult in self.progressions:
            # Re λ = (theta + 2πk)/step; solve for the k range
            lo = (re_min * step - theta) / (2 * math.pi)
            hi = (re_max * step - theta) / (2 * math.pi)
            k_lo, k_hi = sorted((lo, hi))
            for k in range(math.ceil(k_lo - 1e-12), math.floor(k_hi + 1e-12) + 1):
                lam = complex(theta + 2 * math.pi * k, -log_r) / step
                if re_min <= lam.real <= re_max:
                    points.append((lam, mult))
        points.sort(key=lambda p: (p[0].real, p[0].imag))
        merged: list[list] = []
        for lam, mult in points:
            if merged and abs(merged[-1][0] - lam) < merge_tol:
                merged[-1][1] += mult
            else:
                merged.append([lam, mult])
        return [(lam, mult) for lam, mult in merged]


def delta0_zero_family(bc: ReducedBC, weights: Weights) -> ZeroFamily:
    """Closed-form zero progressions of Δ0 when they exist.

    Cases: ``bc = 0`` (two progressions from ``(1 + a e^{ib1λ})(d + e^{ib2λ})``),
    ``a = d = 0`` (``e^{i(b2-b1)λ} = bc``), an exact-rational ratio (roots of
    ``P(z) = z^{n1+n2} + a z^{n2} + d z^{n1} + (ad - bc)`` with ``z = e^{ibλ}``),
    otherwise ``kind = "none"``.
    """
    if not bc.regular:
        return ZeroFamily("none")
    b1, b2 = weights.b1, weights.b2
    if bc.b * bc.c == 0:
        z1 = -1.0 / bc.a  # e^{ib1λ} = -1/a
        z2 = -bc.d  # e^{ib2λ} = -d
        return ZeroFamily(
            "bc0",
            (
                (float(np.angle(z1)), math.log(abs(z1)), b1, 1),
                (float(np.angle(z2)), math.log(abs(z2)), b2, 1),
            ),
        )
    if bc.a == 0 and bc.d == 0:
        z = bc.b * bc.c
        return ZeroFamily("separated", ((float(np.angle(z)), math.log(abs(z)), b2 - b1, 1),))
    if weights.ratio is not None:
        n1, n2 = weights.n1n2
        step = weights.base
        coeffs = rational_polynomial(bc, n1, n2)
        progs = []
        for z, mult in cluster_roots(np.roots(coeffs)):
            progs.append((float(np.angle(z)), math.log(abs(z)), step, mult))
        return ZeroFamily("rational", tuple(progs))
    return ZeroFamily("none")


def rational_polynomial(bc: ReducedBC, n1: int, n2: int) -> np.ndarray:
    """Coefficients (highest degree first) of ``z^{n1+n2} + a z^{n2} + d z^{n1} + (ad-bc)``."""
    deg = n1 + n2
    coeffs = np.zeros(deg + 1, dtype=complex)
    coeffs[0] += 1.0
    coeffs[deg - n2] += bc.a
    coeffs[deg - n1] += bc.d
    coeffs[deg] += bc.det
    return coeffs


def delta0_strip_bound(bc: ReducedBC, weights: Weights) -> float:
    """Height beyond which a single exponential term of Δ0 dominates.

    For ``Im λ > y+`` the term ``(ad-bc)e^{ib1λ}`` exceeds the sum of the
    others and for ``Im λ < -y-`` the term ``e^{ib2λ}`` does, so every zero
    has ``|Im λ| <= max(y+, y-)``.
    """
    if not bc.regular:
        raise NonRegularError("strip bound needs regular boundary conditions")
    b1, b2 = weights.b1, weights.b2
    A, D, J = abs(bc.a), abs(bc.d), abs(bc.det)

    def upper_gap(y):
        return J * math.exp(-b1 * y) - (D + A * math.exp(-(b1 + b2) * y) + math.exp(-b2 * y))

    def lower_gap(y):
        # y >= 0 measures depth below the real axis
        return math.exp(b2 * y) - (D + A * math.exp((b1 + b2) * y) + J * math.exp(b1 * y))

    def first_positive(gap):
        y = 0.0
        step = 0.25
        while gap(y) <= 0:
            y += step
            step *= 1.5
            if y > 1e4:
                raise NonRegularError("could not bound the zero strip")
        lo, hi = max(0.0, y - step / 1.5), y
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if gap(mid) > 0:
                hi = mid
            else:
                lo = mid
        return hi

    return max(first_positive(upper_gap), first_positive(lower_gap))
