"""Problem definitions and boundary-condition algebra.

The boundary value problem studied throughout the package is

    -i B^{-1} y' + Q(x) y = λ y,   C y(0) + D y(1) = 0,   x in [0, 1],

with ``B = diag(b1, b2)``, ``b1 < 0 < b2`` (or a 4x4 diagonal weight for the
beam reduction).  Everything here is an immutable value type or a pure
function on such types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import (
    InvalidBoundaryError,
    InvalidProblemError,
    NotReducibleError,
)

__all__ = [
    "Weights",
    "PotentialGrid",
    "BoundaryPair",
    "ReducedBC",
    "Strip",
    "DiracProblem",
    "Minors",
    "GaugeResult",
    "probe_rational",
    "boundary_preset",
    "check_regularity",
    "reduce_bc",
    "adjoint_problem",
    "gauge_reduce",
]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def probe_rational(value: float, tol: float = 1e-9, max_denominator: int = 64) -> Fraction | None:
    """Continued-fraction probe for a positive ratio.

    Returns the best approximation with denominator at most
    ``max_denominator`` when it matches ``value`` within ``tol`` (relative to
    ``max(1, value)``), otherwise ``None``.  The answer is a diagnostic only:
    floating-point input can never certify rationality.
    """
    candidate = Fraction(value).limit_denominator(max_denominator)
    if abs(float(candidate) - value) <= tol * max(1.0, abs(value)):
        return candidate
    return None


@dataclass(frozen=True)
class Weights:
    """Diagonal weights ``B = diag(b1, b2)`` of a 2x2 Dirac-type system.

    Parameters
    ----------
    b1, b2 : float
        Weights with ``b1 < 0 < b2``.
    ratio : Fraction, optional
        Exact value of ``α = -b1/b2`` supplied by the caller.  Only this tag
        unlocks the rational-ratio branches of the classifier.  Weights with
        ``b1 + b2 == 0`` exactly get the tag ``1`` automatically.
    """

    b1: float
    b2: float
    ratio: Fraction | None = None

    def __post_init__(self):
        b1, b2 = float(self.b1), float(self.b2)
        if not (math.isfinite(b1) and math.isfinite(b2)):
            raise InvalidProblemError("weights must be finite")
        if not b1 < 0.0 < b2:
            raise InvalidProblemError(f"weights must satisfy b1 < 0 < b2, got ({b1}, {b2})")
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        if self.ratio is None and b1 + b2 == 0.0:
            # equal magnitudes are an exact statement, not a float guess
            object.__setattr__(self, "ratio", Fraction(1))
        if self.ratio is not None:
            ratio = Fraction(self.ratio)
            if ratio <= 0:
                raise InvalidProblemError("rational tag must be positive")
            if abs(-b1 / b2 - float(ratio)) > 1e-12 * max(1.0, float(ratio)):
                raise InvalidProblemError(
                    f"rational tag {ratio} inconsistent with b1/b2 = {b1 / b2!r}"
                )
            object.__setattr__(self, "ratio", ratio)

    @property
    def alpha(self) -> float:
        """``α = -b1/b2 > 0``."""
        return -self.b1 / self.b2

    @property
    def a(self) -> tuple[float, float]:
        """Inverse weights ``(1/b1, 1/b2)``."""
        return (1.0 / self.b1, 1.0 / self.b2)

    @property
    def is_dirac(self) -> bool:
        """True when ``b1 + b2 == 0`` exactly."""
        return self.b1 + self.b2 == 0.0

    @property
    def n1n2(self) -> tuple[int, int] | None:
        """Coprime ``(n1, n2)`` with ``b1 = -n1·b``, ``b2 = n2·b`` (tag required)."""
        if self.ratio is None:
            return None
        return (self.ratio.numerator, self.ratio.denominator)

    @property
    def base(self) -> float | None:
        """Common step ``b`` of the rational lattice (tag required)."""
        pair = self.n1n2
        return None if pair is None else self.b2 / pair[1]

    @property
    def spacing(self) -> float:
        """Asymptotic zero spacing ``2π/(b2 - b1)``."""
        return 2.0 * math.pi / (self.b2 - self.b1)

    def probe(self) -> Fraction | None:
        """Continued-fraction guess for ``α`` (diagnostic only)."""
        return probe_rational(self.alpha)


@dataclass(frozen=True)
class PotentialGrid:
    """Matrix potential sampled on the uniform grid ``x_i = i/M``.

    Between nodes the potential is piecewise linear.

    Parameters
    ----------
    samples : ndarray, shape (M + 1, n, n)
        Complex samples ``Q(x_i)``.
    """

    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.ndim != 3 or samples.shape[1] != samples.shape[2]:
            raise InvalidProblemError("potential samples must have shape (M+1, n, n)")
        if samples.shape[0] < 3:
            raise InvalidProblemError("potential grid needs M >= 2")
        if not np.all(np.isfinite(samples)):
            raise InvalidProblemError("potential samples must be finite")
        object.__setattr__(self, "samples", _frozen(samples))

    @classmethod
    def zero(cls, m: int = 64, n: int = 2) -> "PotentialGrid":
        return cls(np.zeros((m + 1, n, n), dtype=complex))

    @classmethod
    def constant(cls, matrix, m: int = 64) -> "PotentialGrid":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(np.broadcast_to(matrix, (m + 1,) + matrix.shape).copy())

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], m: int, n: int = 2) -> "PotentialGrid":
        """Sample ``func`` (vectorised, returning shape (len(x), n, n))."""
        x = np.linspace(0.0, 1.0, m + 1)
        values = np.asarray(func(x), dtype=complex)
        if values.shape != (m + 1, n, n):
            raise InvalidProblemError(f"potential function returned shape {values.shape}")
        return cls(values)

    @classmethod
    def from_entries(cls, q12, q21, q11=None, q22=None, m: int | None = None) -> "PotentialGrid":
        """Build a 2x2 grid from per-entry samples or scalars.

        Scalars are broadcast to ``m + 1`` nodes; arrays fix ``m`` themselves.
        """
        entries = [q11, q12, q21, q22]
        lengths = {np.size(e) for e in entries if e is not None and np.ndim(e) > 0}
        if len(lengths) > 1:
            raise InvalidProblemError("potential entries have inconsistent lengths")
        count = lengths.pop() if lengths else (m if m is not None else 64) + 1
        samples = np.zeros((count, 2, 2), dtype=complex)
        for value, (j, k) in zip(entries, [(0, 0), (0, 1), (1, 0), (1, 1)]):
            if value is not None:
                samples[:, j, k] = value
        return cls(samples)

    @property
    def m(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.m + 1)

    @property
    def off_diagonal(self) -> bool:
        """True iff every diagonal sample vanishes."""
        diag = np.diagonal(self.samples, axis1=1, axis2=2)
        return bool(np.all(diag == 0))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.samples == 0))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.samples == self.samples[0]))

    def at(self, x) -> np.ndarray:
        """Piecewise-linear interpolation, shape ``x.shape + (n, n)``."""
        x = np.asarray(x, dtype=float)
        pos = np.clip(x, 0.0, 1.0) * self.m
        i = np.minimum(np.floor(pos).astype(int), self.m - 1)
        frac = (pos - i)[..., None, None]
        return (1.0 - frac) * self.samples[i] + frac * self.samples[i + 1]

    def entry(self, j: int, k: int, x) -> np.ndarray:
        """Interpolated entry ``Q_jk(x)`` with zero-based indices."""
        return np.interp(np.asarray(x, dtype=float), self.nodes, self.samples[:, j, k].real) + 1j * np.interp(
            np.asarray(x, dtype=float), self.nodes, self.samples[:, j, k].imag
        )

    def midpoints(self) -> np.ndarray:
        """Samples at ``x_{i+1/2}``, shape (M, n, n)."""
        return 0.5 * (self.samples[1:] + self.samples[:-1])

    def l1_norm(self) -> float:
        """Trapezoid approximation of ``∫ max_jk |Q_jk(x)| dx``."""
        mags = np.abs(self.samples).reshape(self.m + 1, -1).max(axis=1)
        return float(np.trapezoid(mags, self.nodes))

    def scaled(self, factor: complex) -> "PotentialGrid":
        return PotentialGrid(self.samples * factor)

    def resampled(self, m: int) -> "PotentialGrid":
        """Linear interpolation onto a grid with ``m`` intervals."""
        return PotentialGrid(self.at(np.linspace(0.0, 1.0, m + 1)))

    def conj_transpose(self) -> "PotentialGrid":
        return PotentialGrid(np.conj(np.swapaxes(self.samples, 1, 2)))


@dataclass(frozen=True)
class BoundaryPair:
    """Boundary matrices of ``C y(0) + D y(1) = 0``."""

    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=complex)
        D = np.asarray(self.D, dtype=complex)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape != D.shape:
            raise InvalidBoundaryError("C and D must be square matrices of equal size")
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(D))):
            raise InvalidBoundaryError("boundary matrices must be finite")
        block = np.hstack([C, D])
        if np.linalg.matrix_rank(block) < C.shape[0]:
            raise InvalidBoundaryError("the block (C D) is rank deficient")
        object.__setattr__(self, "C", _frozen(C))
        object.__setattr__(self, "D", _frozen(D))

    @classmethod
    def from_rows(cls, row1, row2) -> "BoundaryPair":
        """Build from two length-4 rows ``(a_j1, a_j2, a_j3, a_j4)``."""
        rows = np.array([row1, row2], dtype=complex)
        return cls(rows[:, :2], rows[:, 2:])

    @property
    def block(self) -> np.ndarray:
        return np.hstack([self.C, self.D])

    def minor(self, j: int, k: int) -> complex:
        """``J_jk`` with one-based column indices of the block ``(C D)``."""
        block = self.block
        return complex(block[0, j - 1] * block[1, k - 1] - block[0, k - 1] * block[1, j - 1])


@dataclass(frozen=True)
class ReducedBC:
    """Normalised boundary conditions (``J14 = 1``).

    Rows: ``y1(0) + b y2(0) + a y1(1) = 0`` and ``d y2(0) + c y1(1) + y2(1) = 0``.

    Attributes
    ----------
    scale : complex
        ``det(A14^{-1}) = 1/J14`` of the reduction that produced the rows, so
        the full determinant equals the reduced one divided by ``scale``.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    scale: complex = 1.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "scale"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise InvalidBoundaryError(f"reduced coefficient {name} is not finite")
            object.__setattr__(self, name, value)

    @property
    def det(self) -> complex:
        """``J32 = ad - bc``."""
        return self.a * self.d - self.b * self.c

    @property
    def regular(self) -> bool:
        return self.det != 0

    def boundary_pair(self) -> BoundaryPair:
        return BoundaryPair(
            np.array([[1.0, self.b], [0.0, self.d]], dtype=complex),
            np.array([[self.a, 0.0], [self.c, 1.0]], dtype=complex),
        )

    def conj(self) -> "ReducedBC":
        return ReducedBC(np.conj(self.a), np.conj(self.b), np.conj(self.c), np.conj(self.d), np.conj(self.scale))

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class Strip:
    """Rectangle ``[re_min, re_max] x [-h, h]`` of the spectral plane."""

    h: float
    re_min: float
    re_max: float

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidProblemError("strip half-height must be positive")
        if not self.re_min < self.re_max:
            raise InvalidProblemError("strip window needs re_min < re_max")


@dataclass(frozen=True)
class DiracProblem:
    """Boundary value problem ``-iB^{-1}y' + Qy = λy``, ``Cy(0) + Dy(1) = 0``.

    Parameters
    ----------
    b : tuple of float
        Diagonal of ``B`` (length 2 or 4).
    potential : PotentialGrid
    boundary : BoundaryPair
    ratio : Fraction, optional
        Exact ``-b1/b2`` tag, meaningful for the 2x2 case only.
    """

    b: tuple
    potential: PotentialGrid
    boundary: BoundaryPair
    ratio: Fraction | None = None

    def __post_init__(self):
        b = tuple(float(v) for v in self.b)
        if len(b) not in (2, 4):
            raise InvalidProblemError("only 2x2 and 4x4 systems are supported")
        if not all(math.isfinite(v) and v != 0.0 for v in b):
            raise InvalidProblemError("weights must be finite and nonzero")
        if self.potential.n != len(b) or self.boundary.C.shape[0] != len(b):
            raise InvalidProblemError("weights, potential and boundary sizes differ")
        object.__setattr__(self, "b", b)
        if len(b) == 2:
            Weights(b[0], b[1], self.ratio)  # validates ordering and tag

    @classmethod
    def from_weights(cls, weights: Weights, potential: PotentialGrid, boundary) -> "DiracProblem":
        """Build a 2x2 problem; ``boundary`` may be a BoundaryPair or ReducedBC."""
        if isinstance(boundary, ReducedBC):
            boundary = boundary.boundary_pair()
        return cls((weights.b1, weights.b2), potential, boundary, weights.ratio)

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def weights(self) -> Weights:
        if self.n != 2:
            raise InvalidProblemError("weights are defined for 2x2 problems only")
        return Weights(self.b[0], self.b[1], self.ratio)

    @property
    def B(self) -> np.ndarray:
        return np.diag(np.asarray(self.b, dtype=float))

    def with_potential(self, potential: PotentialGrid) -> "DiracProblem":
        return DiracProblem(self.b, potential, self.boundary, self.ratio)

    def with_boundary(self, boundary) -> "DiracProblem":
        if isinstance(boundary, ReducedBC):
            boundary = boundary.boundary_pair()
        return DiracProblem(self.b, self.potential, boundary, self.ratio)


def boundary_preset(name: str, b: complex = 1.0, c: complex = -2.0) -> BoundaryPair:
    """Named boundary conditions.

    ``periodic`` is ``y(0) = y(1)``, ``antiperiodic`` is ``y(0) = -y(1)``, and
    ``separated`` gives the reduced rows with ``a = d = 0`` and the supplied
    ``b``, ``c``.
    """
    if name == "periodic":
        return BoundaryPair.from_rows((1, 0, -1, 0), (0, 1, 0, -1))
    if name == "antiperiodic":
        return BoundaryPair.from_rows((1, 0, 1, 0), (0, 1, 0, 1))
    if name == "separated":
        return ReducedBC(0.0, b, c, 0.0).boundary_pair()
    raise InvalidProblemError(f"unknown boundary preset {name!r}")


@dataclass(frozen=True)
class Minors:
    """All 2x2 minors of ``(C D)`` plus the regularity decision."""

    J12: complex
    J13: complex
    J14: complex
    J32: complex
    J34: complex
    J42: complex
    regular: bool
    det_plus_minus: complex
    det_minus_plus: complex


def check_regularity(bc: BoundaryPair) -> Minors:
    """Evaluate the minors of a 2x2 boundary pair and decide regularity.

    Regularity is ``J14·J32 != 0``.  The two projected determinants
    ``det(C P+ + D P-)`` and ``det(C P- + D P+)`` (``P±`` the spectral
    projections of ``B``) are evaluated independently and must reproduce
    ``J32`` and ``J14``.
    """
    if bc.C.shape != (2, 2):
        raise InvalidBoundaryError("check_regularity expects 2x2 boundary matrices")
    minors = {f"J{j}{k}": bc.minor(j, k) for j, k in [(1, 2), (1, 3), (1, 4), (3, 2), (3, 4), (4, 2)]}
    p_plus = np.diag([0.0, 1.0])
    p_minus = np.diag([1.0, 0.0])
    det_pm = complex(np.linalg.det(bc.C @ p_plus + bc.D @ p_minus))
    det_mp = complex(np.linalg.det(bc.C @ p_minus + bc.D @ p_plus))
    scale = max(1.0, float(np.abs(bc.block).max())) ** 2
    if abs(det_pm - minors["J32"]) > 1e-12 * scale or abs(det_mp - minors["J14"]) > 1e-12 * scale:
        raise AssertionError("projected determinants disagree with the minors")
    regular = minors["J14"] * minors["J32"] != 0
    return Minors(**minors, regular=bool(regular), det_plus_minus=det_pm, det_minus_plus=det_mp)


def reduce_bc(bc: BoundaryPair) -> ReducedBC:
    """Multiply the rows by ``A14^{-1}`` so that ``J14 = 1``.

    Raises
    ------
    NotReducibleError
        If ``J14 = 0``.
    """
    a14 = np.array([[bc.C[0, 0], bc.D[0, 1]], [bc.C[1, 0], bc.D[1, 1]]])
    j14 = bc.minor(1, 4)
    if j14 == 0:
        raise NotReducibleError("J14 = 0: boundary conditions are not regular")
    rows = np.linalg.solve(a14, bc.block)
    # rows = [[1, b, a, 0], [0, d, c, 1]] up to rounding
    return ReducedBC(a=rows[0, 2], b=rows[0, 1], c=rows[1, 2], d=rows[1, 1], scale=1.0 / j14)


def _reduced_of(problem: DiracProblem) -> ReducedBC:
    return reduce_bc(problem.boundary)


def adjoint_problem(problem: DiracProblem) -> DiracProblem:
    """Adjoint boundary value problem of a 2x2 problem.

    The potential becomes ``Q^*`` (conjugate transpose) and, with
    ``k = -b2/b1``, the boundary rows become

        k·conj(b)·y1(0) + y2(0) + conj(d)·y2(1) = 0,
        conj(a)·y1(0) + y1(1) + conj(c)/k·y2(1) = 0,

    where ``(a, b, c, d)`` is the reduced form of the input rows.
    """
    red = _reduced_of(problem)
    k = -problem.b[1] / problem.b[0]
    a, b, c, d = (np.conj(v) for v in red.as_tuple())
    C = np.array([[k * b, 1.0], [a, 0.0]], dtype=complex)
    D = np.array([[0.0, d], [1.0, c / k]], dtype=complex)
    return DiracProblem(problem.b, problem.potential.conj_transpose(), BoundaryPair(C, D), problem.ratio)


@dataclass(frozen=True)
class GaugeResult:
    """Output of :func:`gauge_reduce`."""

    problem: DiracProblem
    w1: complex
    w2: complex
    k: np.ndarray = field(repr=False)


def gauge_reduce(problem: DiracProblem) -> GaugeResult:
    """Remove the diagonal of a 2x2 potential by a diagonal similarity.

    With ``w_j(x) = exp(-i b_j ∫_0^x Q_jj)`` and ``k = w2/w1`` the returned
    problem has potential ``codiag(k Q12, Q21/k)`` and ``D`` with its columns
    scaled by ``w1(1)`` and ``w2(1)``.  Both problems share their spectrum.
    """
    pot = problem.potential
    x = pot.nodes
    s = pot.samples
    w = []
    for j in range(2):
        integral = cumulative_trapezoid(s[:, j, j], x, initial=0.0)
        w.append(np.exp(-1j * problem.b[j] * integral))
    k = w[1] / w[0]
    new = np.zeros_like(s)
    new[:, 0, 1] = k * s[:, 0, 1]
    new[:, 1, 0] = s[:, 1, 0] / k
    D = problem.boundary.D @ np.diag([w[0][-1], w[1][-1]])
    reduced = DiracProblem(problem.b, PotentialGrid(new), BoundaryPair(problem.boundary.C, D), problem.ratio)
    return GaugeResult(reduced, complex(w[0][-1]), complex(w[1][-1]), _frozen(k))
