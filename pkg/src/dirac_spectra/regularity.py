"""Regular and strictly regular boundary conditions.

Boundary rows are taken in reduced form ``(a, b, c, d)``, so that

    Δ0(λ) = d + a e^{i(b1+b2)λ} + (ad - bc) e^{ib1λ} + e^{ib2λ}.

Strict regularity means that the zeros of ``Δ0`` are eventually separated.
:func:`classify_strict` walks through the known algebraic criteria and
reports which one decided; :func:`numerical_separation` is an independent
windowed check that only annotates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .core import BoundaryPair, ReducedBC, Strip, Weights, check_regularity, reduce_bc
from .determinant import (
    DeterminantHandle,
    cluster_roots,
    delta0_eval,
    delta0_strip_bound,
    rational_polynomial,
)
from .errors import InvalidProblemError, NotFoundError

__all__ = [
    "RegularityVerdict",
    "classify_strict",
    "critical_d",
    "a0_real_zeros",
    "SeparationReport",
    "numerical_separation",
    "weighted_boundary",
    "weighted_polynomial",
    "find_strictifying_weight",
]

ZERO_TOL = 1e-12
SIMPLE_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class RegularityVerdict:
    """Outcome of :func:`classify_strict`.

    Attributes
    ----------
    regular : bool
    strict : {"yes", "no", "undetermined"}
    branch : str
        Criterion that decided: ``not-regular``, ``separated``,
        ``dirac-discriminant``, ``rational-poly``, ``bc0-i``, ``bc0-ii``,
        ``bc0-iii``, ``a0-irrational``, ``a0-rational`` or ``numerical``.
    witnesses : dict
        Quantities evaluated by the criterion.
    numerical_hint : str, optional
        Annotation from :func:`numerical_separation`.
    """

    regular: bool
    strict: str
    branch: str
    witnesses: dict = field(default_factory=dict)
    numerical_hint: str | None = None

    def __post_init__(self):
        if self.strict not in ("yes", "no", "undetermined"):
            raise ValueError(f"bad strict value {self.strict!r}")
        if self.strict == "yes" and not self.regular:
            raise ValueError("strictly regular implies regular")
        if not self.witnesses:
            raise ValueError("a verdict needs at least one witness")

    def with_hint(self, hint: str | None) -> "RegularityVerdict":
        return RegularityVerdict(self.regular, self.strict, self.branch, dict(self.witnesses), hint)

    def to_dict(self) -> dict:
        return {
            "regular": self.regular,
            "strict": self.strict,
            "branch": self.branch,
            "witnesses": {k: _jsonable(v) for k, v in sorted(self.witnesses.items())},
            "numerical_hint": self.numerical_hint,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _jsonable(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag == 0:
            return value.real
        return [value.real, value.imag]
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


def _is_zero(value: complex, scale: float = 1.0) -> bool:
    return abs(value) <= ZERO_TOL * max(1.0, scale)


def _is_real(value: complex) -> bool:
    value = complex(value)
    return abs(value.imag) <= ZERO_TOL * max(1.0, abs(value.real))


def critical_d(bc_product: float, alpha: float) -> float:
    """``d* = -(α+1)(|bc| α^{-α})^{1/(α+1)}``."""
    return -(alpha + 1.0) * (abs(bc_product) * alpha ** (-alpha)) ** (1.0 / (alpha + 1.0))


def _arg(z: complex) -> float:
    """Argument in ``(-π, π]``."""
    angle = math.atan2(complex(z).imag, complex(z).real)
    return math.pi if angle == -math.pi else angle


def classify_strict(bc: ReducedBC, weights: Weights) -> RegularityVerdict:
    """Decide strict regularity of reduced boundary rows.

    The criteria are tried in this order: non-regular rows; separated rows
    (``a = d = 0``); ``bc = 0`` with ``b1 ln|d| + b2 ln|a| != 0``; the Dirac
    discriminant ``(a - d)^2 + 4bc`` when ``b1 + b2 = 0``; the exact-rational
    branches (``bc = 0`` lattice test, ``a = 0`` closed criterion, multiple
    roots of the lattice polynomial); ``bc = 0`` with an untagged ratio; ``a
    = 0`` with real data and an untagged ratio; otherwise undetermined.

    An untagged ratio is treated as irrational.  The continued-fraction
    probe is attached as a witness but never changes the branch.
    """
    a, b, c, d = (complex(v) for v in bc.as_tuple())
    bcp = b * c
    det = bc.det
    scale = max(abs(a * d), abs(bcp), 1.0)
    probe = weights.probe() if weights.ratio is None else None
    base_witness = {"det": det}
    if probe is not None:
        base_witness["probe_ratio"] = probe

    if _is_zero(det, scale):
        return RegularityVerdict(False, "no", "not-regular", base_witness)

    if a == 0 and d == 0:
        return RegularityVerdict(True, "yes", "separated", {**base_witness, "bc": bcp})

    b1, b2 = weights.b1, weights.b2
    if bcp == 0:
        crit = b1 * math.log(abs(d)) + b2 * math.log(abs(a))
        crit_scale = abs(b1 * math.log(abs(d))) + abs(b2 * math.log(abs(a)))
        if not _is_zero(crit, crit_scale):
            return RegularityVerdict(True, "yes", "bc0-i", {**base_witness, "crit": crit})
    else:
        crit = None

    if weights.is_dirac:
        disc = (a - d) ** 2 + 4 * bcp
        scale_disc = abs(a - d) ** 2 + 4 * abs(bcp)
        strict = "no" if _is_zero(disc, scale_disc) else "yes"
        return RegularityVerdict(True, strict, "dirac-discriminant", {**base_witness, "disc": disc})

    if weights.ratio is not None:
        n1, n2 = weights.n1n2
        if bcp == 0:
            value = (b1 * _arg(-d) + b2 * _arg(-a)) / (2 * math.pi * weights.base)
            integral = abs(value - round(value)) <= 1e-9
            return RegularityVerdict(
                True,
                "no" if integral else "yes",
                "bc0-iii",
                {**base_witness, "crit": crit, "lattice_value": value, "gcd": weights.base},
            )
        if a == 0:
            total = n1 + n2
            lhs = n1**n1 * n2**n2 * (-d) ** total
            rhs = total**total * (-bcp) ** n2
            equal = _is_zero(lhs - rhs, max(abs(lhs), abs(rhs)))
            return RegularityVerdict(
                True, "no" if equal else "yes", "a0-rational", {**base_witness, "lhs": lhs, "rhs": rhs}
            )
        roots = np.roots(rational_polynomial(bc, n1, n2))
        clusters = cluster_roots(roots)
        max_mult = max(m for _, m in clusters)
        return RegularityVerdict(
            True,
            "yes" if max_mult == 1 else "no",
            "rational-poly",
            {**base_witness, "degree": n1 + n2, "max_multiplicity": max_mult},
        )

    if bcp == 0:
        return RegularityVerdict(True, "no", "bc0-ii", {**base_witness, "crit": crit})

    if a == 0 and _is_real(bcp) and _is_real(d):
        alpha = weights.alpha
        d_star = critical_d(bcp.real, alpha)
        hit = abs(abs(d.real) - abs(d_star)) <= ZERO_TOL * abs(d_star)
        return RegularityVerdict(
            True, "no" if hit else "yes", "a0-irrational", {**base_witness, "d_star": d_star, "d": d.real}
        )

    return RegularityVerdict(True, "undetermined", "numerical", base_witness)


# ----- a = 0, real data: zeros from the real reduction -------------------------


def _a0_profile(bc_product: float, alpha: float):
    """``ρ(x)`` and ``f(x)`` of the real reduction (``b2 λ = πx + iy``)."""

    def rho(x):
        return -bc_product * np.sin(alpha * np.pi * x) / np.sin(np.pi * x)

    def f(x):
        r = rho(x)
        return r ** (1.0 / (alpha + 1.0)) * np.sin((alpha + 1.0) * np.pi * x) / np.sin(alpha * np.pi * x)

    return rho, f


def a0_real_zeros(bc: ReducedBC, weights: Weights, re_min: float, re_max: float, samples: int = 48) -> list[complex]:
    """Zeros of ``Δ0 = d - bc e^{ib1λ} + e^{ib2λ}`` for real ``bc`` and ``d``.

    Writing ``b2 λ = πx + iy`` the equation splits into

        e^{(α+1)y} = 1/ρ(x),   ρ(x) = -bc sin(απx)/sin(πx) > 0,
        f(x) = ρ(x)^{1/(α+1)} sin((α+1)πx)/sin(απx) = -d.

    The admissible set ``ρ > 0`` is a union of intervals bounded by the
    integers and the points ``m/α``; on each one ``f(x) + d`` is bracketed on a
    clustered sample and refined with Brent's method.

    Returns
    -------
    list of complex
        Zeros with ``re_min <= Re λ <= re_max``, Re-sorted.
    """
    a, b, c, d = bc.as_tuple()
    bcp = complex(b * c)
    if a != 0 or not (_is_real(bcp) and _is_real(d)) or bcp == 0 or d == 0:
        raise InvalidProblemError("a0_real_zeros needs a = 0 and real nonzero bc, d")
    bcp, d = bcp.real, complex(d).real
    alpha = weights.alpha
    b2 = weights.b2
    rho, f = _a0_profile(bcp, alpha)
    lo_x, hi_x = b2 * re_min / math.pi, b2 * re_max / math.pi
    # breakpoints: integers and multiples of 1/alpha
    ints = np.arange(math.floor(lo_x) - 1, math.ceil(hi_x) + 2, dtype=float)
    mult = np.arange(math.floor(lo_x * alpha) - 1, math.ceil(hi_x * alpha) + 2, dtype=float) / alpha
    cuts = np.unique(np.concatenate([ints, mult]))
    s = 0.5 - 0.5 * np.cos(np.pi * np.arange(1, samples) / samples)
    s = np.unique(np.concatenate([[1e-12, 1e-9, 1e-6, 1e-4], s, 1 - np.array([1e-12, 1e-9, 1e-6, 1e-4])]))
    roots = []

    def g(x):
        return f(x) + d

    for left, right in zip(cuts[:-1], cuts[1:]):
        if right <= lo_x or left >= hi_x:
            continue
        mid = 0.5 * (left + right)
        if not rho(mid) > 0:
            continue
        xs = left + (right - left) * s
        with np.errstate(all="ignore"):
            vals = g(xs)
        ok = np.isfinite(vals)
        xs, vals = xs[ok], vals[ok]
        for k in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            roots.append(brentq(g, xs[k], xs[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    out = []
    for x in sorted(roots):
        y = -math.log(float(rho(x))) / (alpha + 1.0)
        lam = complex(math.pi * x, y) / b2
        if re_min <= lam.real <= re_max:
            out.append(lam)
    # on Re λ = 0 both sines vanish and only d - bc e^{αy} + e^{-y} = 0 remains
    if re_min <= 0.0 <= re_max:
        out.extend(complex(0.0, y) / b2 for y in _imaginary_axis_roots(bcp, d, alpha))
    out.sort(key=lambda z: (z.real, z.imag))
    return out


def _imaginary_axis_roots(bcp: float, d: float, alpha: float) -> list[float]:
    """Real roots ``y`` of ``d - bc e^{αy} + e^{-y} = 0``."""

    def h(y):
        return d - bcp * math.exp(alpha * y) + math.exp(-y)

    def bracket(y0, direction):
        step = 1.0
        y1 = y0 + direction * step
        while h(y0) * h(y1) > 0:
            step *= 2.0
            y1 = y0 + direction * step
            if step > 512.0:
                return None
        return brentq(h, min(y0, y1), max(y0, y1), xtol=1e-15)

    if bcp > 0:
        # h decreases strictly from +inf to -inf
        root = bracket(0.0, 1.0 if h(0.0) > 0 else -1.0)
        return [] if root is None else [root]
    # bc < 0: h is convex with its minimum at y0
    y0 = -math.log(alpha * abs(bcp)) / (alpha + 1.0)
    h0 = h(y0)
    if abs(h0) <= 1e-14 * max(1.0, abs(d)):
        return [y0, y0]
    if h0 > 0:
        return []
    return [r for r in (bracket(y0, -1.0), bracket(y0, 1.0)) if r is not None]


# ----- windowed separation diagnostic ------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    """Minimum gaps of the zero set over growing windows.

    Attributes
    ----------
    windows : tuple of float
        Half-widths ``T``.
    min_gaps : tuple of float
        Smallest distance between zeros with ``T/2 < |Re λ| <= T`` (zero when
        a multiple zero lies there).
    trend : str
        ``flat``, ``decreasing`` or ``mixed``.
    hint : str
        ``separated``, ``collapsing`` or ``inconclusive``.
    """

    windows: tuple
    min_gaps: tuple
    trend: str
    hint: str

    def to_dict(self) -> dict:
        return {
            "windows": list(self.windows),
            "min_gaps": list(self.min_gaps),
            "trend": self.trend,
            "hint": self.hint,
        }


def _outer_min_gap(points: list[tuple[complex, int]], T: float) -> float:
    outer = [(z, m) for z, m in points if abs(z.real) > T / 2]
    if any(m > 1 for _, m in outer):
        return 0.0
    best = math.inf
    # the two halves are far apart, so gaps are measured within each one
    for side in (1.0, -1.0):
        zs = np.array([z for z, _ in outer if side * z.real > 0])
        if zs.size < 2:
            continue
        zs = zs[np.argsort(zs.real)]
        # sorted by Re, a nearest neighbour lies within the next few entries
        for shift in range(1, min(6, zs.size)):
            best = min(best, float(np.min(np.abs(zs[shift:] - zs[:-shift]))))
    return best


def numerical_separation(
    target,
    weights: Weights | None = None,
    T0: float = 25.0,
    levels: int = 4,
    strip_h: float | None = None,
    zero_source: Callable[[float], list] | None = None,
) -> SeparationReport:
    """Track the minimal outer-half gap of the zeros over ``T0·2^k``.

    Parameters
    ----------
    target : ReducedBC or DeterminantHandle
        Reduced rows (Δ0 is searched) or any determinant handle.
    weights : Weights
        Needed when ``target`` is a :class:`ReducedBC`.
    T0, levels : float, int
        Window half-widths ``T0, 2T0, ...`` (``levels <= 4``).
    strip_h : float, optional
        Strip half-height; defaults to the dominance bound of Δ0 plus one.
    zero_source : callable, optional
        ``T -> [(λ, multiplicity), ...]`` replacing the strip search (used by
        tests with closed-form zero lists).
    """
    from .spectra import find_zeros_strip

    if levels < 1 or levels > 4:
        raise ValueError("levels must be between 1 and 4")
    if zero_source is None:
        if isinstance(target, ReducedBC):
            if weights is None:
                raise ValueError("weights are required with reduced rows")
            red = target
            handle = DeterminantHandle.closed_form(_problem_for(red, weights))
        else:
            handle = target
            red = handle.reduced
            weights = handle.problem.weights
        if strip_h is None:
            strip_h = (delta0_strip_bound(red, weights) if red is not None else 5.0) + 1.0

        def zero_source(T):
            recs = find_zeros_strip(handle, Strip(strip_h, -T, T))
            return [(r.lam, r.multiplicity) for r in recs]

    windows = tuple(T0 * 2**k for k in range(levels))
    gaps = tuple(_outer_min_gap(zero_source(T), T) for T in windows)
    finite = [g for g in gaps if math.isfinite(g)]
    if len(finite) < 2:
        return SeparationReport(windows, gaps, "mixed", "inconclusive")
    diffs = np.diff(finite)
    if np.all(diffs < 0):
        trend = "decreasing"
    elif np.all(np.abs(diffs) <= 0.05 * max(finite)):
        trend = "flat"
    else:
        trend = "mixed"
    if finite[-1] <= 1e-6 or (trend == "decreasing" and finite[-1] < 0.5 * finite[0]):
        hint = "collapsing"
    elif finite[-1] >= 0.5 * finite[0] and min(finite) > 1e-3:
        hint = "separated"
    else:
        hint = "inconclusive"
    return SeparationReport(windows, gaps, trend, hint)


def _problem_for(red: ReducedBC, weights: Weights):
    from .core import DiracProblem, PotentialGrid

    return DiracProblem.from_weights(weights, PotentialGrid.zero(2), red)


# ----- strictifying weight ------------------------------------------------------


def weighted_boundary(bc: BoundaryPair, w: complex) -> BoundaryPair:
    """Boundary rows with the first column of ``D`` multiplied by ``w``."""
    D = np.array(bc.D, dtype=complex)
    D[:, 0] *= w
    return BoundaryPair(bc.C, D)


def weighted_polynomial(bc: BoundaryPair, weights: Weights, w: complex) -> np.ndarray:
    """``P_w(z) = z^{n1+n2} + J12 z^{n1} + w J34 z^{n2} + w J32`` with ``J14 = 1``."""
    if weights.ratio is None:
        raise InvalidProblemError("the weighted polynomial needs an exact-rational ratio tag")
    n1, n2 = weights.n1n2
    m = check_regularity(bc)
    total = n1 + n2
    coeffs = np.zeros(total + 1, dtype=complex)
    coeffs[0] += 1.0
    coeffs[total - n1] += m.J12 / m.J14
    coeffs[total - n2] += w * m.J34 / m.J14
    coeffs[total] += w * m.J32 / m.J14
    return coeffs


def _candidates(count: int = 64) -> list[complex]:
    head = [1.5, 2.0, 3.0, 1 + 1j, 1 - 1j, 0.5, 2 + 1j, -1.5]
    out = list(head)
    k = 0
    while len(out) < count:
        k += 1
        radius = 1.0 + 0.37 * k
        out.append(radius * complex(math.cos(0.9 * k), math.sin(0.9 * k)))
    return out[:count]


def find_strictifying_weight(bc: BoundaryPair, weights: Weights) -> complex:
    """First candidate ``w`` for which ``P_w`` has only simple roots.

    Raises
    ------
    NotFoundError
        When all 64 candidates leave a root pair closer than ``1e-6``.
    """
    m = check_regularity(bc)
    if not m.regular:
        raise InvalidProblemError("strictifying weights need regular boundary conditions")
    reduce_bc(bc)  # raises for J14 = 0
    tried = []
    for w in _candidates():
        roots = np.roots(weighted_polynomial(bc, weights, w))
        if roots.size < 2:
            return w
        dist = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(dist, np.inf)
        gap = float(dist.min())
        if gap > SIMPLE_ROOT_TOL:
            return w
        tried.append((w, gap))
    raise NotFoundError(f"no strictifying weight among {len(tried)} candidates; root gaps {tried[:4]}")
