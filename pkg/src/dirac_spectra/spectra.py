"""Zero localisation for analytic determinants in a horizontal strip.

Counting uses the argument principle ``(1/2πi)∮ f'/f dz`` over rectangle
boundaries, integrated by adaptive composite Gauss-Legendre rules.  Boxes
holding a few zeros are resolved with contour moments (the zeros are the
roots of a small polynomial built by Newton's identities) and simple zeros
are polished by Newton's method.  Clusters are shrunk around their centroid
until the contour values approach round-off; a cluster that survives is one
multiple zero.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Strip
from .errors import BoundaryZeroError, LocalizationError, PairingError

__all__ = [
    "EigenvalueRecord",
    "ZeroFinder",
    "count_zeros_rect",
    "find_zeros_strip",
    "pair_with_unperturbed",
    "PairingSummary",
    "group_parentheses",
    "assign_indices",
    "worker_count",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS

NUDGE_EPS = 1e-4
MAX_NUDGES = 8
WINDING_RESIDUAL = 1e-3
PANEL_TOL = 1e-10
MAX_DEPTH = 30
MAX_PANELS = 4096
NEAR_ZERO = 1e-9
NOISE_FLOOR = 1e-11
MAX_DIRECT = 4


@dataclass(frozen=True)
class EigenvalueRecord:
    """A located zero.

    Attributes
    ----------
    lam : complex
    multiplicity : int
    index : int
        Position in the Re-sorted list, shifted so that the first zero with
        ``Re λ >= 0`` has index 0.
    lam0 : complex, optional
        Paired unperturbed zero.
    gap : float, optional
        ``|λ - λ0|``.
    diameter : float
        Size of the last box that certified the multiplicity (0 for zeros
        polished by Newton's method).
    """

    lam: complex
    multiplicity: int = 1
    index: int = 0
    lam0: complex | None = None
    gap: float | None = None
    diameter: float = 0.0

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


def worker_count() -> int:
    """Worker cap from ``DIRAC_SPECTRA_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DIRAC_SPECTRA_THREADS", "1")))
    except ValueError:
        return 1


def _scale(f, z) -> np.ndarray:
    scale = getattr(f, "scale", None)
    if scale is None:
        return np.ones(np.shape(z))
    return np.asarray(scale(z), dtype=float)


class ZeroFinder:
    """Argument-principle machinery bound to one analytic function.

    Parameters
    ----------
    f : callable
        Vectorised analytic function.  Optional attributes ``derivative``
        (exact derivative), ``scale`` (local magnitude) and ``spacing``
        (expected zero spacing) are used when present.
    diff_step : float, optional
        Step of the fourth-order central difference for ``f'``.
    """

    def __init__(self, f: Callable, diff_step: float | None = None):
        self.f = f
        self.derivative = getattr(f, "derivative", None)
        spacing = getattr(f, "spacing", None)
        self.spacing = float(spacing) if spacing else 1.0
        self.diff_step = diff_step if diff_step is not None else 1e-3 * min(1.0, self.spacing)
        self._sides: dict = {}

    # ----- function values -------------------------------------------------
    def values(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(f(z), f'(z))``."""
        z = np.asarray(z, dtype=complex)
        fz = self.f(z)
        if self.derivative is not None:
            return fz, self.derivative(z)
        h = self.diff_step
        stencil = self.f(np.stack([z + 2 * h, z + h, z - h, z - 2 * h]))
        deriv = (-stencil[0] + 8 * stencil[1] - 8 * stencil[2] + stencil[3]) / (12 * h)
        return fz, deriv

    # ----- side integrals ----------------------------------------------------
    def _panel(self, z0: complex, z1: complex, t0: np.ndarray, t1: np.ndarray, floor: float):
        """Nodes, weights and ``f'/f`` samples for panels ``[t0, t1]`` of a segment."""
        t = t0[:, None] + (t1 - t0)[:, None] * _GL_NODES[None, :]
        z = z0 + (z1 - z0) * t
        fz, dfz = self.values(z)
        ratio = np.abs(fz) / _scale(self.f, z)
        if not np.all(np.isfinite(fz)) or np.min(ratio) < floor:
            raise BoundaryZeroError(f"zero within reach of the segment {z0:.6g} -> {z1:.6g}")
        w = (t1 - t0)[:, None] * _GL_WEIGHTS[None, :] * (z1 - z0)
        g = dfz / fz
        # round-off in f relative to its local scale, propagated into each panel integral
        noise = np.sum(np.abs(w * g) * (1e-15 / ratio), axis=1)
        return z, w, g, noise

    def _check_endpoints(self, z0, z1, t0, t1, integrals, floor: float) -> None:
        """Reject segments whose panel integrals disagree with ``log|f|``.

        A zero sitting exactly where panels meet can cancel symmetrically
        between the two neighbours, which the split-panel error estimate
        does not notice.  The endpoint values expose it: ``|f|`` is tiny
        there, or ``Re ∫ f'/f`` misses ``log|f(end)/f(start)|``.
        """
        ts = np.unique(np.concatenate([t0, t1]))
        z = z0 + (z1 - z0) * ts
        fz = self.f(z)
        ratio = np.abs(fz) / _scale(self.f, z)
        if not np.all(np.isfinite(fz)) or np.min(ratio) < floor:
            raise BoundaryZeroError(f"zero on a panel edge of the segment {z0:.6g} -> {z1:.6g}")
        logs = np.log(np.abs(fz))
        drop = logs[np.searchsorted(ts, t1)] - logs[np.searchsorted(ts, t0)]
        if np.max(np.abs(integrals.real - drop)) > WINDING_RESIDUAL:
            raise BoundaryZeroError(f"zero near a panel edge of the segment {z0:.6g} -> {z1:.6g}")

    def side(self, z0: complex, z1: complex, floor: float = NEAR_ZERO):
        """Adaptive quadrature data ``(z, w, g)`` of ``f'/f`` along ``z0 -> z1``.

        Results are cached so segments shared by neighbouring boxes are
        integrated once; traversal in the opposite direction flips weights.
        """
        key = (complex(z0), complex(z1), floor)
        rkey = (complex(z1), complex(z0), floor)
        if key in self._sides:
            return self._sides[key]
        if rkey in self._sides:
            z, w, g = self._sides[rkey]
            return z, -w, g
        length = abs(z1 - z0)
        panels = max(2, math.ceil(length / (0.25 * self.spacing)))
        edges = np.linspace(0.0, 1.0, panels + 1)
        t0, t1 = edges[:-1], edges[1:]
        whole = self._panel(z0, z1, t0, t1, floor)
        keep_z, keep_w, keep_g = [], [], []
        keep_t0, keep_t1, keep_i = [], [], []
        for _ in range(MAX_DEPTH):
            mid = 0.5 * (t0 + t1)
            left = self._panel(z0, z1, t0, mid, floor)
            right = self._panel(z0, z1, mid, t1, floor)
            i_left = np.sum(left[1] * left[2], axis=1)
            i_right = np.sum(right[1] * right[2], axis=1)
            i_whole = np.sum(whole[1] * whole[2], axis=1)
            tol = np.maximum(PANEL_TOL, 100.0 * (left[3] + right[3]))
            ok = np.abs(i_whole - i_left - i_right) < tol
            for part in (left, right):
                keep_z.append(part[0][ok].ravel())
                keep_w.append(part[1][ok].ravel())
                keep_g.append(part[2][ok].ravel())
            keep_t0.extend([t0[ok], mid[ok]])
            keep_t1.extend([mid[ok], t1[ok]])
            keep_i.extend([i_left[ok], i_right[ok]])
            if np.all(ok):
                break
            bad = ~ok
            t0 = np.concatenate([t0[bad], mid[bad]])
            t1 = np.concatenate([mid[bad], t1[bad]])
            whole = tuple(np.concatenate([left[k][bad], right[k][bad]]) for k in range(4))
            if t0.size > MAX_PANELS:
                raise BoundaryZeroError(f"quadrature did not settle on segment {z0:.6g} -> {z1:.6g}")
        else:
            raise BoundaryZeroError(f"quadrature did not settle on segment {z0:.6g} -> {z1:.6g}")
        self._check_endpoints(z0, z1, np.concatenate(keep_t0), np.concatenate(keep_t1), np.concatenate(keep_i), floor)
        data = (np.concatenate(keep_z), np.concatenate(keep_w), np.concatenate(keep_g))
        self._sides[key] = data
        return data

    def contour(self, box: Sequence[float], floor: float = NEAR_ZERO):
        x0, x1, y0, y1 = box
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        parts = [self.side(corners[k], corners[(k + 1) % 4], floor) for k in range(4)]
        return tuple(np.concatenate([p[k] for p in parts]) for k in range(3))

    def moments(self, box, order: int, center: complex, radius: float, floor: float = NEAR_ZERO) -> np.ndarray:
        """``(1/2πi)∮ ((z - c)/r)^k f'/f dz`` for ``k = 0..order``."""
        z, w, g = self.contour(box, floor)
        u = (z - center) / radius
        powers = u[None, :] ** np.arange(order + 1)[:, None]
        return (powers * (w * g)[None, :]).sum(axis=1) / (2j * math.pi)

    def count(self, box, floor: float = NEAR_ZERO) -> int:
        """Winding number of ``f`` around ``box = (x0, x1, y0, y1)``."""
        s0 = self.moments(box, 0, 0.0, 1.0, floor)[0]
        n = round(s0.real)
        if abs(s0 - n) >= WINDING_RESIDUAL:
            raise BoundaryZeroError(f"winding residual {abs(s0 - n):.2e} over box {tuple(box)}")
        return int(n)

    # ----- refinement ----------------------------------------------------------
    def newton(self, z: complex, iterations: int = 30) -> complex:
        for _ in range(iterations):
            fz, dfz = self.values(np.array([z]))
            if dfz[0] == 0:
                break
            step = fz[0] / dfz[0]
            z = z - step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        return complex(z)

    def residual(self, z: complex) -> float:
        z_arr = np.array([z])
        return float(abs(self.f(z_arr)[0]) / _scale(self.f, z_arr)[0])


def _roots_from_moments(s: np.ndarray, n: int) -> np.ndarray:
    """Roots ``u_j`` from power sums ``s_k = Σ u_j^k`` (Newton's identities)."""
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1) ** (i - 1) * e[k - i] * s[i]
        e[k] = acc / k
    coeffs = np.array([(-1) ** k * e[k] for k in range(n + 1)])
    return np.roots(coeffs) if n > 0 else np.array([], dtype=complex)


def _diam(box) -> float:
    return math.hypot(box[1] - box[0], box[3] - box[2])


def _inside(z: complex, box, margin: float = 0.0) -> bool:
    return box[0] - margin <= z.real <= box[1] + margin and box[2] - margin <= z.imag <= box[3] + margin


class _Resolver:
    """Recursive box resolution producing (λ, multiplicity, diameter) triples."""

    def __init__(self, finder: ZeroFinder, width_cap: float):
        self.finder = finder
        self.width_cap = width_cap

    def split(self, box, n: int, depth: int):
        x0, x1, y0, y1 = box
        vertical = (x1 - x0) >= (y1 - y0)
        lo, hi = (x0, x1) if vertical else (y0, y1)
        mid = 0.5 * (lo + hi)
        span = hi - lo
        for k in range(MAX_NUDGES + 1):
            cut = mid + k * NUDGE_EPS * max(1.0, span)
            if vertical:
                first, second = (x0, cut, y0, y1), (cut, x1, y0, y1)
            else:
                first, second = (x0, x1, y0, cut), (x0, x1, cut, y1)
            try:
                n1 = self.finder.count(first)
                n2 = self.finder.count(second)
            except BoundaryZeroError:
                continue
            if n1 + n2 != n:
                raise LocalizationError(f"count not conserved ({n1} + {n2} != {n})", tuple(box))
            return self.resolve(first, n1, depth + 1) + self.resolve(second, n2, depth + 1)
        raise LocalizationError("no admissible cut line after nudging", tuple(box))

    def resolve(self, box, n: int, depth: int = 0):
        if n == 0:
            return []
        if depth > 80 or _diam(box) < 1e-12:
            raise LocalizationError("box stopped shrinking", tuple(box))
        width_ok = (box[1] - box[0]) <= self.width_cap * (1 + 1e-12)
        if n > MAX_DIRECT or not width_ok:
            return self.split(box, n, depth)
        center = complex(0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3]))
        radius = 0.5 * _diam(box)
        s = self.finder.moments(box, n, center, radius)
        roots = center + radius * _roots_from_moments(s, n)
        groups = _group(roots, 1e-3 * radius)
        if len(groups) == 1 and n > 1:
            return self.shrink(box, n, complex(np.mean(roots)), depth)
        if any(len(g) > 1 for g in groups):
            return self.split(box, n, depth)
        found = []
        for r in roots:
            z = self.finder.newton(complex(r))
            if not _inside(z, box, 1e-9 * max(1.0, radius)) or abs(z - r) > 0.1 * radius:
                return self.split(box, n, depth)
            found.append(z)
        for i in range(len(found)):
            for j in range(i):
                if abs(found[i] - found[j]) < 1e-9 * max(1.0, abs(found[i])):
                    return self.split(box, n, depth)
        return [(z, 1, 0.0) for z in found]

    def shrink(self, box, m: int, center: complex, depth: int):
        """Certify a cluster of ``m`` zeros by counting in shrinking squares."""
        half = 0.25 * min(box[1] - box[0], box[3] - box[2])
        best = (center, 2 * math.sqrt(2) * half)
        current = center
        while half > 5e-9:
            square = (current.real - half, current.real + half, current.imag - half, current.imag + half)
            if not (_inside(complex(square[0], square[2]), box) and _inside(complex(square[1], square[3]), box)):
                half *= 0.5
                continue
            try:
                count = self.finder.count(square, floor=NOISE_FLOOR)
                if count != m:
                    # the cluster separates at this scale: resolve it as ordinary boxes
                    return self.split(box, m, depth)
                s = self.finder.moments(square, 1, current, half, floor=NOISE_FLOOR)
            except BoundaryZeroError:
                break
            current = current + half * s[1] / s[0]
            best = (current, 2 * math.sqrt(2) * half)
            half *= 0.1
        return [(best[0], m, best[1])]


def _group(points: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, p in enumerate(points):
        for g in groups:
            if np.min(np.abs(points[g] - p)) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def count_zeros_rect(f, rect: Sequence[float]) -> int:
    """Number of zeros (with multiplicity) of ``f`` inside ``rect = (x0, x1, y0, y1)``."""
    return ZeroFinder(f).count(tuple(float(v) for v in rect))


def _nudged_edges(finder: ZeroFinder, strip: Strip, cuts: list[float]):
    """Move strip and column edges off zeros (deterministic ε, 2ε, ... sequence).

    The outer window edges move outwards, interior cuts move to the right and
    the strip height grows.
    """
    last = len(cuts) - 1
    for kh in range(MAX_NUDGES + 1):
        h = strip.h + kh * NUDGE_EPS
        fixed = []
        for idx, x in enumerate(cuts):
            direction = -1.0 if idx == 0 else 1.0
            for k in range(MAX_NUDGES + 1):
                xk = x + direction * k * NUDGE_EPS
                try:
                    finder.side(complex(xk, -h), complex(xk, h))
                    fixed.append(xk)
                    break
                except BoundaryZeroError:
                    continue
            else:
                raise LocalizationError("column edge touches a zero", (x, x, -h, h))
        try:
            for k in range(last):
                finder.side(complex(fixed[k], -h), complex(fixed[k + 1], -h))
                finder.side(complex(fixed[k + 1], h), complex(fixed[k], h))
        except BoundaryZeroError:
            continue
        return h, fixed
    raise LocalizationError("strip edges touch zeros", (strip.re_min, strip.re_max, -strip.h, strip.h))


def find_zeros_strip(
    f,
    strip: Strip,
    width_cap: float | None = None,
    workers: int | None = None,
    coarse=None,
) -> list[EigenvalueRecord]:
    """All zeros of ``f`` in ``[re_min, re_max] x [-h, h]``, Re-sorted.

    Parameters
    ----------
    f : callable
        Analytic function (see :class:`ZeroFinder` for optional attributes).
    strip : Strip
    width_cap : float, optional
        Maximal box width; defaults to the spacing advertised by ``f``.
    workers : int, optional
        Thread count for independent columns (``DIRAC_SPECTRA_THREADS``).
    coarse : callable, optional
        Cheaper approximation of ``f`` (for instance the same problem on a
        coarser grid).  Zeros are located on ``coarse`` and then polished
        on ``f`` by Newton's method; multiple zeros and zeros that move too
        far are re-resolved on ``f`` inside a small box.
    """
    if coarse is not None:
        return _two_level(f, coarse, strip, width_cap, workers)
    finder = ZeroFinder(f)
    cap = width_cap if width_cap is not None else finder.spacing
    ncol = max(1, math.ceil((strip.re_max - strip.re_min) / cap - 1e-12))
    cuts = list(np.linspace(strip.re_min, strip.re_max, ncol + 1))
    h, cuts = _nudged_edges(finder, strip, cuts)
    # the sides along y = ±h are integrated per column
    columns = [(cuts[k], cuts[k + 1], -h, h) for k in range(ncol)]
    resolver = _Resolver(finder, cap * (1 + 2 * MAX_NUDGES * NUDGE_EPS))

    def work(box):
        return resolver.resolve(box, finder.count(box))

    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, columns))
    else:
        results = [work(box) for box in columns]
    found = [item for chunk in results for item in chunk]
    found.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    records = [EigenvalueRecord(complex(z), int(m), diameter=float(d)) for z, m, d in found]
    return assign_indices(records)


POLISH_RADIUS = 0.05


def _two_level(f, coarse, strip: Strip, width_cap, workers) -> list[EigenvalueRecord]:
    """Locate on ``coarse``, polish on ``f``."""
    rough = find_zeros_strip(coarse, strip, width_cap=width_cap, workers=workers)
    finder = ZeroFinder(f)
    radius = POLISH_RADIUS * finder.spacing
    resolver = _Resolver(finder, math.inf)
    found = []
    for block in group_parentheses(rough, radius):
        # indices refer to the multiplicity-expanded list; map back to records
        members = sorted({_expanded_owner(rough, k) for k in block})
        recs = [rough[k] for k in members]
        if len(recs) == 1 and recs[0].multiplicity == 1:
            z0 = recs[0].lam
            z = finder.newton(z0)
            if abs(z - z0) < 0.5 * radius and finder.residual(z) < 1e-8:
                found.append((z, 1, 0.0))
                continue
        re = [r.lam.real for r in recs]
        im = [r.lam.imag for r in recs]
        box = (min(re) - radius, max(re) + radius, min(im) - radius, max(im) + radius)
        found.extend(resolver.resolve(box, finder.count(box)))
    for i in range(len(found)):
        for j in range(i):
            if abs(found[i][0] - found[j][0]) < 1e-9 * max(1.0, abs(found[i][0])):
                raise LocalizationError("two polished zeros coincide", (found[i][0].real,) * 2 + (found[i][0].imag,) * 2)
    found = [t for t in found if strip.re_min <= t[0].real <= strip.re_max]
    found.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    records = [EigenvalueRecord(complex(z), int(m), diameter=float(d)) for z, m, d in found]
    return assign_indices(records)


def _expanded_owner(records: list[EigenvalueRecord], k: int) -> int:
    """Record owning position ``k`` of the multiplicity-expanded list."""
    for pos, rec in enumerate(records):
        if k < rec.multiplicity:
            return pos
        k -= rec.multiplicity
    raise IndexError(k)


def assign_indices(records: list[EigenvalueRecord]) -> list[EigenvalueRecord]:
    """Index Re-sorted records so the first one with ``Re λ >= 0`` is number 0."""
    records = sorted(records, key=lambda r: (r.lam.real, r.lam.imag))
    zero = next((k for k, r in enumerate(records) if r.lam.real >= -1e-9), len(records))
    return [replace(r, index=k - zero) for k, r in enumerate(records)]


@dataclass(frozen=True)
class PairingSummary:
    """Pairing result with the gap statistics used as the ``o(1)`` proxy."""

    records: list
    outer_max_gap: float
    inner_max_gap: float
    unmatched: int


def pair_with_unperturbed(
    records: list[EigenvalueRecord],
    unperturbed: list[EigenvalueRecord],
    window: tuple[float, float] | None = None,
    edge_allowance: float | None = None,
) -> PairingSummary:
    """Match zeros of Δ with zeros of Δ0 one-to-one (multiplicities expanded).

    The matching minimises the total distance (optimal assignment), which
    reduces to nearest-neighbour matching for well separated sequences.
    Unmatched entries are tolerated only within ``edge_allowance`` of the
    window edges; anything else raises :class:`PairingError`.
    """
    def expand(recs):
        out = []
        for pos, r in enumerate(recs):
            out.extend([(pos, r.lam)] * r.multiplicity)
        return out

    a = expand(records)
    b = expand(unperturbed)
    if not a:
        return PairingSummary(list(records), 0.0, 0.0, len(b))
    lo = min(r.lam.real for r in records + unperturbed) if window is None else window[0]
    hi = max(r.lam.real for r in records + unperturbed) if window is None else window[1]
    allowance = edge_allowance if edge_allowance is not None else 0.25 * (hi - lo)
    cost = np.abs(np.array([z for _, z in a])[:, None] - np.array([z for _, z in b])[None, :]) if b else np.zeros((len(a), 0))
    rows, cols = linear_sum_assignment(cost) if b else (np.array([], int), np.array([], int))
    paired: dict[int, list] = {}
    for r, c in zip(rows, cols):
        paired.setdefault(a[r][0], []).append(b[c][1])
    matched_a = set(rows.tolist())
    matched_b = set(cols.tolist())
    loose = [a[k][1] for k in range(len(a)) if k not in matched_a] + [b[k][1] for k in range(len(b)) if k not in matched_b]
    for z in loose:
        if min(z.real - lo, hi - z.real) > allowance:
            raise PairingError(f"unmatched zero {z:.6g} far from the window edges")
    out = []
    for pos, rec in enumerate(records):
        partners = paired.get(pos)
        if partners:
            lam0 = complex(np.mean(partners))
            gap = max(abs(rec.lam - p) for p in partners)
            out.append(replace(rec, lam0=lam0, gap=float(gap)))
        else:
            out.append(rec)
    center = 0.5 * (lo + hi)
    quarter = 0.25 * (hi - lo)
    outer = [r.gap for r in out if r.gap is not None and abs(r.lam.real - center) > quarter]
    inner = [r.gap for r in out if r.gap is not None and abs(r.lam.real - center) <= quarter]
    return PairingSummary(out, max(outer, default=0.0), max(inner, default=0.0), len(loose))


def group_parentheses(records: Sequence, eps: float) -> list[list[int]]:
    """Connected components of the union of discs ``D_ε(λ_n)``.

    Records of multiplicity ``m`` contribute ``m`` coincident discs, so the
    returned blocks index the expanded list (record order, copies adjacent).
    Two discs overlap when their centres are closer than ``2ε``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    lams = []
    for r in records:
        lam = r.lam if isinstance(r, EigenvalueRecord) else complex(r)
        mult = r.multiplicity if isinstance(r, EigenvalueRecord) else 1
        lams.extend([lam] * mult)
    lams = np.asarray(lams, dtype=complex)
    parent = list(range(lams.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = np.argsort(lams.real, kind="stable")
    for pos, i in enumerate(order):
        for j in order[pos + 1 :]:
            if lams[j].real - lams[i].real >= 2 * eps:
                break
            if abs(lams[j] - lams[i]) < 2 * eps:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    blocks: dict[int, list[int]] = {}
    for i in range(lams.size):
        blocks.setdefault(find(i), []).append(i)
    return sorted(blocks.values(), key=lambda blk: blk[0])
