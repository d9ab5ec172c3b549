"""Triangular transformation-operator kernels on ``Ω = {0 <= t <= x <= 1}``.

With ``a_j = 1/b_j`` the auxiliary kernel ``R`` solves

    R_kk(x, t) = -(i/a_k) ∫_{x-t}^{x} Q_kj(ξ) R_jk(ξ, ξ - x + t) dξ,
    R_jk(x, t) = i Q_jk(ξ_jk)/(a_k - a_j)
                 - (i/a_j) ∫_{ξ_jk}^{x} Q_jk(ξ) R_kk(ξ, κ(ξ - x) + t) dξ,

where ``κ = a_k/a_j`` and ``ξ_jk = (a_k x - a_j t)/(a_k - a_j)``.  The first
family integrates along grid diagonals; the second along lines of slope
``κ`` that generally cross cells, where values are taken from the piecewise
linear interpolant on the triangulation whose cell diagonals run parallel to
``t = x`` (so only nodes inside Ω are used).  The kernels of the
transformation operators are

    K±(x, t) = R(x, t) + P±(x - t) + ∫_t^x R(x, s) P±(s - t) ds,

with the diagonal profile ``P±`` fixed by the edge condition
``K±(x, 0) B^{-1} (1, ±1)ᵀ = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.linalg import toeplitz

from .core import PotentialGrid, ReducedBC, Weights
from .errors import InvalidProblemError, KernelDivergenceError

__all__ = [
    "TriangleGrid",
    "KernelField",
    "KernelPair",
    "solve_R",
    "goursat_residuals",
    "solve_P",
    "p_system_residual",
    "assemble_K",
    "side_condition_residuals",
    "apply_transform",
    "sym_R_pm",
    "phi_via_kernels",
    "trace_g",
    "delta_via_traces",
    "kernel_norms",
    "volterra_l1_norm",
    "kernel_pair",
    "dump_kernel",
    "load_kernel",
]

ROLES = ("R", "K+", "K-", "R+", "R-")
_CHUNK_SAMPLES = 2_000_000


@dataclass(frozen=True)
class TriangleGrid:
    """Nodes ``(x_i, t_j) = (i/N, j/N)`` with ``0 <= j <= i <= N``."""

    N: int

    def __post_init__(self):
        if int(self.N) < 4:
            raise InvalidProblemError("triangle grid needs N >= 4")
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)

    @property
    def mask(self) -> np.ndarray:
        """Boolean (N+1, N+1) array, True on ``j <= i``."""
        return np.tri(self.N + 1, dtype=bool)

    def trapezoid_rows(self) -> np.ndarray:
        """Weights ``W[i, j]`` of the trapezoid rule for ``∫_0^{x_i} · dt``."""
        return _row_weights(self.N + 1, self.h)


@dataclass(frozen=True)
class KernelField:
    """Matrix kernel sampled on a triangle grid.

    Attributes
    ----------
    grid : TriangleGrid
    values : ndarray, shape (N + 1, N + 1, 2, 2)
        ``values[i, j]`` is the kernel at ``(x_i, t_j)``; entries with
        ``j > i`` are zero.
    role : str
        One of ``R``, ``K+``, ``K-``, ``R+``, ``R-``.
    """

    grid: TriangleGrid
    values: np.ndarray = field(repr=False)
    role: str = "R"

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidProblemError(f"unknown kernel role {self.role!r}")
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.N + 1, self.grid.N + 1, 2, 2):
            raise InvalidProblemError("kernel values have the wrong shape")
        if not np.all(np.isfinite(values)):
            raise InvalidProblemError("kernel values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def entry(self, j: int, k: int) -> np.ndarray:
        """Zero-based entry grid, shape (N + 1, N + 1)."""
        return self.values[:, :, j, k]

    def at_x1(self) -> np.ndarray:
        """Trace ``t -> f(1, t)``, shape (N + 1, 2, 2)."""
        return self.values[-1]

    def at_t0(self) -> np.ndarray:
        """Trace ``x -> f(x, 0)``, shape (N + 1, 2, 2)."""
        return self.values[:, 0]

    def diagonal(self) -> np.ndarray:
        """``x -> f(x, x)``, shape (N + 1, 2, 2)."""
        idx = np.arange(self.grid.N + 1)
        return self.values[idx, idx]


# ----- line operators ---------------------------------------------------------


def _p1_weights(xp: np.ndarray, tp: np.ndarray, N: int):
    """Nodes and weights of the P1 interpolant at points of Ω.

    Returns flat node indices (3, S) and weights (3, S).
    """
    u = np.clip(xp * N, 0.0, N)
    v = np.clip(tp * N, 0.0, None)
    v = np.minimum(v, u)
    i0 = np.minimum(np.floor(u).astype(np.int64), N - 1)
    j0 = np.minimum(np.floor(v).astype(np.int64), N - 1)
    fu = u - i0
    fv = v - j0
    lower = fu >= fv
    stride = N + 1
    n00 = i0 * stride + j0
    n11 = (i0 + 1) * stride + j0 + 1
    mid = np.where(lower, (i0 + 1) * stride + j0, i0 * stride + j0 + 1)
    w00 = np.where(lower, 1.0 - fu, 1.0 - fv)
    wmid = np.where(lower, fu - fv, fv - fu)
    w11 = np.where(lower, fv, fu)
    return np.stack([n00, mid, n11]), np.stack([w00, wmid, w11])


def _line_operator(potential: PotentialGrid, weights: Weights, grid: TriangleGrid, j: int, k: int) -> sp.csr_matrix:
    """Sparse matrix of ``F -> ∫_{ξ_jk}^{x} Q_jk(ξ) F(ξ, κ(ξ - x) + t) dξ``.

    Rows and columns index the flattened (N + 1)^2 node array.
    """
    N = grid.N
    h = grid.h
    a = weights.a
    aj, ak = a[j], a[k]
    kappa = ak / aj
    stride = N + 1
    ii, ll = np.nonzero(grid.mask)
    x = ii * h
    t = ll * h
    xi0 = (ak * x - aj * t) / (ak - aj)
    length = np.maximum(x - xi0, 0.0)
    count = np.where(length > 0, np.ceil(length / h - 1e-9).astype(np.int64), 0)
    blocks = []
    start = 0
    total_rows = stride * stride
    order_rows = ii * stride + ll
    # process contiguous ranges of nodes so temporary arrays stay bounded
    cum = np.cumsum(count + 1)
    while start < ii.size:
        base = cum[start - 1] if start else 0
        stop = int(np.searchsorted(cum, base + _CHUNK_SAMPLES, side="right"))
        stop = max(stop, start + 1)
        sel = slice(start, stop)
        c = count[sel]
        nsamp = c + 1
        node = np.repeat(np.arange(stop - start), nsamp)
        offs = np.arange(nsamp.sum()) - np.repeat(np.cumsum(nsamp) - nsamp, nsamp)
        cn = c[node]
        xs = x[sel][node]
        ts = t[sel][node]
        x0 = xi0[sel][node]
        ln = length[sel][node]
        xi = np.where(offs < cn, xs - offs * h, x0)
        # trapezoid weights: uniform steps h, last step shortened to reach ξ_jk
        last = ln - (cn - 1) * h
        left = np.where(offs == 0, 0.0, np.where(offs == cn, last, h))
        right = np.where(offs == cn, 0.0, np.where(offs == cn - 1, last, h))
        wq = 0.5 * (left + right)
        wq = np.where(cn == 0, 0.0, wq)
        tp = kappa * (xi - xs) + ts
        q = potential.entry(j, k, xi)
        nodes, wts = _p1_weights(xi, tp, N)
        vals = wts * (wq * q)[None, :]
        rows = np.broadcast_to(order_rows[sel][node], nodes.shape)
        keep = vals != 0
        blocks.append((rows[keep], nodes[keep], vals[keep]))
        start = stop
    rows = np.concatenate([b[0] for b in blocks]) if blocks else np.array([], np.int64)
    cols = np.concatenate([b[1] for b in blocks]) if blocks else np.array([], np.int64)
    vals = np.concatenate([b[2] for b in blocks]) if blocks else np.array([], complex)
    return sp.csr_matrix((vals, (rows, cols)), shape=(total_rows, total_rows))


def _diagonal_integral(G: np.ndarray, h: float) -> np.ndarray:
    """``I[i, l] = ∫_{x_i - t_l}^{x_i} g`` along the diagonal through ``(i, l)``.

    ``G[i', l']`` holds the integrand on the nodes; the trapezoid rule on the
    diagonal points ``(i - l + m, m)``, ``m = 0..l``, is exact to the grid.
    """
    n = G.shape[0]
    d = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    rows = d + m
    valid = rows < n
    T = np.where(valid, G[np.minimum(rows, n - 1), m], 0.0)
    C = np.cumsum(T, axis=1)
    ii, ll = np.nonzero(np.tri(n, dtype=bool))
    dd = ii - ll
    out = np.zeros_like(G)
    out[ii, ll] = h * (C[dd, ll] - 0.5 * (T[dd, 0] + T[dd, ll]))
    return out


@dataclass(frozen=True)
class _GoursatOperator:
    """Precomputed pieces of the fixed-point map for ``R``."""

    grid: TriangleGrid
    a: tuple
    q_nodes: np.ndarray
    source: dict
    lines: dict

    def apply(self, R: np.ndarray) -> np.ndarray:
        """One Gauss-Seidel sweep: off-diagonal entries first, then diagonal."""
        N = self.grid.N
        h = self.grid.h
        new = np.zeros_like(R)
        a = self.a
        for j, k in ((0, 1), (1, 0)):
            integral = (self.lines[(j, k)] @ R[:, :, k, k].ravel()).reshape(N + 1, N + 1)
            new[:, :, j, k] = self.source[(j, k)] - (1j / a[j]) * integral
        for k, j in ((0, 1), (1, 0)):
            G = self.q_nodes[:, None, k, j] * new[:, :, j, k]
            new[:, :, k, k] = -(1j / a[k]) * _diagonal_integral(G, h)
        return new


def _goursat_operator(potential: PotentialGrid, weights: Weights, grid: TriangleGrid) -> _GoursatOperator:
    if not potential.off_diagonal:
        raise InvalidProblemError("kernel solver expects an off-diagonal potential (apply gauge_reduce first)")
    a = weights.a
    x = grid.nodes
    mask = grid.mask
    X, T = np.meshgrid(x, x, indexing="ij")
    source = {}
    lines = {}
    for j, k in ((0, 1), (1, 0)):
        xi = (a[k] * X - a[j] * T) / (a[k] - a[j])
        src = 1j * potential.entry(j, k, np.clip(xi, 0.0, 1.0)) / (a[k] - a[j])
        source[(j, k)] = np.where(mask, src, 0.0)
        lines[(j, k)] = _line_operator(potential, weights, grid, j, k)
    q_nodes = potential.at(x)
    return _GoursatOperator(grid, a, q_nodes, source, lines)


def solve_R(
    potential: PotentialGrid,
    weights: Weights,
    grid: TriangleGrid,
    tol: float = 1e-10,
    max_sweeps: int = 100,
) -> KernelField:
    """Picard iteration for the auxiliary kernel ``R``.

    Raises
    ------
    KernelDivergenceError
        If the sup-norm update is still above ``tol`` after ``max_sweeps``.
    """
    op = _goursat_operator(potential, weights, grid)
    R = np.zeros((grid.N + 1, grid.N + 1, 2, 2), dtype=complex)
    update = math.inf
    for _ in range(max_sweeps):
        new = op.apply(R)
        update = float(np.max(np.abs(new - R)))
        R = new
        if not np.isfinite(update):
            break
        if update < tol:
            return KernelField(grid, R, "R")
    raise KernelDivergenceError(f"kernel iteration stalled, last update {update:.3e}", update)


def goursat_residuals(R: KernelField, potential: PotentialGrid, weights: Weights) -> dict:
    """Sup-norm of ``R - T(R)`` per equation family, ``T`` the integral map.

    ``T`` is evaluated with each family fed by the field itself (a Jacobi
    evaluation), so the numbers measure how well ``R`` solves the discrete
    system.
    """
    op = _goursat_operator(potential, weights, R.grid)
    N = R.grid.N
    vals = R.values
    out = {}
    for j, k in ((0, 1), (1, 0)):
        integral = (op.lines[(j, k)] @ vals[:, :, k, k].ravel()).reshape(N + 1, N + 1)
        rhs = op.source[(j, k)] - (1j / op.a[j]) * integral
        out[f"R{j + 1}{k + 1}"] = float(np.max(np.abs(rhs - vals[:, :, j, k])))
    for k, j in ((0, 1), (1, 0)):
        G = op.q_nodes[:, None, k, j] * vals[:, :, j, k]
        rhs = -(1j / op.a[k]) * _diagonal_integral(G, R.grid.h)
        out[f"R{k + 1}{k + 1}"] = float(np.max(np.abs(rhs - vals[:, :, k, k])))
    return out


# ----- convolution profile and kernels ------------------------------------------


def solve_P(R: KernelField, weights: Weights, sign: int) -> np.ndarray:
    """Diagonal profile ``P±(x_i)`` as an (N + 1, 2) array.

    Solves, by forward substitution with the trapezoid rule,

        a1 P1 + ∫_0^x [a1 R11 P1 ± a2 R12 P2] = ∓a2 R12(x, 0),
       ±a2 P2 + ∫_0^x [a1 R21 P1 ± a2 R22 P2] = -a1 R21(x, 0).
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a1, a2 = weights.a
    grid = R.grid
    h = grid.h
    vals = R.values
    col = np.array([a1, sign * a2])  # B^{-1}(1, ±1)
    P = np.zeros((grid.N + 1, 2), dtype=complex)
    for i in range(grid.N + 1):
        rhs = -(vals[i, 0] @ col)
        M = np.diag(col).astype(complex)
        if i > 0:
            w = np.full(i + 1, h)
            w[0] = w[-1] = 0.5 * h
            # known part of the integral (nodes 0..i-1)
            known = np.einsum("m,mab,b,mb->a", w[:-1], vals[i, :i], col, P[:i])
            rhs = rhs - known
            M = M + w[-1] * vals[i, i] * col[None, :]
        P[i] = np.linalg.solve(M, rhs)
    return P


def p_system_residual(R: KernelField, weights: Weights, P: np.ndarray, sign: int) -> float:
    """Re-substitution residual of the Volterra system for ``P±``."""
    a1, a2 = weights.a
    col = np.array([a1, sign * a2])
    W = R.grid.trapezoid_rows()
    vals = R.values
    integral = np.einsum("im,imab,b,mb->ia", W, vals, col, P)
    lhs = col[None, :] * P + integral
    rhs = -np.einsum("iab,b->ia", vals[:, 0], col)
    return float(np.max(np.abs(lhs - rhs)))


def assemble_K(R: KernelField, P: np.ndarray, sign: int) -> KernelField:
    """``K±(x, t) = R + P±(x - t) + ∫_t^x R(x, s) P±(s - t) ds`` (trapezoid)."""
    grid = R.grid
    n = grid.N + 1
    h = grid.h
    mask = grid.mask
    vals = R.values
    K = vals.copy()
    ii, jj = np.nonzero(mask)
    for b in range(2):
        Tb = toeplitz(P[:, b], np.zeros(n))
        K[ii, jj, b, b] += P[ii - jj, b]
        for a in range(2):
            Rab = vals[:, :, a, b]
            conv = Rab @ Tb
            diag = np.diagonal(Rab)
            corr = 0.5 * (Rab * P[0, b] + diag[:, None] * np.where(mask, P[np.abs(np.subtract.outer(np.arange(n), np.arange(n))), b], 0.0))
            K[:, :, a, b] += np.where(mask, h * (conv - corr), 0.0)
    return KernelField(grid, K, "K+" if sign > 0 else "K-")


def side_condition_residuals(K: KernelField, potential: PotentialGrid, weights: Weights, sign: int) -> dict:
    """Relative residuals of the jump and edge conditions.

    Jump: ``K(x,x) B^{-1} - B^{-1} K(x,x) = iQ(x)``.  Edge:
    ``K(x, 0) B^{-1} (1, ±1)ᵀ = 0``.  Each residual is divided by the size of
    the terms it balances.
    """
    a = np.array(weights.a)
    Binv = np.diag(a)
    diag = K.diagonal()
    q = potential.at(K.grid.nodes)
    jump = diag @ Binv - Binv @ diag - 1j * q
    jump_scale = max(float(np.max(np.abs(q))), 1e-300)
    col = np.array([a[0], sign * a[1]])
    edge = K.at_t0() @ col
    edge_scale = max(float(np.max(np.abs(K.at_t0()))) * float(np.max(np.abs(a))), 1e-300)
    return {
        "jump": float(np.max(np.abs(jump))) / jump_scale,
        "edge": float(np.max(np.abs(edge))) / edge_scale,
    }


def apply_transform(K: KernelField, weights: Weights, lam: complex, sign: int) -> np.ndarray:
    """``e±(x_i; λ) = e0±(x_i) + ∫_0^{x_i} K±(x_i, t) e0±(t) dt``, shape (N + 1, 2)."""
    t = K.grid.nodes
    e0 = np.stack([np.exp(1j * weights.b1 * lam * t), sign * np.exp(1j * weights.b2 * lam * t)], axis=1)
    W = K.grid.trapezoid_rows()
    return e0 + np.einsum("it,itab,tb->ia", W, K.values, e0)


def sym_R_pm(K_plus: KernelField, K_minus: KernelField) -> tuple[KernelField, KernelField]:
    """``R± = (K⁺ ± K⁻)/2``."""
    return (
        KernelField(K_plus.grid, 0.5 * (K_plus.values + K_minus.values), "R+"),
        KernelField(K_plus.grid, 0.5 * (K_plus.values - K_minus.values), "R-"),
    )


def _trace_integral(profile: np.ndarray, b: float, lam, h: float) -> np.ndarray:
    """Trapezoid ``∫_0^1 profile(t) e^{ibλt} dt`` for an array of ``λ``."""
    lam = np.asarray(lam, dtype=complex)
    n = profile.shape[0]
    t = np.linspace(0.0, 1.0, n)
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    phase = np.exp(1j * b * np.multiply.outer(lam, t))
    return phase @ (w * profile)


def phi_via_kernels(R_plus: KernelField, R_minus: KernelField, weights: Weights, lam) -> np.ndarray:
    """``Φ(1, λ)`` from the traces of ``R±`` at ``x = 1``, shape ``lam.shape + (2, 2)``."""
    lam = np.asarray(lam, dtype=complex)
    h = R_plus.grid.h
    b1, b2 = weights.b1, weights.b2
    p = R_plus.at_x1()
    m = R_minus.at_x1()

    def integ(profile, b):
        return _trace_integral(profile, b, lam, h)

    out = np.empty(lam.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * b1 * lam) + integ(p[:, 0, 0], b1) + integ(m[:, 0, 1], b2)
    out[..., 0, 1] = integ(m[:, 0, 0], b1) + integ(p[:, 0, 1], b2)
    out[..., 1, 0] = integ(p[:, 1, 0], b1) + integ(m[:, 1, 1], b2)
    out[..., 1, 1] = np.exp(1j * b2 * lam) + integ(m[:, 1, 0], b1) + integ(p[:, 1, 1], b2)
    return out


def trace_g(R_plus: KernelField, R_minus: KernelField, bc: ReducedBC) -> tuple[np.ndarray, np.ndarray]:
    """Profiles ``g1, g2`` with ``Δ = Δ0 + ∫g1 e^{ib1λt} + ∫g2 e^{ib2λt}``."""
    p = R_plus.at_x1()
    m = R_minus.at_x1()
    J = bc.det
    g1 = J * p[:, 0, 0] + m[:, 1, 0] + bc.c * m[:, 0, 0] - bc.b * p[:, 1, 0]
    g2 = J * m[:, 0, 1] + p[:, 1, 1] + bc.c * p[:, 0, 1] - bc.b * m[:, 1, 1]
    return g1, g2


def delta_via_traces(g1: np.ndarray, g2: np.ndarray, bc: ReducedBC, weights: Weights, lam) -> np.ndarray:
    """Kernel-trace determinant for reduced rows."""
    from .determinant import delta0_eval

    h = 1.0 / (g1.shape[0] - 1)
    return (
        delta0_eval(bc, weights, lam)
        + _trace_integral(g1, weights.b1, lam, h)
        + _trace_integral(g2, weights.b2, lam, h)
    )


# ----- norms -----------------------------------------------------------------------


def _row_weights(n: int, h: float) -> np.ndarray:
    """Trapezoid weights for ``∫_0^{x_i} · dt`` (row i, columns j <= i)."""
    W = np.tri(n) * h
    idx = np.arange(n)
    W[:, 0] *= 0.5
    W[idx, idx] *= 0.5
    W[0, 0] = 0.0
    return W


def _entry_norms(f: np.ndarray, h: float) -> tuple[float, float]:
    n = f.shape[0]
    absf = np.where(np.tri(n, dtype=bool), np.abs(f), 0.0)
    xinf = float(np.max(np.sum(_row_weights(n, h) * absf, axis=1)))
    # ∫_t^1 |f| dx per column: the row rule reflected through the anti-diagonal
    x1 = float(np.max(np.sum(_row_weights(n, h)[::-1, ::-1].T * absf, axis=0)))
    return x1, xinf


def kernel_norms(field) -> dict:
    """Grid ``X1`` and ``X∞`` norms.

    ``X1 = sup_t ∫_t^1 |f(x,t)| dx`` and ``X∞ = sup_x ∫_0^x |f(x,t)| dt``.
    ``field`` may be a :class:`KernelField` (entry-wise norms plus their
    maximum) or a scalar (N + 1, N + 1) array.
    """
    if isinstance(field, KernelField):
        entries = {}
        for j in range(2):
            for k in range(2):
                x1, xinf = _entry_norms(field.entry(j, k), field.grid.h)
                entries[f"{j + 1}{k + 1}"] = {"X1": x1, "Xinf": xinf}
        return {
            "X1": max(e["X1"] for e in entries.values()),
            "Xinf": max(e["Xinf"] for e in entries.values()),
            "entries": entries,
        }
    arr = np.asarray(field)
    x1, xinf = _entry_norms(arr, 1.0 / (arr.shape[0] - 1))
    return {"X1": x1, "Xinf": xinf}


def volterra_l1_norm(f: np.ndarray) -> float:
    """Operator norm on discrete L¹ of ``u -> ∫_0^x f(x, t) u(t) dt``.

    The discrete operator is ``(A u)_i = Σ_j W_ij f_ij u_j`` and the L¹ norm
    uses trapezoid weights ``c``; its operator norm is ``max_j Σ_i c_i
    |W_ij f_ij| / c_j``.
    """
    n = f.shape[0]
    h = 1.0 / (n - 1)
    W = _row_weights(n, h)
    c = np.full(n, h)
    c[0] = c[-1] = 0.5 * h
    A = np.abs(W * np.where(np.tri(n, dtype=bool), f, 0.0))
    return float(np.max((c[:, None] * A).sum(axis=0) / c))


# ----- orchestration and I/O -----------------------------------------------------


@dataclass(frozen=True)
class KernelPair:
    """All kernel objects for one potential."""

    R: KernelField
    P_plus: np.ndarray
    P_minus: np.ndarray
    K_plus: KernelField
    K_minus: KernelField
    r_plus: KernelField
    r_minus: KernelField


def kernel_pair(potential: PotentialGrid, weights: Weights, grid: TriangleGrid, tol: float = 1e-10) -> KernelPair:
    """Solve for ``R``, both profiles ``P±`` and both kernels ``K±``."""
    R = solve_R(potential, weights, grid, tol=tol)
    Pp = solve_P(R, weights, +1)
    Pm = solve_P(R, weights, -1)
    Kp = assemble_K(R, Pp, +1)
    Km = assemble_K(R, Pm, -1)
    rp, rm = sym_R_pm(Kp, Km)
    return KernelPair(R, Pp, Pm, Kp, Km, rp, rm)


def dump_kernel(field: KernelField, weights: Weights, path) -> None:
    """Write a kernel as an 8-value float64 header plus complex64 data.

    Header: ``N, role code, b1, b2, 2 (matrix size), 1 (format version), 0, 0``.
    Data: ``values`` in C order, shape (N + 1, N + 1, 2, 2), as complex64.
    """
    header = np.array(
        [field.grid.N, ROLES.index(field.role), weights.b1, weights.b2, 2, 1, 0, 0], dtype="<f8"
    )
    with open(Path(path), "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(field.values, dtype="<c8").tobytes())


def load_kernel(path) -> tuple[KernelField, Weights]:
    """Inverse of :func:`dump_kernel` (values come back at complex64 precision)."""
    raw = Path(path).read_bytes()
    header = np.frombuffer(raw[:64], dtype="<f8")
    N = int(header[0])
    role = ROLES[int(header[1])]
    data = np.frombuffer(raw[64:], dtype="<c8").reshape(N + 1, N + 1, 2, 2)
    return KernelField(TriangleGrid(N), data.astype(complex), role), Weights(header[2], header[3])
