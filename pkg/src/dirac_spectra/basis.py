"""Eigenfunctions, biorthogonal normalisation and Gram diagnostics.

Eigenfunctions are ``f(x) = Φ(x, λ) v`` with ``v`` spanning the null space
of ``U(λ) = C + D Φ(1, λ)``; the adjoint system supplies ``g`` at
``conj(λ)``.  Inner products ``(u, w) = ∫_0^1 w(x)^* u(x) dx`` use a
composite Gauss-Legendre rule inside every grid interval, with interior
values obtained by exact propagation from the left node.  This integrates
the discrete (piecewise-constant potential) solutions to machine precision,
so quadrature error does not mask biorthogonality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import DiracProblem, adjoint_problem
from .errors import InsufficientDataError, NotAnEigenvalueError
from .propagator import interval_values, propagate
from .spectra import EigenvalueRecord, group_parentheses

__all__ = [
    "RootPair",
    "GramReport",
    "inner_product",
    "eigenpair_functions",
    "equation_residual",
    "boundary_residual",
    "normalize_biorthogonal",
    "gram_diagnostics",
]

NULL_TOL = 1e-6
DEGENERATE_TOL = 1e-10
QUAD_ORDER = 8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(QUAD_ORDER)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class RootPair:
    """Eigenfunction of the problem and of its adjoint for one eigenvalue.

    Attributes
    ----------
    index : int
    lam : complex
    f, g : ndarray, shape (M + 1, 2)
        Node values of the eigenfunction and of the adjoint eigenfunction.
    f_quad, g_quad : ndarray, shape (M, Q, 2)
        Values at the Gauss-Legendre points of every interval.
    pairing : complex
        ``(f, g)`` before normalisation.
    degenerate : bool
        True when ``|(f, g)|`` is negligible against ``‖f‖‖g‖``.
    """

    index: int
    lam: complex
    f: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    f_quad: np.ndarray = field(repr=False)
    g_quad: np.ndarray = field(repr=False)
    pairing: complex = 0j
    degenerate: bool = False

    @property
    def norm_f(self) -> float:
        return math.sqrt(inner_product(self.f_quad, self.f_quad).real)

    @property
    def norm_g(self) -> float:
        return math.sqrt(inner_product(self.g_quad, self.g_quad).real)


def inner_product(u_quad: np.ndarray, w_quad: np.ndarray) -> complex:
    """``(u, w) = ∫ w^* u`` from Gauss-Legendre samples of shape (M, Q, n)."""
    m = u_quad.shape[0]
    return complex(np.einsum("q,iqa,iqa->", _GL_W, u_quad, np.conj(w_quad)) / m)


def _gram(a_quad: np.ndarray, b_quad: np.ndarray) -> np.ndarray:
    """Matrix ``[(a_j, b_k)]`` for stacks of samples of shape (P, M, Q, n)."""
    m = a_quad.shape[1]
    return np.einsum("q,jiqa,kiqa->jk", _GL_W, a_quad, np.conj(b_quad)) / m


def _null_vectors(problem: DiracProblem, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """Trajectory and null basis of ``U(λ)`` (columns), possibly two vectors."""
    traj = propagate(problem, lam)
    C, D = problem.boundary.C, problem.boundary.D
    U = C + D @ traj.end
    _, s, vh = np.linalg.svd(U)
    scale = np.linalg.norm(C, 2) + np.linalg.norm(D, 2) * np.linalg.norm(traj.end, 2)
    rel = s / scale
    if rel[-1] > NULL_TOL:
        raise NotAnEigenvalueError(f"U({lam:.6g}) is not singular (relative σ_min = {rel[-1]:.3e})")
    count = int(np.sum(rel <= NULL_TOL))
    return traj.phi, np.conj(vh[-count:]).T


def eigenpair_functions(problem: DiracProblem, record: EigenvalueRecord | complex) -> list[RootPair]:
    """Unnormalised eigenfunction pairs at a located eigenvalue.

    Returns one pair when ``U(λ)`` has rank one and two pairs when it
    vanishes (geometric multiplicity two); the adjoint functions are
    matched to the eigenfunctions by the biorthogonalisation of
    :func:`normalize_biorthogonal`.

    Raises
    ------
    NotAnEigenvalueError
        If the smallest singular value of ``U(λ)`` is not small.
    """
    if isinstance(record, EigenvalueRecord):
        lam, index = complex(record.lam), record.index
    else:
        lam, index = complex(record), 0
    adj = adjoint_problem(problem)
    phi, vecs = _null_vectors(problem, lam)
    psi, adj_vecs = _null_vectors(adj, np.conj(lam))
    count = min(vecs.shape[1], adj_vecs.shape[1])
    pairs = []
    for k in range(count):
        f = phi @ vecs[:, k]
        g = psi @ adj_vecs[:, k]
        f_quad = interval_values(problem, lam, f, _GL_X)
        g_quad = interval_values(adj, np.conj(lam), g, _GL_X)
        pairing = inner_product(f_quad, g_quad)
        pairs.append(RootPair(index, lam, f, g, f_quad, g_quad, pairing))
    return pairs


def boundary_residual(problem: DiracProblem, pair: RootPair) -> float:
    """``|C f(0) + D f(1)| / ‖f‖``."""
    res = problem.boundary.C @ pair.f[0] + problem.boundary.D @ pair.f[-1]
    return float(np.linalg.norm(res)) / pair.norm_f


def equation_residual(problem: DiracProblem, pair: RootPair) -> float:
    """Max over intervals of ``|-iB^{-1} f' + Q f - λ f|`` at the midpoints, over ``‖f‖``."""
    pot = problem.potential
    f = pair.f
    h = 1.0 / pot.m
    deriv = (f[1:] - f[:-1]) / h
    mid = 0.5 * (f[1:] + f[:-1])
    q = pot.midpoints() if not pot.is_constant else np.broadcast_to(pot.samples[0], (pot.m, 2, 2))
    binv = 1.0 / np.asarray(problem.b, dtype=float)
    res = -1j * binv[None, :] * deriv + np.einsum("iab,ib->ia", q, mid) - pair.lam * mid
    return float(np.max(np.linalg.norm(res, axis=1))) / pair.norm_f


def normalize_biorthogonal(pairs: Sequence[RootPair]) -> list[RootPair]:
    """Normalise ``f̂ = f/‖f‖`` and ``ĝ`` so that ``(f̂_j, ĝ_k) = δ_jk``.

    Pairs sharing an eigenvalue are treated as one block: the adjoint
    functions of the block are recombined with the inverse cross matrix.
    A block whose cross matrix is negligible against the norms is flagged
    degenerate and left unnormalised on the adjoint side.
    """
    out: list[RootPair] = []
    groups: dict[tuple, list[RootPair]] = {}
    order = []
    for p in pairs:
        key = (p.index, round(p.lam.real, 10), round(p.lam.imag, 10))
        if key not in groups:
            order.append(key)
        groups.setdefault(key, []).append(p)
    for key in order:
        block = groups[key]
        fs = [(p.f / p.norm_f, p.f_quad / p.norm_f) for p in block]
        fq = np.stack([q for _, q in fs])
        gq = np.stack([p.g_quad for p in block])
        gn = np.stack([p.g for p in block])
        cross = _gram(fq, gq)
        gnorms = np.sqrt(np.real(np.diag(_gram(gq, gq))))
        size = np.max(gnorms)
        smin = np.linalg.svd(cross, compute_uv=False)[-1] if cross.size else 0.0
        if smin < DEGENERATE_TOL * size:
            for (f, q), p in zip(fs, block):
                out.append(replace(p, f=f, f_quad=q, degenerate=True))
            continue
        X = np.conj(np.linalg.inv(cross))
        g_new = np.einsum("kj,kia->jia", X, gn)
        gq_new = np.einsum("kj,kiqa->jiqa", X, gq)
        for j, ((f, q), p) in enumerate(zip(fs, block)):
            out.append(replace(p, f=f, f_quad=q, g=g_new[j], g_quad=gq_new[j], degenerate=False))
    return out


@dataclass(frozen=True)
class GramReport:
    """Truncated Riesz-basis diagnostics.

    Attributes
    ----------
    window : int
        Number of pairs used.
    residual : float
        ``max |(f̂_n, ĝ_m) - δ_nm|``.
    cond : float
        Condition number of the Gram matrix ``[(f̂_n, f̂_m)]``.
    bessel : float
        Largest eigenvalue of the Gram matrix.
    blocks : list of list of int
        Parenthesis blocks (positions within the window) used for the block
        Gram matrix; singletons when no grouping radius was given.
    block_cond : float
        Condition number after orthonormalising inside every block.
    half_window : int
    half_cond, half_block_cond : float
        The same quantities on the central half of the window.
    degenerate : int
        Pairs excluded because their pairing vanished.
    """

    window: int
    residual: float
    cond: float
    bessel: float
    blocks: list
    block_cond: float
    half_window: int
    half_cond: float
    half_block_cond: float
    degenerate: int

    @property
    def cond_growth(self) -> float:
        return self.cond / self.half_cond

    @property
    def block_cond_growth(self) -> float:
        return self.block_cond / self.half_block_cond

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "residual": self.residual,
            "cond": self.cond,
            "bessel": self.bessel,
            "blocks": [list(map(int, b)) for b in self.blocks],
            "block_cond": self.block_cond,
            "half_window": self.half_window,
            "half_cond": self.half_cond,
            "half_block_cond": self.half_block_cond,
            "degenerate": self.degenerate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _cond(G: np.ndarray) -> float:
    ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    return float(ev[-1] / ev[0]) if ev[0] > 0 else math.inf


def _block_cond(G: np.ndarray, blocks: list[list[int]]) -> float:
    """Condition number of ``L^{-1} G L^{-*}`` with ``L`` the block Cholesky factor."""
    n = G.shape[0]
    Linv = np.zeros((n, n), dtype=complex)
    for blk in blocks:
        idx = np.array(blk)
        sub = G[np.ix_(idx, idx)]
        Linv[np.ix_(idx, idx)] = np.linalg.inv(np.linalg.cholesky(0.5 * (sub + sub.conj().T)))
    return _cond(Linv @ G @ Linv.conj().T)


def _central(pairs: list[RootPair], count: int) -> list[RootPair]:
    ranked = sorted(range(len(pairs)), key=lambda k: (abs(pairs[k].index), pairs[k].index, k))
    keep = sorted(ranked[:count])
    return [pairs[k] for k in keep]


def _window_stats(pairs: list[RootPair], eps: float | None):
    fq = np.stack([p.f_quad for p in pairs])
    gq = np.stack([p.g_quad for p in pairs])
    G = _gram(fq, fq)
    X = _gram(fq, gq)
    if eps is None:
        blocks = [[k] for k in range(len(pairs))]
    else:
        blocks = group_parentheses([p.lam for p in pairs], eps)
    residual = float(np.max(np.abs(X - np.eye(len(pairs)))))
    bessel = float(np.linalg.eigvalsh(0.5 * (G + G.conj().T))[-1])
    return residual, _cond(G), bessel, blocks, _block_cond(G, blocks)


def gram_diagnostics(pairs: Sequence[RootPair], window: int | None = None, eps: float | None = None) -> GramReport:
    """Gram and cross matrices over the ``window`` most central pairs.

    Parameters
    ----------
    pairs : sequence of RootPair
        Normalised pairs (see :func:`normalize_biorthogonal`).
    window : int, optional
        Number of pairs, chosen by smallest ``|index|``; defaults to all.
    eps : float, optional
        Disc radius for parenthesis blocks; ``None`` uses singletons.

    Raises
    ------
    InsufficientDataError
        With fewer than five non-degenerate pairs.
    """
    usable = [p for p in pairs if not p.degenerate]
    degenerate = len(pairs) - len(usable)
    if window is None:
        window = len(usable)
    if len(usable) < 5 or window < 5:
        raise InsufficientDataError(f"need at least 5 non-degenerate pairs, got {min(len(usable), window)}")
    chosen = _central(usable, window)
    residual, cond, bessel, blocks, block_cond = _window_stats(chosen, eps)
    half = max(1, len(chosen) // 2)
    half_chosen = _central(chosen, half)
    _, half_cond, _, _, half_block = _window_stats(half_chosen, eps)
    return GramReport(
        window=len(chosen),
        residual=residual,
        cond=cond,
        bessel=bessel,
        blocks=blocks,
        block_cond=block_cond,
        half_window=len(half_chosen),
        half_cond=half_cond,
        half_block_cond=half_block,
        degenerate=degenerate,
    )
