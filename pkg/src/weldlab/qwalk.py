"""Continuous-time quantum walk on welded binary trees.

Two independent routes to the same amplitudes:

* the column reduction, a (2k+2)-dimensional tridiagonal Hamiltonian
  evolved by dense eigendecomposition;
* the full adjacency matrix of the welded tree, evolved by a Chebyshev
  expansion of ``exp(-iHt)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.special import jv

NORM_TOL = 1e-9


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ColumnWalk:
    k: int
    gamma: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    evals: np.ndarray = field(repr=False)
    evecs: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.k + 2

    @property
    def column_sizes(self) -> np.ndarray:
        half = 2 ** np.arange(self.k + 1)
        return np.concatenate([half, half[::-1]])

    def evolve(self, t, psi0: np.ndarray | None = None) -> np.ndarray:
        """``exp(-iHt) psi0`` for scalar or array ``t`` (rows indexed by t)."""
        if psi0 is None:
            psi0 = np.zeros(self.dim, complex)
            psi0[0] = 1.0
        ts = np.atleast_1d(np.asarray(t, float))
        coeff = self.evecs.conj().T @ psi0
        phases = np.exp(-1j * np.outer(ts, self.evals))
        out = (phases * coeff[None, :]) @ self.evecs.T
        return out[0] if np.ndim(t) == 0 else out


@lru_cache(maxsize=None)
def column_hamiltonian(k: int) -> ColumnWalk:
    if k < 1:
        raise ValueError("column walk needs k >= 1")
    gamma = np.full(2 * k + 1, math.sqrt(2.0))
    gamma[k] = 2.0
    H = np.diag(gamma, 1) + np.diag(gamma, -1)
    evals, evecs = np.linalg.eigh(H)
    for arr in (gamma, H, evals, evecs):
        arr.setflags(write=False)
    return ColumnWalk(k, gamma, H, evals, evecs)


def exit_probability(k: int, t) -> np.ndarray | float:
    cw = column_hamiltonian(k)
    amp = cw.evolve(t)
    p = np.abs(amp[..., -1]) ** 2
    return float(p) if np.ndim(t) == 0 else p


@dataclass(frozen=True)
class Sweep:
    k: int
    t: np.ndarray = field(repr=False)
    p_entrance: np.ndarray = field(repr=False)
    p_exit: np.ndarray = field(repr=False)

    @property
    def p_star(self) -> float:
        return float(self.p_exit.max())

    @property
    def t_argmax(self) -> float:
        return float(self.t[int(np.argmax(self.p_exit))])

    @property
    def t_half(self) -> float:
        """First grid time at which the exit probability reaches half its maximum."""
        return float(self.t[int(np.argmax(self.p_exit >= self.p_star / 2))])

    @property
    def p_half(self) -> float:
        return float(self.p_exit[int(np.argmax(self.p_exit >= self.p_star / 2))])


@lru_cache(maxsize=None)
def sweep(k: int, t_max: float | None = None, dt: float = 0.05) -> Sweep:
    t_max = 50.0 * k if t_max is None else t_max
    t = np.round(np.arange(0.0, t_max + dt / 2, dt), 12)
    amp = column_hamiltonian(k).evolve(t)
    return Sweep(k, t, np.abs(amp[:, 0]) ** 2, np.abs(amp[:, -1]) ** 2)


def walk_cost(k: int) -> int:
    """Modeled quantum queries for one exit search: walk time times amplification rounds, plus probes."""
    s = sweep(k)
    return math.ceil(s.t_half) * math.ceil(1.0 / math.sqrt(s.p_half)) + 4 * k


# --------------------------------------------------------------- full graph

def welded_tree_adjacency(k: int, rng: np.random.Generator | None = None):
    """Adjacency of two depth-k binary trees welded by an alternating cycle.

    Vertex order: left tree in heap order (root 0), then the right tree in
    reversed heap order, so the right root is the last vertex. Returns
    ``(A, column)`` with ``column[v]`` the column index of ``v``.
    """
    rng = rng or np.random.default_rng(0)
    half = 2 ** (k + 1) - 1
    n = 2 * half
    heaps = np.arange(2, half + 1)
    left = lambda h: h - 1
    right = lambda h: n - h
    rows, cols = [], []
    for f in (left, right):
        rows.extend(f(heaps))
        cols.extend(f(heaps // 2))
    leaves = np.arange(2 ** k, 2 ** (k + 1))
    a = rng.permutation(leaves)
    b = rng.permutation(leaves)
    seq = np.empty(2 * len(leaves), np.int64)
    seq[0::2] = left(a)
    seq[1::2] = right(b)
    rows.extend(seq)
    cols.extend(np.roll(seq, -1))
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    A = (A + A.T).tocsr()
    depth = np.floor(np.log2(np.arange(1, half + 1))).astype(np.int64)
    column = np.concatenate([depth, (2 * k + 1 - depth)[::-1]])
    return A, column


def _check_hermitian(H) -> None:
    diff = H - H.conj().T
    size = abs(diff).max() if sp.issparse(diff) else np.abs(diff).max()
    if size > 1e-12:
        raise ValueError("Hamiltonian is not Hermitian")


def chebyshev_evolve(H, t: float, psi0: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """``exp(-iHt) psi0`` by Chebyshev expansion; H sparse and Hermitian."""
    _check_hermitian(H)
    psi0 = np.asarray(psi0, complex)
    if t == 0:
        return psi0.copy()
    scale = float(abs(H).sum(axis=1).max()) or 1.0
    Hs = H / scale
    x = scale * t
    nterms = int(x + 10 * math.log(x + 2) + 30)
    coeffs = jv(np.arange(nterms), x)
    prev, cur = psi0, Hs @ psi0
    out = coeffs[0] * prev + 2 * (-1j) * coeffs[1] * cur
    for n in range(2, nterms):
        prev, cur = cur, 2 * (Hs @ cur) - prev
        out = out + 2 * (-1j) ** n * coeffs[n] * cur
        if abs(coeffs[n]) < tol and n > x:
            break
    return out


def evolve(H, t: float, psi0: np.ndarray) -> np.ndarray:
    """Dense eigendecomposition for small dense H, Chebyshev for sparse H."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    psi0 = np.asarray(psi0, complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-12:
        raise ValueError("initial state must be normalized")
    if sp.issparse(H):
        out = chebyshev_evolve(H, t, psi0)
    else:
        H = np.asarray(H)
        _check_hermitian(H)
        w, V = np.linalg.eigh(H)
        out = V @ (np.exp(-1j * w * t) * (V.conj().T @ psi0))
    drift = abs(np.linalg.norm(out) - 1)
    if drift > NORM_TOL:
        raise NumericalError(f"norm drift {drift:.3g}")
    return out


def embed_columns(psi_col: np.ndarray, column: np.ndarray) -> np.ndarray:
    """Lift a column-space state to the full vertex space."""
    sizes = np.bincount(column)
    return psi_col[..., column] / np.sqrt(sizes[column])


def cross_check(k: int, times, rng: np.random.Generator | None = None) -> float:
    """Largest amplitude difference between the two routes over ``times``."""
    A, column = welded_tree_adjacency(k, rng)
    cw = column_hamiltonian(k)
    psi0 = np.zeros(A.shape[0], complex)
    psi0[0] = 1.0
    worst = 0.0
    for t in np.atleast_1d(times):
        full = evolve(A, float(t), psi0)
        ref = embed_columns(cw.evolve(float(t)), column)
        worst = max(worst, float(np.abs(full - ref).max()))
    return worst
