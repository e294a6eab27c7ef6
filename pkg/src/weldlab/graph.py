"""Bounded-degree multigraphs with role tags, and the query-counted oracle.

A :class:`MultiGraph` stores, per vertex, up to ``MAX_DEGREE`` neighbor
slots (``-1`` marks an empty slot) with an edge kind for each slot. Self-loops
are kept in a separate boolean array. Degree is counted with multiplicity:
a single edge counts 1, a double edge 2, a self-loop 1.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .rng import child_seed, hashed_permutation, stream

MAX_DEGREE = 5
SLOTS = MAX_DEGREE
EMPTY = -1


class GraphError(ValueError):
    """Domain error raised on invalid vertex ids or malformed graphs."""


class VertexRole(enum.IntEnum):
    BODY = 0
    ANTENNA = 1
    ROOT = 2


class EdgeKind(enum.IntEnum):
    SINGLE = 1
    DOUBLE = 2


class Ignore(enum.Flag):
    """Edge classes excluded from a degree count or neighbor listing."""

    NONE = 0
    SINGLE = enum.auto()
    DOUBLE = enum.auto()
    LOOP = enum.auto()


class QueryAnswer(NamedTuple):
    role: VertexRole
    loop: bool
    neighbors: tuple[tuple[int, EdgeKind], ...]


class MultiGraph:
    """Immutable undirected multigraph with per-vertex roles and self-loops."""

    def __init__(self, nbr: np.ndarray, kind: np.ndarray, loops: np.ndarray, roles: np.ndarray,
                 *, k: int | None = None, variant: str = "custom", validate: bool = True):
        nbr = np.asarray(nbr)
        if nbr.ndim != 2 or nbr.shape[1] != SLOTS:
            raise GraphError(f"neighbor table must have shape (n, {SLOTS})")
        self.nbr = nbr
        self.kind = np.asarray(kind, dtype=np.int8)
        self.loops = np.asarray(loops, dtype=bool)
        self.roles = np.asarray(roles, dtype=np.int8)
        self.k = k
        self.variant = variant
        for arr in (self.nbr, self.kind, self.loops, self.roles):
            arr.setflags(write=False)
        if validate:
            self.validate()

    @property
    def vertex_count(self) -> int:
        return int(self.nbr.shape[0])

    def __len__(self) -> int:
        return self.vertex_count

    @classmethod
    def empty(cls) -> "MultiGraph":
        return cls(np.empty((0, SLOTS), np.int64), np.empty((0, SLOTS), np.int8),
                   np.empty(0, bool), np.empty(0, np.int8))

    @classmethod
    def from_edges(cls, n: int, singles=(), doubles=(), loops=(), roles=None, **meta) -> "MultiGraph":
        """Build a graph from edge lists; each undirected edge is listed once."""
        singles = np.asarray(singles, dtype=np.int64).reshape(-1, 2)
        doubles = np.asarray(doubles, dtype=np.int64).reshape(-1, 2)
        for name, edges in (("single", singles), ("double", doubles)):
            if edges.size and (edges.min() < 0 or edges.max() >= n):
                raise GraphError(f"{name} edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphError(f"{name} edge is a self-loop; use the loops argument")
        src = np.concatenate([singles[:, 0], singles[:, 1], doubles[:, 0], doubles[:, 1]])
        dst = np.concatenate([singles[:, 1], singles[:, 0], doubles[:, 1], doubles[:, 0]])
        knd = np.concatenate([np.full(2 * len(singles), EdgeKind.SINGLE, np.int8),
                              np.full(2 * len(doubles), EdgeKind.DOUBLE, np.int8)])
        order = np.lexsort((dst, src))
        src, dst, knd = src[order], dst[order], knd[order]
        if len(src) > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if dup.any():
                i = int(np.flatnonzero(dup)[0])
                raise GraphError(f"repeated edge {int(src[i])}-{int(dst[i])}; use a double edge")
        counts = np.bincount(src, minlength=n) if n else np.zeros(0, np.int64)
        if counts.size and counts.max() > SLOTS:
            v = int(np.argmax(counts))
            raise GraphError(f"vertex {v} has {int(counts[v])} distinct neighbors")
        start = np.concatenate([[0], np.cumsum(counts)[:-1]]) if n else np.zeros(0, np.int64)
        slot = np.arange(len(src)) - start[src]
        nbr = np.full((n, SLOTS), EMPTY, np.int64)
        kind = np.zeros((n, SLOTS), np.int8)
        nbr[src, slot] = dst
        kind[src, slot] = knd
        loop_arr = np.zeros(n, bool)
        loop_arr[np.asarray(list(loops), dtype=np.int64)] = True
        if roles is None:
            roles = np.zeros(n, np.int8)
        return cls(nbr, kind, loop_arr, np.asarray(roles, np.int8), **meta)

    def validate(self) -> None:
        n = self.vertex_count
        if not (self.kind.shape == self.nbr.shape and self.loops.shape == (n,) and self.roles.shape == (n,)):
            raise GraphError("inconsistent array shapes")
        present = self.nbr != EMPTY
        if np.any(present & ~np.isin(self.kind, (EdgeKind.SINGLE, EdgeKind.DOUBLE))):
            raise GraphError("edge kinds must be single or double")
        if present.any():
            vals = self.nbr[present]
            if vals.min() < 0 or vals.max() >= n:
                raise GraphError("neighbor id out of range")
        if np.any(self.roles > VertexRole.ROOT) or np.any(self.roles < 0):
            raise GraphError("unknown role tag")
        rows = np.broadcast_to(np.arange(n)[:, None], self.nbr.shape)
        if np.any(present & (self.nbr == rows)):
            raise GraphError("self-loops must be stored in the loop flags")
        deg = self.degrees()
        if n and deg.max() > MAX_DEGREE:
            v = int(np.argmax(deg))
            raise GraphError(f"vertex {v} has degree {int(deg[v])} > {MAX_DEGREE}")
        # symmetry: the multiset of (u, v, kind) equals that of (v, u, kind)
        u = rows[present].astype(np.int64)
        w = self.nbr[present].astype(np.int64)
        kd = self.kind[present].astype(np.int64)
        fwd = np.sort((u * n + w) * 3 + kd)
        bwd = np.sort((w * n + u) * 3 + kd)
        if not np.array_equal(fwd, bwd):
            bad = np.setdiff1d(fwd, bwd)
            code = int(bad[0]) if bad.size else int(fwd[0])
            a, b = divmod(code // 3, n)
            raise GraphError(f"asymmetric edge {a}-{b}")

    def degrees(self, ignore: Ignore = Ignore.NONE) -> np.ndarray:
        weight = np.zeros((self.vertex_count, SLOTS), np.int64)
        if not ignore & Ignore.SINGLE:
            weight += self.kind == EdgeKind.SINGLE
        if not ignore & Ignore.DOUBLE:
            weight += 2 * (self.kind == EdgeKind.DOUBLE)
        deg = weight.sum(axis=1)
        if not ignore & Ignore.LOOP:
            deg = deg + self.loops
        return deg

    def neighbors(self, v: int, ignore: Ignore = Ignore.NONE) -> list[tuple[int, EdgeKind]]:
        self._check(v)
        out = []
        for w, kd in zip(self.nbr[v], self.kind[v]):
            if w == EMPTY:
                continue
            kd = EdgeKind(int(kd))
            if kd is EdgeKind.SINGLE and ignore & Ignore.SINGLE:
                continue
            if kd is EdgeKind.DOUBLE and ignore & Ignore.DOUBLE:
                continue
            out.append((int(w), kd))
        return out

    def role(self, v: int) -> VertexRole:
        self._check(v)
        return VertexRole(int(self.roles[v]))

    def _check(self, v) -> None:
        if not (0 <= int(v) < self.vertex_count):
            raise GraphError(f"vertex {v} out of range [0, {self.vertex_count})")

    def canonical(self) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor table sorted ascending per row (empty slots last)."""
        key = np.where(self.nbr == EMPTY, np.iinfo(np.int64).max, self.nbr.astype(np.int64))
        order = np.argsort(key, axis=1, kind="stable")
        return np.take_along_axis(self.nbr, order, 1), np.take_along_axis(self.kind, order, 1)

    def same_structure(self, other: "MultiGraph") -> bool:
        if self.vertex_count != other.vertex_count:
            return False
        a_n, a_k = self.canonical()
        b_n, b_k = other.canonical()
        return (np.array_equal(a_n, b_n) and np.array_equal(a_k, b_k)
                and np.array_equal(self.loops, other.loops) and np.array_equal(self.roles, other.roles))

    def edge_set(self, kinds=(EdgeKind.SINGLE, EdgeKind.DOUBLE)) -> set[tuple[int, int, int]]:
        """Undirected edges as ``(min, max, kind)`` triples (loops excluded)."""
        rows = np.broadcast_to(np.arange(self.vertex_count)[:, None], self.nbr.shape)
        mask = (self.nbr > rows) & np.isin(self.kind, [int(x) for x in kinds])
        return set(zip(rows[mask].tolist(), self.nbr[mask].tolist(), self.kind[mask].tolist()))

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.vertex_count}, k={self.k}, variant={self.variant!r})"


def degree(g: MultiGraph, v: int, ignore: Ignore = Ignore.NONE) -> int:
    """Degree of ``v`` with multiplicity, leaving out the edge classes in ``ignore``."""
    g._check(v)
    total = 0
    for w, kd in zip(g.nbr[v], g.kind[v]):
        if w == EMPTY:
            continue
        if kd == EdgeKind.SINGLE and not ignore & Ignore.SINGLE:
            total += 1
        elif kd == EdgeKind.DOUBLE and not ignore & Ignore.DOUBLE:
            total += 2
    if g.loops[v] and not ignore & Ignore.LOOP:
        total += 1
    return total


@dataclass
class OracleHandle:
    """Label-obfuscated, query-counted adjacency-list access to a graph.

    Public labels are a uniform permutation of ``range(n)``; each vertex's
    neighbor list is presented in a fixed random order. Both are drawn once
    from ``seed``. Every call to :meth:`query` costs one query.
    """

    graph: MultiGraph
    seed: int = 0
    label_of: np.ndarray = field(init=False, repr=False)
    vertex_of: np.ndarray = field(init=False, repr=False)
    query_counter: int = field(default=0, init=False)

    def __post_init__(self):
        n = self.graph.vertex_count
        self.vertex_of = stream(self.seed, "oracle", "labels").permutation(n)
        self.label_of = np.empty(n, np.int64)
        self.label_of[self.vertex_of] = np.arange(n)
        self._order_key = child_seed(self.seed, "oracle", "order")

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def fork(self) -> "OracleHandle":
        """Same instance, labels and orders; independent counter."""
        twin = copy.copy(self)
        twin.query_counter = 0
        return twin

    def _vertex(self, label) -> int:
        if not (0 <= int(label) < self.vertex_count):
            raise GraphError(f"unknown label {label}")
        return int(self.vertex_of[int(label)])

    def answer(self, label: int) -> QueryAnswer:
        """The answer :meth:`query` would give, without charging a query."""
        v = self._vertex(label)
        g = self.graph
        entries = [(int(self.label_of[w]), EdgeKind(int(kd)))
                   for w, kd in zip(g.nbr[v], g.kind[v]) if w != EMPTY]
        if g.loops[v]:
            entries.append((int(label), EdgeKind.SINGLE))
        perm = hashed_permutation(self._order_key ^ (v * 0x9E3779B97F4A7C15), len(entries))
        return QueryAnswer(VertexRole(int(g.roles[v])), bool(g.loops[v]), tuple(entries[i] for i in perm))

    def query(self, label: int) -> QueryAnswer:
        ans = self.answer(label)
        self.query_counter += 1
        return ans

    def random_vertex(self, rng: np.random.Generator) -> int:
        if self.vertex_count == 0:
            raise GraphError("empty instance")
        return int(rng.integers(self.vertex_count))

    def label(self, vertex: int) -> int:
        return int(self.label_of[vertex])
