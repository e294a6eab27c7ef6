"""Weld marking with a simulated quantum walk.

For a vertex ``v`` of a yes-instance:

1. scan single-edge non-backtracking walks of length k for an antenna leaf
   (total degree 3); if one is seen, ``v`` is not a weld vertex;
2. cross ``v``'s double edge to an antenna vertex and run FindRootPath
   (double edges and loops ignored) to its root ``r_a``;
3. find the paired root ``r_b`` with the welded-tree walk and compare
   self-loop parity.

Step 3 is simulated exactly on the body component of ``r_a``. Its query
cost is modeled by :func:`weldlab.qwalk.walk_cost`; the classical steps
are charged per logical query.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .generators import weld_parity
from .graph import EdgeKind, GraphError, OracleHandle, VertexRole
from .nbwalk import ROOT, Rejected, find_parent, find_root_path, nb_walk
from .qwalk import evolve, sweep, walk_cost
from .rng import child_seed

EXIT_THRESHOLD = 1e-12


class MalformedInstance(GraphError):
    """The input is not a yes-instance, so the marking procedure has no answer."""


class LeafScan(enum.Enum):
    NOT_IN_W = "NotInW"
    BODY_NON_ROOT = "BodyNonRoot"


@dataclass(frozen=True)
class _Entry:
    role: VertexRole
    loop: bool
    singles: tuple[int, ...]
    doubles: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.singles) + 2 * len(self.doubles) + int(self.loop)


class _View:
    """Cached oracle answers; every logical query is charged once."""

    def __init__(self, oracle: OracleHandle):
        self.oracle = oracle
        self.cache: dict[int, _Entry] = {}
        self.charged = 0

    def _entry(self, label: int, charge: bool) -> _Entry:
        if charge:
            self.charged += 1
        e = self.cache.get(label)
        if e is None:
            ans = self.oracle.query(label) if charge else self.oracle.answer(label)
            e = _Entry(ans.role, ans.loop,
                       tuple(w for w, kd in ans.neighbors if kd is EdgeKind.SINGLE and w != label),
                       tuple(w for w, kd in ans.neighbors if kd is EdgeKind.DOUBLE))
            self.cache[label] = e
        return e

    def query(self, label: int) -> _Entry:
        return self._entry(label, True)

    def peek(self, label: int) -> _Entry:
        """Simulation bookkeeping; not charged."""
        return self._entry(label, False)

    def singles(self, label: int) -> tuple[int, ...]:
        return self.query(label).singles


def _scan(view: _View, v: int, k: int, rng: random.Random) -> LeafScan:
    e = view.query(v)
    if e.role == VertexRole.ROOT:
        return LeafScan.NOT_IN_W
    if e.degree == 3:
        return LeafScan.NOT_IN_W
    for w in e.singles:
        prev, cur = v, w
        for _ in range(k):
            here = view.query(cur)
            if here.degree == 3:
                return LeafScan.NOT_IN_W
            options = [x for x in here.singles if x != prev]
            if not options:
                break
            prev, cur = cur, options[rng.randrange(len(options))]
    return LeafScan.BODY_NON_ROOT


def leaf_scan(oracle: OracleHandle, v: int, k: int, rng: random.Random | None = None) -> LeafScan:
    return _scan(_View(oracle), v, k, rng or random.Random(0))


@dataclass(frozen=True)
class Component:
    labels: np.ndarray
    adjacency: sp.csr_matrix
    roles: np.ndarray
    start: int


def _probe_is_antenna(view: _View, root: int, first: int, k: int, rng: random.Random) -> bool:
    path = nb_walk(lambda x: view.peek(x).singles, root, first, k, rng)
    end = view.peek(path[-1]).singles
    if len(path) == k + 1 and len(end) == 1:
        return True
    if len(path) == k + 1 and len(end) == 3:
        return False
    raise MalformedInstance(f"probe from root {root} found neither a leaf nor a weld vertex")


def _component(view: _View, root: int, k: int, rng: random.Random) -> Component:
    index = {root: 0}
    order = [root]
    edges = []
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        e = view.peek(x)
        nbrs = e.singles
        if len(nbrs) >= 4:
            nbrs = tuple(w for w in nbrs if not _probe_is_antenna(view, x, w, k, rng))
        for w in nbrs:
            if w not in index:
                index[w] = len(order)
                order.append(w)
            edges.append((index[x], index[w]))
    n = len(order)
    e = np.array(edges, np.int64).reshape(-1, 2)
    A = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    # severed antenna edges are dropped from both sides
    A = A.minimum(A.T).tocsr()
    roles = np.array([view.peek(x).role for x in order], np.int8)
    return Component(np.array(order, np.int64), A, roles, 0)


def build_modified_component(oracle: OracleHandle, root: int, k: int,
                             rng: random.Random | None = None) -> Component:
    view = _View(oracle)
    if view.peek(root).role != VertexRole.ROOT:
        raise GraphError(f"label {root} is not a root")
    return _component(view, root, k, rng or random.Random(0))


def _exit(comp: Component, k: int) -> int:
    if int((comp.roles == VertexRole.ROOT).sum()) != 2:
        raise MalformedInstance("component does not contain exactly two roots")
    psi0 = np.zeros(comp.adjacency.shape[0], complex)
    psi0[comp.start] = 1.0
    prob = np.abs(evolve(comp.adjacency, sweep(k).t_half, psi0)) ** 2
    hits = np.flatnonzero((comp.roles == VertexRole.ROOT) & (prob > EXIT_THRESHOLD))
    hits = hits[hits != comp.start]
    if len(hits) != 1:
        raise MalformedInstance("walk did not single out a paired root")
    return int(comp.labels[hits[0]])


def find_exit(oracle: OracleHandle, root: int, k: int, rng: random.Random | None = None) -> int:
    return _exit(build_modified_component(oracle, root, k, rng), k)


@dataclass
class MarkResult:
    bit: int
    classical_queries: int
    quantum_queries: int
    malformed: str | None = None


class AdviceMap:
    """Memoized weld marking over one oracle; usable as a tester advice source."""

    def __init__(self, oracle: OracleHandle, k: int, seed: int = 0, convention: str = "odd-weld"):
        self.oracle = oracle.fork()
        self.k = k
        self.convention = convention
        self.view = _View(self.oracle)
        self.rng = random.Random(child_seed(seed, "marker"))
        self.bits: dict[int, int] = {}
        self.evaluations = 0
        self.modeled_quantum_queries = 0
        self.malformed = 0
        self._parent: dict[int, tuple[object, int]] = {}
        self._exits: dict[int, int | MalformedInstance] = {}

    @property
    def classical_queries(self) -> int:
        return self.view.charged

    def _find_parent(self, x: int):
        hit = self._parent.get(x)
        if hit is not None:
            self.view.charged += hit[1]
            return hit[0]
        before = self.view.charged
        res = find_parent(self.view.singles, x, self.k, self.rng, strict=False)
        self._parent[x] = (res, self.view.charged - before)
        return res

    def _paired_root(self, r: int) -> int:
        if r not in self._exits:
            try:
                comp = _component(self.view, r, self.k, self.rng)
                self._exits[r] = _exit(comp, self.k)
            except MalformedInstance as err:
                self._exits[r] = err
        out = self._exits[r]
        if isinstance(out, MalformedInstance):
            raise out
        return out

    def classify(self, label: int) -> MarkResult:
        c0, q0 = self.view.charged, self.modeled_quantum_queries
        try:
            bit = self._classify(label)
            flag = None
        except MalformedInstance as err:
            bit, flag = 0, str(err)
            self.malformed += 1
        return MarkResult(bit, self.view.charged - c0, self.modeled_quantum_queries - q0, flag)

    def _classify(self, label: int) -> int:
        k = self.k
        if _scan(self.view, label, k, self.rng) is LeafScan.NOT_IN_W:
            return 0
        doubles = self.view.query(label).doubles
        if len(doubles) != 1:
            raise MalformedInstance("body vertex without a unique double edge")
        path = find_root_path(self.view.singles, doubles[0], k, self.rng, strict=False,
                              parent=self._find_parent)
        if isinstance(path, Rejected):
            raise MalformedInstance(f"FindRootPath rejected: {path.reason.value}")
        r_a = path[-1]
        self.modeled_quantum_queries += walk_cost(k)
        r_b = self._paired_root(r_a)
        loops = int(self.view.query(r_a).loop) + int(self.view.query(r_b).loop)
        return int(loops % 2 == weld_parity(self.convention))

    def mark(self, label: int) -> int:
        self.evaluations += 1
        if label not in self.bits:
            self.bits[label] = self.classify(label).bit
        return self.bits[label]


def classify_vertex(oracle: OracleHandle, v: int, k: int, seed: int = 0,
                    convention: str = "odd-weld") -> MarkResult:
    return AdviceMap(oracle, k, seed, convention).classify(v)
