"""Distance to bipartiteness and structural census.

The reduced graph keeps single edges only: double (advice) edges and
self-loops are dropped. Yes-instances reduce to bipartite graphs; the
self-welded variant does not. Exact bipartite distance is a max-cut
problem, so it is computed only for small components and bracketed by a
packing lower bound and a local-search upper bound elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .generators import (Instance, InstanceSpec, RoleCensus, Variant, build_instance, candy_size,
                         expected_census, tree_size, weld_parity)
from .graph import EMPTY, EdgeKind, GraphError, MultiGraph, VertexRole

EXACT_LIMIT = 30


class DomainError(ValueError):
    """Requested computation is outside its supported domain."""


# ------------------------------------------------------------------ reduction

def reduced_graph(g: MultiGraph) -> sp.csr_matrix:
    """Simple symmetric 0/1 adjacency of the single edges of ``g``."""
    n = g.vertex_count
    rows = np.broadcast_to(np.arange(n)[:, None], g.nbr.shape)
    mask = (g.kind == EdgeKind.SINGLE) & (g.nbr != EMPTY)
    r, c = rows[mask].astype(np.int64), g.nbr[mask].astype(np.int64)
    A = sp.csr_matrix((np.ones(len(r), np.int8), (r, c)), shape=(n, n))
    A.sum_duplicates()
    A.data[:] = 1
    return A


def _as_adjacency(g) -> sp.csr_matrix:
    if isinstance(g, MultiGraph):
        return reduced_graph(g)
    A = sp.csr_matrix(g)
    A = ((A + A.T) != 0).astype(np.int8)
    A.setdiag(0)
    A.eliminate_zeros()
    return A.tocsr()


# ------------------------------------------------------------------ 2-coloring

@dataclass
class Coloring:
    colors: np.ndarray


@dataclass
class OddCycle:
    witness: list[int]


def _bfs_forest(A: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    """Predecessors and depths of a BFS forest, one tree per component."""
    n = A.shape[0]
    _, comp = connected_components(A, directed=False)
    reps = np.unique(comp, return_index=True)[1]
    hub = sp.csr_matrix((np.ones(len(reps), np.int8), (np.full(len(reps), n), reps)), shape=(n + 1, n + 1))
    B = sp.bmat([[A, None], [None, sp.csr_matrix((1, 1), dtype=np.int8)]], format="csr") + hub
    _, pred = breadth_first_order(B, n, directed=False, return_predecessors=True)
    pred = pred.astype(np.int64)
    anc = np.where(pred < 0, n, pred)
    anc[n] = n
    depth = (anc != n).astype(np.int64)
    depth[n] = 0
    # pointer jumping
    while np.any(anc[anc] != anc):
        depth = depth + depth[anc]
        anc = anc[anc]
    pred = pred[:n]
    pred[reps] = -1
    return pred, depth[:n]


def _tree_cycle(pred: np.ndarray, depth: np.ndarray, u: int, v: int) -> list[int]:
    a, b = [u], [v]
    while depth[a[-1]] > depth[b[-1]]:
        a.append(int(pred[a[-1]]))
    while depth[b[-1]] > depth[a[-1]]:
        b.append(int(pred[b[-1]]))
    while a[-1] != b[-1]:
        a.append(int(pred[a[-1]]))
        b.append(int(pred[b[-1]]))
    return a + b[-2::-1]


def _conflicts(A: sp.csr_matrix, colors: np.ndarray) -> np.ndarray:
    U = sp.triu(A, 1).tocoo()
    bad = colors[U.row] == colors[U.col]
    return np.stack([U.row[bad], U.col[bad]], axis=1).astype(np.int64)


def two_color(g, candidates: int = 256) -> Coloring | OddCycle:
    """Proper 2-coloring by BFS layers, or the shortest odd cycle among the
    fundamental cycles of up to ``candidates`` conflicting edges."""
    A = _as_adjacency(g)
    if A.shape[0] == 0:
        return Coloring(np.zeros(0, np.int8))
    pred, depth = _bfs_forest(A)
    colors = (depth % 2).astype(np.int8)
    bad = _conflicts(A, colors)
    if not len(bad):
        return Coloring(colors)
    bad = bad[np.argsort(depth[bad[:, 0]], kind="stable")][:candidates]
    cycles = [_tree_cycle(pred, depth, int(u), int(v)) for u, v in bad]
    return OddCycle(min(cycles, key=len))


def is_odd_cycle(A: sp.csr_matrix, cycle: list[int]) -> bool:
    A = _as_adjacency(A)
    if len(cycle) % 2 == 0 or len(set(cycle)) != len(cycle):
        return False
    return all(A[cycle[i], cycle[(i + 1) % len(cycle)]] for i in range(len(cycle)))


# ------------------------------------------------------------- distance bounds

def odd_cycle_packing(g, max_rounds: int = 10_000) -> list[list[int]]:
    """Greedy edge-disjoint odd cycles: each round takes the fundamental odd
    cycles of one BFS forest, shortest first, and removes their edges."""
    A = _as_adjacency(g).tolil()
    packed: list[list[int]] = []
    for _ in range(max_rounds):
        C = A.tocsr()
        pred, depth = _bfs_forest(C)
        bad = _conflicts(C, (depth % 2).astype(np.int8))
        if not len(bad):
            break
        cycles = sorted((_tree_cycle(pred, depth, int(u), int(v)) for u, v in bad[:5000]), key=len)
        used: set[tuple[int, int]] = set()
        took = 0
        for cyc in cycles:
            es = [tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)]))) for i in range(len(cyc))]
            if any(e in used for e in es):
                continue
            used.update(es)
            packed.append(cyc)
            took += 1
        for a, b in used:
            A[a, b] = 0
            A[b, a] = 0
        if not took:
            break
    return packed


def monochromatic(A: sp.csr_matrix, colors: np.ndarray) -> int:
    U = sp.triu(A, 1).tocoo()
    return int(np.sum(colors[U.row] == colors[U.col]))


def local_search_cut(g, seed: int = 0, anneal_limit: int = 64, sweeps: int = 200) -> tuple[int, np.ndarray]:
    """Upper bound on the bipartite distance: BFS parity start, parallel
    improving flips, then simulated annealing on each component of at most
    ``anneal_limit`` vertices."""
    A = _as_adjacency(g).astype(np.int64)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    if n == 0:
        return 0, np.zeros(0, np.int8)
    _, depth = _bfs_forest(A)
    c = (depth % 2).astype(np.int64)
    deg = np.asarray(A.sum(axis=1)).ravel()
    while True:
        ones = A @ c
        same = np.where(c == 1, ones, deg - ones)
        gain = 2 * same - deg
        cand = gain > 0
        if not cand.any():
            break
        pr = np.where(cand, rng.random(n), -1.0)
        nb_max = np.asarray(A.multiply(pr[None, :]).max(axis=1).todense()).ravel()
        flip = cand & (pr > nb_max)
        c[flip] ^= 1
    if anneal_limit > 0:
        _, comp = connected_components(A, directed=False)
        order = np.argsort(comp, kind="stable")
        bounds = np.flatnonzero(np.diff(np.concatenate([[-1], comp[order], [-2]])))
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            verts = order[lo:hi]
            if 3 <= len(verts) <= anneal_limit:
                sub = A[verts][:, verts].tocsr()
                if monochromatic(sub, c[verts]):
                    c[verts] = _anneal(sub, c[verts].copy(), rng, sweeps)
    return monochromatic(A, c), c.astype(np.int8)


def _anneal(A: sp.csr_matrix, c: np.ndarray, rng: np.random.Generator, sweeps: int) -> np.ndarray:
    """Metropolis single flips on a geometric cooling schedule; keeps the best state."""
    indptr, indices = A.indptr, A.indices
    nbrs = [indices[indptr[v]:indptr[v + 1]] for v in range(A.shape[0])]
    best = cur = monochromatic(A, c)
    best_c = c.copy()
    for T in np.geomspace(2.0, 0.05, sweeps):
        for v in rng.permutation(A.shape[0]):
            nb = nbrs[v]
            delta = len(nb) - 2 * int(np.sum(c[nb] == c[v]))
            if delta <= 0 or rng.random() < np.exp(-delta / T):
                c[v] ^= 1
                cur += delta
                if cur < best:
                    best, best_c = cur, c.copy()
                    if best == 0:
                        return best_c
    return best_c


def exact_distance(g, limit: int = EXACT_LIMIT) -> int:
    """Minimum edges to delete for bipartiteness, by branch and bound per
    component. Components above ``limit`` vertices raise DomainError."""
    A = _as_adjacency(g)
    ncomp, comp = connected_components(A, directed=False)
    sizes = np.bincount(comp, minlength=ncomp)
    if len(sizes) and sizes.max() > limit:
        raise DomainError(f"exact distance limited to components of at most {limit} vertices, "
                          f"found {int(sizes.max())}")
    total = 0
    for ci in range(ncomp):
        verts = np.flatnonzero(comp == ci)
        if len(verts) < 3:
            continue
        sub = A[verts][:, verts]
        order = breadth_first_order(sub, 0, directed=False, return_predecessors=False)
        pos = np.empty(len(verts), np.int64)
        pos[order] = np.arange(len(verts))
        back = [[int(pos[w]) for w in sub.indices[sub.indptr[v]:sub.indptr[v + 1]] if pos[w] < pos[v]]
                for v in order]
        best = [local_search_cut(sub, anneal_limit=0)[0]]
        colors = [0] * len(verts)

        def branch(i: int, cost: int) -> None:
            if cost >= best[0]:
                return
            if i == len(back):
                best[0] = cost
                return
            for col in (0, 1) if i else (0,):
                colors[i] = col
                branch(i + 1, cost + sum(1 for j in back[i] if colors[j] == col))

        branch(0, 0)
        total += best[0]
    return total


@dataclass
class DistanceReport:
    is_bipartite: bool
    odd_cycle_witness: list[int] | None
    lower_bound: int | None
    upper_bound: int | None
    exact: int | None = None

    def __post_init__(self):
        lb, ub, ex = self.lower_bound, self.upper_bound, self.exact
        if lb is not None and ub is not None and lb > ub:
            raise AssertionError(f"packing bound {lb} exceeds cut bound {ub}")
        if ex is not None and ((lb is not None and ex < lb) or (ub is not None and ex > ub)):
            raise AssertionError(f"exact {ex} outside [{lb}, {ub}]")
        if self.is_bipartite != (self.odd_cycle_witness is None):
            raise AssertionError("bipartite flag disagrees with the witness")


MODES = {"lb": "lb", "packing_lb": "lb", "ub": "ub", "localsearch_ub": "ub", "exact": "exact",
         "exact_small": "exact"}


def bipartite_distance(g, mode: str = "lb", seed: int = 0) -> DistanceReport:
    try:
        mode = MODES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}") from None
    A = _as_adjacency(g)
    col = two_color(A)
    witness = col.witness if isinstance(col, OddCycle) else None
    if witness is None:
        return DistanceReport(True, None, 0, 0, 0 if mode == "exact" else None)
    exact = exact_distance(A) if mode == "exact" else None
    lb = len(odd_cycle_packing(A)) if mode in ("lb", "exact") else None
    ub = local_search_cut(A, seed)[0] if mode in ("ub", "exact") else None
    return DistanceReport(False, witness, lb, ub, exact)


def weld_subgraph(instance: Instance, tree: int) -> tuple[sp.csr_matrix, np.ndarray]:
    """Induced single-edge subgraph on one tree's body leaves and their parents."""
    k = instance.k
    T = tree_size(k)
    heaps = np.arange(2 ** (k - 1), 2 ** (k + 1))
    ids = tree * T + heaps - 1 + 2 ** (k + 1) - 2
    A = reduced_graph(instance.graph)
    return A[ids][:, ids].tocsr(), ids


# --------------------------------------------------------------------- census

@dataclass
class CensusReport:
    census: RoleCensus
    expected: RoleCensus
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def rows(self) -> list[tuple[str, object, object]]:
        """(field, observed, expected) with tuples joined by ``;``."""
        out = []
        for name in _FIELDS:
            obs, exp = getattr(self.census, name), getattr(self.expected, name)
            if isinstance(obs, tuple):
                obs = ";".join(map(str, obs))
            if isinstance(exp, tuple):
                exp = ";".join(map(str, exp))
            out.append((name, obs, exp))
        return out


_FIELDS = {
    "vertices": "instance size",
    "candy_vertices": "candy size",
    "roots": "root count",
    "weld": "weld count",
    "interior": "interior count",
    "antenna": "antenna count",
    "weld_antenna_matches": "weld/antenna matching",
    "interior_antenna_matches": "interior/antenna matching",
    "loop_classes": "self-loop classes",
    "loops": "self-loop total",
}


def structural_census(source: Instance | MultiGraph, k: int | None = None,
                      convention: str | None = None) -> CensusReport:
    """Recount roles, matchings and loop classes and compare with the closed forms.

    Pair and tree membership come from the generator's id layout; every
    structural count is then taken from the raw adjacency.
    """
    if isinstance(source, Instance):
        g, k = source.graph, source.k
        convention = convention or source.spec.advice_convention
    else:
        g = source
        k = k or g.k
    convention = convention or "odd-weld"
    n = g.vertex_count
    if n == 0:
        zero = RoleCensus(0, 0, 0, 0, 0, (), (0, 0, 0), 0, 0, 0)
        return CensusReport(zero, zero)
    if not k:
        raise GraphError("census needs k")
    T, C = tree_size(k), candy_size(k)
    half = 2 ** (k + 1) - 2
    pairs = n // C
    j = max(1, pairs // (2 * (2 ** k - 1)))
    expected = expected_census(k, j, Variant.G1, convention)
    failures: list[str] = []

    roles = g.roles
    trees = n // T
    tpl_role = np.full(T, VertexRole.BODY, np.int8)
    tpl_role[0] = VertexRole.ROOT
    tpl_role[1:half + 1] = VertexRole.ANTENNA
    if n % C or not np.array_equal(roles, np.tile(tpl_role, trees)):
        failures.append("layout")
    # local body heap h sits at local id h - 1 + half; leaves have h >= 2^k
    tpl_leaf = np.zeros(T, bool)
    tpl_leaf[half + 2 ** k - 1:] = True
    leaf = np.tile(tpl_leaf, trees) & (roles == VertexRole.BODY)
    body = roles == VertexRole.BODY
    antenna = roles == VertexRole.ANTENNA

    def singles_of(idx):
        nb = g.nbr[idx].astype(np.int64)
        ok = (g.kind[idx] == EdgeKind.SINGLE) & (nb != EMPTY)
        return np.where(ok, nb, 0), ok

    # a weld vertex has exactly two single neighbors that are leaves of its own pair
    leaf_ids = np.flatnonzero(leaf)
    nb, ok = singles_of(leaf_ids)
    links = (ok & leaf[nb] & (nb // C == (leaf_ids // C)[:, None])).sum(axis=1)
    weld_ids = leaf_ids[links == 2]
    inner_ids = np.flatnonzero(body & ~leaf)
    nb, ok = singles_of(inner_ids)
    inner_ids = inner_ids[ok.sum(axis=1) == 3]

    flat = np.flatnonzero(g.kind.ravel() == EdgeKind.DOUBLE)
    owner = flat // g.nbr.shape[1]
    ndouble = np.bincount(owner, minlength=n)
    partner = np.full(n, -1, np.int64)
    partner[owner] = g.nbr.ravel()[flat]
    partner[ndouble != 1] = -1
    loop_ids = np.flatnonzero(g.loops)
    P = max(pairs, 1)
    pair_loops = np.bincount(np.minimum(loop_ids // C, P - 1), minlength=P)
    wp = weld_parity(convention)

    def matches(idx, want_parity):
        part = partner[idx]
        good = part >= 0
        part = np.where(good, part, 0)
        good &= antenna[part]
        par = pair_loops[np.minimum(part // C, P - 1)] % 2
        return int(np.sum(good & ((par == wp) == want_parity)))

    weld_matches = matches(weld_ids, True)
    interior_matches = matches(inner_ids, False)
    if np.any((body | antenna) & (ndouble != 1)):
        failures.append("advice matching is not perfect")
    classes = np.bincount(np.minimum(pair_loops, 3), minlength=4)
    census = RoleCensus(
        vertices=n,
        roots=int(np.sum(roles == VertexRole.ROOT)),
        weld=len(weld_ids),
        interior=len(inner_ids),
        antenna=int(antenna.sum()),
        candy_vertices=tuple(sorted(set(np.bincount(np.arange(n) // C).tolist()))),
        loop_classes=tuple(int(x) for x in classes[:3]) if classes[3] == 0 else (-1, -1, -1),
        weld_antenna_matches=weld_matches,
        interior_antenna_matches=interior_matches,
        loops=int(g.loops.sum()),
    )
    for name, label in _FIELDS.items():
        if getattr(census, name) != getattr(expected, name):
            failures.append(label)
    return CensusReport(census, expected, failures)


def edge_codes(g: MultiGraph) -> np.ndarray:
    """Sorted codes of undirected edges ``(min, max, kind)``."""
    n = g.vertex_count
    rows = np.broadcast_to(np.arange(n, dtype=np.int64)[:, None], g.nbr.shape)
    mask = (g.nbr != EMPTY) & (g.nbr > rows)
    return np.sort((rows[mask] * n + g.nbr[mask].astype(np.int64)) * 3 + g.kind[mask])


def symmetric_difference(a: MultiGraph, b: MultiGraph) -> int:
    if a.vertex_count != b.vertex_count:
        raise GraphError("graphs differ in size")
    return int(len(np.setxor1d(edge_codes(a), edge_codes(b), assume_unique=True)))


@dataclass
class SiblingDistance:
    k: int
    seed: int
    vertices: int
    differing_edges: int

    @property
    def ratio(self) -> float:
        return self.differing_edges / self.vertices


def sibling_distance(k: int, seed: int = 0, convention: str = "odd-weld") -> SiblingDistance:
    """Edge symmetric difference between a G2 instance and its G1 sibling
    (same seed, so identical loops and advice edges)."""
    g1 = build_instance(InstanceSpec(k, Variant.G1, seed=seed, advice_convention=convention)).graph
    g2 = build_instance(InstanceSpec(k, Variant.G2, seed=seed, advice_convention=convention)).graph
    return SiblingDistance(k, seed, g1.vertex_count, symmetric_difference(g1, g2))


__all__ = [
    "Coloring", "OddCycle", "DistanceReport", "CensusReport", "SiblingDistance", "DomainError",
    "reduced_graph", "two_color", "is_odd_cycle", "odd_cycle_packing", "local_search_cut",
    "exact_distance", "bipartite_distance", "weld_subgraph", "structural_census",
    "symmetric_difference", "sibling_distance", "monochromatic",
]
