"""Yes-instances (candy ensembles) and hard no-instances (double bow-ties).

Vertex ids are laid out tree by tree: a root-joined tree occupies ``T =
2**(k+2) - 3`` consecutive ids, local id 0 is the root, local ids
``1 .. 2**(k+1)-2`` are antenna heap nodes ``2 .. 2**(k+1)-1`` and the
rest are body heap nodes. Trees ``2p`` and ``2p+1`` form pair ``p``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .advice import TableAdvice
from .graph import EMPTY, SLOTS, EdgeKind, GraphError, MultiGraph, OracleHandle, VertexRole
from .rng import stream


class Variant(str, enum.Enum):
    G1 = "g1"
    G2 = "g2"
    YES = "yes"


class WeldMode(str, enum.Enum):
    ALTERNATING = "alternating"
    SELF = "self"


CONVENTIONS = ("odd-weld", "even-weld")


@dataclass(frozen=True)
class InstanceSpec:
    k: int
    variant: Variant = Variant.G1
    j: int = 1
    seed: int = 0
    single_long_weld: bool = True
    advice_convention: str = "odd-weld"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.k < 2:
            raise GraphError("instances need k >= 2 (shorter welds would be parallel edges)")
        if self.j < 1:
            raise GraphError("multiplicity j must be positive")
        if self.variant is not Variant.YES and self.j != 1:
            raise GraphError("G1/G2 fix j = 1")
        if self.advice_convention not in CONVENTIONS:
            raise GraphError(f"unknown advice convention {self.advice_convention!r}")

    @property
    def pairs(self) -> int:
        return 2 * self.j * (2 ** self.k - 1)


def candy_size(k: int) -> int:
    return 2 ** (k + 3) - 6


def tree_size(k: int) -> int:
    return 2 ** (k + 2) - 3


def instance_size(k: int, j: int = 1) -> int:
    return 2 * j * (2 ** k - 1) * candy_size(k)


def loop_class_sizes(k: int, j: int = 1, convention: str = "odd-weld") -> tuple[int, int, int]:
    """Number of pairs with (0, 1, 2) self-loops."""
    if convention == "odd-weld":
        return j * (2 ** (k - 1) - 1), j * 2 ** k, j * (2 ** (k - 1) - 1)
    return j * 2 ** (k - 1), j * (2 ** k - 2), j * 2 ** (k - 1)


def weld_parity(convention: str = "odd-weld") -> int:
    """Loop-count parity of the candy whose antenna hosts a weld vertex's advice edge."""
    return 1 if convention == "odd-weld" else 0


@dataclass(frozen=True)
class RoleCensus:
    vertices: int
    roots: int
    weld: int
    interior: int
    antenna: int
    candy_vertices: tuple[int, ...] | None
    loop_classes: tuple[int, int, int] | None
    weld_antenna_matches: int | None
    interior_antenna_matches: int | None
    loops: int


def expected_census(k: int, j: int = 1, variant: Variant | str = Variant.G1,
                    convention: str = "odd-weld") -> RoleCensus:
    # G2 shares steps a-c with its G1 sibling, so the pair-level counts agree
    Variant(variant)
    pairs = 2 * j * (2 ** k - 1)
    classes = loop_class_sizes(k, j, convention)
    return RoleCensus(
        vertices=instance_size(k, j),
        roots=2 * pairs,
        weld=2 * pairs * 2 ** k,
        interior=2 * pairs * (2 ** k - 2),
        antenna=2 * pairs * (2 ** (k + 1) - 2),
        candy_vertices=(candy_size(k),),
        loop_classes=classes,
        weld_antenna_matches=2 * pairs * 2 ** k,
        interior_antenna_matches=2 * pairs * (2 ** k - 2),
        loops=classes[1] + 2 * classes[2],
    )


@dataclass(frozen=True)
class TreeTemplate:
    """A depth-k root-joined binary tree: antenna and body trees sharing a root."""

    k: int
    nbr: np.ndarray = field(repr=False)        # (T, SLOTS) local ids, slot 0 parent
    roles: np.ndarray = field(repr=False)
    heap: np.ndarray = field(repr=False)       # heap index within its tree, root = 1
    depth: np.ndarray = field(repr=False)
    weld_candidate: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.roles)

    @property
    def body_leaves(self) -> np.ndarray:
        return np.flatnonzero(self.weld_candidate)

    def graph(self) -> MultiGraph:
        kind = np.where(self.nbr != EMPTY, EdgeKind.SINGLE, 0).astype(np.int8)
        return MultiGraph(self.nbr, kind, np.zeros(self.size, bool), self.roles, k=self.k)


def make_root_joined_tree(k: int) -> TreeTemplate:
    if k < 1:
        raise GraphError("root-joined trees need depth k >= 1")
    half = 2 ** (k + 1) - 2                     # non-root nodes per tree
    size = 1 + 2 * half
    heaps = np.arange(2, 2 ** (k + 1))

    def local(tree: int, h):                    # tree 0 = antenna, 1 = body
        h = np.asarray(h)
        return np.where(h == 1, 0, h - 1 + tree * half)

    nbr = np.full((size, SLOTS), EMPTY, np.int64)
    roles = np.empty(size, np.int8)
    heap = np.empty(size, np.int64)
    roles[0], heap[0] = VertexRole.ROOT, 1
    nbr[0, :4] = [local(0, 2), local(0, 3), local(1, 2), local(1, 3)]
    for tree, role in ((0, VertexRole.ANTENNA), (1, VertexRole.BODY)):
        ids = local(tree, heaps)
        roles[ids], heap[ids] = role, heaps
        nbr[ids, 0] = local(tree, heaps // 2)
        inner = heaps < 2 ** k
        nbr[ids[inner], 1] = local(tree, 2 * heaps[inner])
        nbr[ids[inner], 2] = local(tree, 2 * heaps[inner] + 1)
    depth = np.floor(np.log2(heap)).astype(np.int64)
    weld = (roles == VertexRole.BODY) & (depth == k)
    return TreeTemplate(k, nbr, roles, heap, depth, weld)


def _cycle_links(seqs: np.ndarray, block_starts: list[np.ndarray] | None = None):
    """Prev/next neighbor of every entry of each row of ``seqs`` viewed as a cycle.

    ``block_starts`` optionally splits row ``i`` into several cycles starting
    at the given positions.
    """
    rows, length = seqs.shape
    if block_starts is None:
        return np.roll(seqs, 1, axis=1), np.roll(seqs, -1, axis=1)
    prev = np.empty_like(seqs)
    nxt = np.empty_like(seqs)
    for i, starts in enumerate(block_starts):
        bounds = list(starts) + [length]
        for a, b in zip(bounds[:-1], bounds[1:]):
            block = seqs[i, a:b]
            prev[i, a:b] = np.roll(block, 1)
            nxt[i, a:b] = np.roll(block, -1)
    return prev, nxt


def _weld_links(leaves: np.ndarray, mode: WeldMode, rng: np.random.Generator,
                single_long_weld: bool = True):
    """Cycle neighbors for the weld leaves of every pair.

    ``leaves`` has shape (pairs, 2, L). Returns ``(ids, prev, next)`` flat
    arrays: the two cycle neighbors of each weld vertex.
    """
    pairs, _, length = leaves.shape
    shuffled = rng.permuted(leaves, axis=2)
    if mode is WeldMode.ALTERNATING:
        if length < 2:
            raise GraphError("alternating weld needs at least 2 leaves per side")
        seqs = np.stack([shuffled[:, 0], shuffled[:, 1]], axis=2).reshape(pairs, 2 * length)
        starts = None
        if not single_long_weld:
            starts = []
            for _ in range(pairs):
                cuts = [u for u in range(2, length - 1) if rng.random() < 0.25]
                kept, last = [0], 0
                for u in cuts:
                    if u - last >= 2:
                        kept.append(u)
                        last = u
                starts.append(np.array(kept) * 2)
        prev, nxt = _cycle_links(seqs, starts)
        return seqs.ravel(), prev.ravel(), nxt.ravel()
    if length < 3:
        raise GraphError("self weld on fewer than 3 leaves would create parallel edges")
    seqs = shuffled.reshape(pairs * 2, length)
    prev, nxt = _cycle_links(seqs)
    return seqs.ravel(), prev.ravel(), nxt.ravel()


def weld_pair(t1_leaves, t2_leaves, mode: WeldMode | str, rng: np.random.Generator) -> np.ndarray:
    """Weld edges joining two trees' body leaves, as an (E, 2) array."""
    a = np.asarray(t1_leaves)
    b = np.asarray(t2_leaves)
    if a.shape != b.shape:
        raise GraphError("leaf-count mismatch between the two trees")
    ids, _, nxt = _weld_links(np.stack([a, b])[None], WeldMode(mode), rng)
    return np.stack([ids, nxt], axis=1)


class LoopAssignment(NamedTuple):
    pair_class: np.ndarray      # loops per pair: 0, 1 or 2
    tree_loop: np.ndarray       # (pairs, 2) bool


def assign_self_loops(pairs: int, k: int, rng: np.random.Generator, j: int = 1,
                      convention: str = "odd-weld") -> LoopAssignment:
    zero, one, two = loop_class_sizes(k, j, convention)
    if pairs != zero + one + two:
        raise GraphError(f"expected {zero + one + two} pairs, got {pairs}")
    pair_class = np.empty(pairs, np.int64)
    order = rng.permutation(pairs)
    pair_class[order[:one]] = 1
    pair_class[order[one:one + two]] = 2
    pair_class[order[one + two:]] = 0
    side = rng.integers(0, 2, pairs)
    tree_loop = np.zeros((pairs, 2), bool)
    tree_loop[pair_class == 2] = True
    ones = np.flatnonzero(pair_class == 1)
    tree_loop[ones, side[ones]] = True
    return LoopAssignment(pair_class, tree_loop)


def assign_advice_edges(weld_ids, interior_ids, antenna_ids_by_pair, pair_class,
                        rng: np.random.Generator, convention: str = "odd-weld") -> np.ndarray:
    """Double edges along the two random bijections, as an (E, 2) array.

    ``antenna_ids_by_pair`` has shape (pairs, A). Weld vertices go to antennas
    of pairs whose loop parity equals :func:`weld_parity`, interior vertices
    to the others.
    """
    parity = weld_parity(convention)
    odd = (np.asarray(pair_class) % 2) == parity
    weld_targets = antenna_ids_by_pair[odd].ravel()
    interior_targets = antenna_ids_by_pair[~odd].ravel()
    if len(weld_targets) != len(weld_ids) or len(interior_targets) != len(interior_ids):
        raise AssertionError(
            f"advice bijection cardinality mismatch: weld {len(weld_ids)} vs {len(weld_targets)}, "
            f"interior {len(interior_ids)} vs {len(interior_targets)}")
    return np.concatenate([
        np.stack([weld_ids, rng.permutation(weld_targets)], axis=1),
        np.stack([interior_ids, rng.permutation(interior_targets)], axis=1),
    ])


@dataclass
class Instance:
    spec: InstanceSpec
    graph: MultiGraph
    is_weld: np.ndarray = field(repr=False)          # by vertex id
    loops: LoopAssignment = field(repr=False)
    _oracle: OracleHandle | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def oracle(self) -> OracleHandle:
        if self._oracle is None:
            self._oracle = OracleHandle(self.graph, seed=self.spec.seed)
        return self._oracle

    def truth(self, oracle: OracleHandle | None = None) -> TableAdvice:
        """Ground-truth weld marking keyed by public label."""
        o = oracle or self.oracle
        return TableAdvice(self.is_weld[o.vertex_of].astype(np.int8))

    def layout(self) -> "Layout":
        return Layout(self.k, self.spec.pairs)


@dataclass(frozen=True)
class Layout:
    """Decode vertex ids of a generated instance."""

    k: int
    pairs: int

    @property
    def tree_size(self) -> int:
        return tree_size(self.k)

    def tree_of(self, v):
        return np.asarray(v) // self.tree_size

    def pair_of(self, v):
        return self.tree_of(v) // 2

    def local(self, v):
        return np.asarray(v) % self.tree_size

    def root_of_tree(self, tree):
        return np.asarray(tree) * self.tree_size

    def body_local(self, heap):
        return np.asarray(heap) - 1 + 2 ** (self.k + 1) - 2


def build_instance(spec: InstanceSpec) -> Instance:
    """Assemble a full instance (steps a-d) without building its oracle."""
    k, pairs = spec.k, spec.pairs
    tpl = make_root_joined_tree(k)
    T = tpl.size
    trees = 2 * pairs
    n = trees * T
    dtype = np.int32 if n < 2 ** 31 - 1 else np.int64
    base = (np.arange(trees, dtype=np.int64) * T)

    # a. tile the template
    tpl_nbr = tpl.nbr.astype(dtype)
    nbr = np.where(tpl_nbr[None] >= 0, tpl_nbr[None] + base[:, None, None].astype(dtype), EMPTY)
    nbr = nbr.reshape(n, SLOTS)
    roles = np.tile(tpl.roles, trees)

    # b. self-loops
    loops = assign_self_loops(pairs, k, stream(spec.seed, "instance", "loops"), spec.j,
                              spec.advice_convention)
    loop_flags = np.zeros(n, bool)
    loop_flags[base[loops.tree_loop.ravel()]] = True

    # c. advice double edges, slot 3
    weld_local = tpl.body_leaves
    body_local = np.flatnonzero(tpl.roles == VertexRole.BODY)
    interior_local = body_local[~tpl.weld_candidate[body_local]]
    antenna_local = np.flatnonzero(tpl.roles == VertexRole.ANTENNA)
    weld_ids = (base[:, None] + weld_local[None]).ravel()
    interior_ids = (base[:, None] + interior_local[None]).ravel()
    antenna_by_pair = (base[:, None] + antenna_local[None]).reshape(pairs, 2 * len(antenna_local))
    doubles = assign_advice_edges(weld_ids, interior_ids, antenna_by_pair, loops.pair_class,
                                  stream(spec.seed, "instance", "advice"), spec.advice_convention)
    nbr[doubles[:, 0], 3] = doubles[:, 1]
    nbr[doubles[:, 1], 3] = doubles[:, 0]

    # d. weld cycles, slots 1 and 2 of each body leaf
    leaves = (base[:, None] + weld_local[None]).reshape(pairs, 2, len(weld_local))
    mode = WeldMode.SELF if spec.variant is Variant.G2 else WeldMode.ALTERNATING
    ids, prev, nxt = _weld_links(leaves, mode, stream(spec.seed, "instance", "weld"),
                                 spec.single_long_weld)
    nbr[ids, 1] = prev
    nbr[ids, 2] = nxt

    kind = np.where(nbr != EMPTY, np.int8(EdgeKind.SINGLE), np.int8(0)).astype(np.int8)
    nonroot = roles != VertexRole.ROOT
    kind[nonroot, 3] = np.where(nbr[nonroot, 3] != EMPTY, EdgeKind.DOUBLE, 0)
    graph = MultiGraph(nbr, kind, loop_flags, roles, k=k, variant=spec.variant.value, validate=False)
    is_weld = np.zeros(n, bool)
    is_weld[weld_ids] = True
    return Instance(spec, graph, is_weld, loops)


class Sample(NamedTuple):
    graph: MultiGraph
    oracle: OracleHandle
    truth: TableAdvice
    instance: Instance


def sample_instance(spec: InstanceSpec) -> Sample:
    inst = build_instance(spec)
    return Sample(inst.graph, inst.oracle, inst.truth(), inst)
