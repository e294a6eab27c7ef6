"""Lazily sampled instances for adversary experiments at large k.

Every random object is a uniform bijection drawn on demand: the image of an
element is uniform among the still-unassigned ones, which is exactly the
conditional law of a uniform permutation given what has been revealed.
Vertex ids follow the eager layout of :mod:`weldlab.generators`.
"""

from __future__ import annotations

import numpy as np

from .generators import Variant, loop_class_sizes, tree_size, weld_parity
from .graph import EdgeKind, VertexRole


class LazyBijection:
    """Uniform random bijection of ``range(size)`` revealed point by point."""

    def __init__(self, size: int, rng: np.random.Generator):
        self.size = int(size)
        self.rng = rng
        self.fwd: dict[int, int] = {}
        self.bwd: dict[int, int] = {}

    def _fresh(self, taken: dict) -> int:
        if len(taken) >= self.size:
            raise RuntimeError("bijection exhausted")
        if 2 * len(taken) < self.size:
            while True:
                y = int(self.rng.integers(self.size))
                if y not in taken:
                    return y
        free = np.setdiff1d(np.arange(self.size), np.fromiter(taken, np.int64, len(taken)))
        return int(free[self.rng.integers(len(free))])

    def forward(self, x: int) -> int:
        y = self.fwd.get(x)
        if y is None:
            y = self._fresh(self.bwd)
            self.fwd[x], self.bwd[y] = y, x
        return y

    def forward_many(self, xs) -> list[int]:
        """``[forward(x) for x in xs]``, drawing fresh images in one batch.

        Candidates are consumed in draw order with repeats and taken values
        skipped, which is sequential rejection sampling done in bulk.
        """
        xs = list(xs)
        fwd = self.fwd
        need = list(dict.fromkeys(x for x in xs if x not in fwd))
        if need and 4 * (len(self.bwd) + len(need)) < self.size:
            picked: list[int] = []
            while len(picked) < len(need):
                m = len(need) - len(picked)
                cand = self.rng.integers(self.size, size=2 * m + 8)
                _, first = np.unique(cand, return_index=True)
                cand = cand[np.sort(first)].tolist()
                bwd = self.bwd
                chosen = set(picked)
                picked += [y for y in cand if y not in bwd and y not in chosen][:m]
            for x, y in zip(need, picked):
                fwd[x] = y
                self.bwd[y] = x
        return [fwd[x] if x in fwd else self.forward(x) for x in xs]

    def backward(self, y: int) -> int:
        x = self.bwd.get(y)
        if x is None:
            x = self._fresh(self.fwd)
            self.fwd[x], self.bwd[y] = y, x
        return x


class _LazyCycles:
    """Weld cycles of one pair (alternating) or one tree (self weld)."""

    def __init__(self, leaves: int, alternating: bool, rng: np.random.Generator):
        self.L = leaves
        self.alternating = alternating
        self.pos = [LazyBijection(leaves, rng), LazyBijection(leaves, rng)] if alternating else [LazyBijection(leaves, rng)]

    def neighbors(self, side: int, leaf: int) -> list[tuple[int, int]]:
        """Cycle neighbors of ``leaf`` as ``(side, leaf)`` pairs."""
        L = self.L
        if self.alternating:
            i = self.pos[side].forward(leaf)
            other = self.pos[1 - side]
            js = ((i - 1) % L, i) if side == 0 else (i, (i + 1) % L)
            return [(1 - side, other.backward(j)) for j in js]
        i = self.pos[0].forward(leaf)
        return [(side, self.pos[0].backward((i + d) % L)) for d in (-1, 1)]


class LazyInstance:
    """A G1/G2 instance whose structure and labels are drawn on demand.

    Labels are role-ranged: body labels occupy ``[0, NB)``, antenna labels
    ``[NB, NB + NA)`` and root labels the rest, each range uniformly
    permuted.
    """

    def __init__(self, k: int, variant: Variant | str, rng: np.random.Generator, convention: str = "odd-weld"):
        self.k = k
        self.variant = Variant(variant)
        self.rng = rng
        self.pairs = 2 * (2 ** k - 1)
        self.T = tree_size(k)
        self.half = 2 ** (k + 1) - 2          # non-root vertices per tree half
        trees = 2 * self.pairs
        self.n = trees * self.T
        self.NB = self.NA = trees * self.half
        self.NR = trees
        zero, one, two = loop_class_sizes(k, 1, convention)
        cls = np.empty(self.pairs, np.int64)
        order = rng.permutation(self.pairs)
        cls[order[:one]] = 1
        cls[order[one:one + two]] = 2
        cls[order[one + two:]] = 0
        self.pair_class = cls
        side = rng.integers(0, 2, self.pairs)
        self.loop = np.zeros((self.pairs, 2), bool)
        self.loop[cls == 2] = True
        ones = np.flatnonzero(cls == 1)
        self.loop[ones, side[ones]] = True
        wp = weld_parity(convention)
        weld_class = (cls % 2) == wp
        self.class_pairs = [np.flatnonzero(~weld_class), np.flatnonzero(weld_class)]   # 0 interior, 1 weld
        self.class_rank = np.empty(self.pairs, np.int64)
        for members in self.class_pairs:
            self.class_rank[members] = np.arange(len(members))
        self.pair_weld_class = weld_class
        self.adv = [LazyBijection(trees * (2 ** k - 2), rng), LazyBijection(trees * 2 ** k, rng)]
        self.cycles: dict[int, _LazyCycles] = {}
        self.labels = [LazyBijection(self.NB, rng), LazyBijection(self.NA, rng), LazyBijection(self.NR, rng)]
        self.offset = [0, self.NB, self.NB + self.NA]

    # ---------------------------------------------------------------- layout
    def decode(self, v: int) -> tuple[int, VertexRole, int]:
        """``(tree, role, heap)``; roots have heap 1."""
        tree, local = divmod(v, self.T)
        if local == 0:
            return tree, VertexRole.ROOT, 1
        if local <= self.half:
            return tree, VertexRole.ANTENNA, local + 1
        return tree, VertexRole.BODY, local - self.half + 1

    def encode(self, tree: int, role: VertexRole, heap: int) -> int:
        if heap == 1:
            return tree * self.T
        return tree * self.T + heap - 1 + (self.half if role == VertexRole.BODY else 0)

    def role(self, v: int) -> VertexRole:
        return self.decode(v)[1]

    def pair_of(self, v: int) -> int:
        return v // self.T // 2

    def has_loop(self, v: int) -> bool:
        tree, role, _ = self.decode(v)
        return role == VertexRole.ROOT and bool(self.loop[tree // 2, tree % 2])

    # ----------------------------------------------------------------- labels
    def role_of_label(self, label: int) -> VertexRole:
        if label < self.NB:
            return VertexRole.BODY
        if label < self.NB + self.NA:
            return VertexRole.ANTENNA
        return VertexRole.ROOT

    def _rank(self, v: int) -> tuple[int, int]:
        tree, role, heap = self.decode(v)
        if role == VertexRole.ROOT:
            return 2, tree
        return (0 if role == VertexRole.BODY else 1), tree * self.half + heap - 2

    def label(self, v: int) -> int:
        r, rank = self._rank(v)
        return self.offset[r] + self.labels[r].forward(rank)

    def vertex(self, label: int) -> int:
        role = self.role_of_label(label)
        r = {VertexRole.BODY: 0, VertexRole.ANTENNA: 1, VertexRole.ROOT: 2}[role]
        rank = self.labels[r].backward(label - self.offset[r])
        if r == 2:
            return rank * self.T
        tree, h = divmod(rank, self.half)
        return self.encode(tree, role, h + 2)

    # -------------------------------------------------------------- structure
    def _cycles(self, key: int) -> _LazyCycles:
        c = self.cycles.get(key)
        if c is None:
            c = _LazyCycles(2 ** self.k, self.variant is not Variant.G2, self.rng)
            self.cycles[key] = c
        return c

    def advice_partner(self, v: int) -> int | None:
        k = self.k
        tree, role, heap = self.decode(v)
        if role == VertexRole.ROOT:
            return None
        A = self.half
        if role == VertexRole.BODY:
            weld = heap >= 2 ** k
            idx = tree * 2 ** k + heap - 2 ** k if weld else tree * (2 ** k - 2) + heap - 2
            a = self.adv[int(weld)].forward(idx)
            rank, h = divmod(a, A)
            members = self.class_pairs[int(weld)]
            pair = int(members[rank // 2])
            return self.encode(2 * pair + rank % 2, VertexRole.ANTENNA, h + 2)
        pair = tree // 2
        weld = bool(self.pair_weld_class[pair])
        a = (2 * int(self.class_rank[pair]) + tree % 2) * A + heap - 2
        idx = self.adv[int(weld)].backward(a)
        if weld:
            t2, leaf = divmod(idx, 2 ** k)
            return self.encode(t2, VertexRole.BODY, leaf + 2 ** k)
        t2, h = divmod(idx, 2 ** k - 2)
        return self.encode(t2, VertexRole.BODY, h + 2)

    def neighbors(self, v: int) -> list[tuple[int, EdgeKind]]:
        k = self.k
        tree, role, heap = self.decode(v)
        out: list[tuple[int, EdgeKind]] = []
        if role == VertexRole.ROOT:
            for r in (VertexRole.ANTENNA, VertexRole.BODY):
                out += [(self.encode(tree, r, h), EdgeKind.SINGLE) for h in (2, 3)]
            return out
        out.append((self.encode(tree, role, heap // 2), EdgeKind.SINGLE))
        if heap < 2 ** k:
            out += [(self.encode(tree, role, h), EdgeKind.SINGLE) for h in (2 * heap, 2 * heap + 1)]
        elif role == VertexRole.BODY:
            pair, side = divmod(tree, 2)
            if self.variant is Variant.G2:
                nb = self._cycles(tree).neighbors(0, heap - 2 ** k)
                out += [(self.encode(tree, VertexRole.BODY, leaf + 2 ** k), EdgeKind.SINGLE) for _, leaf in nb]
            else:
                nb = self._cycles(pair).neighbors(side, heap - 2 ** k)
                out += [(self.encode(2 * pair + s, VertexRole.BODY, leaf + 2 ** k), EdgeKind.SINGLE) for s, leaf in nb]
        out.append((self.advice_partner(v), EdgeKind.DOUBLE))
        return out

    def half_antenna(self, v: int) -> tuple[int, np.ndarray, int]:
        """Half-antenna holding antenna vertex ``v``: ``(tree, heaps, depth)``.

        ``heaps[j - 1]`` is the instance heap index of position ``j`` in the
        half-antenna's own heap order, and ``depth`` is the depth of ``v``
        inside it (0 at the top).
        """
        tree, role, heap = self.decode(v)
        if role != VertexRole.ANTENNA:
            raise ValueError("half-antenna of a non-antenna vertex")
        depth = heap.bit_length() - 2
        top = heap >> depth
        j = np.arange(1, 2 ** self.k)
        d = np.floor(np.log2(j)).astype(np.int64)
        heaps = (top << d) + (j - (1 << d))
        return tree, heaps, depth

    def half_antenna_labels(self, v: int) -> tuple[list[int], int]:
        """Labels of ``v``'s half-antenna in its heap order, and ``v``'s depth."""
        tree, heaps, depth = self.half_antenna(v)
        ranks = (tree * self.half + heaps - 2).tolist()
        return [self.NB + y for y in self.labels[1].forward_many(ranks)], depth

class LazyWeldedTree:
    """Two depth-k binary trees joined at their leaves by a welded (alternating)
    or self-welded cycle structure, with uniformly permuted labels.

    Vertex id ``side * (2**(k+1) - 1) + heap - 1``; the roots are heap 1.
    """

    def __init__(self, k: int, self_weld: bool, rng: np.random.Generator):
        self.k = k
        self.self_weld = self_weld
        self.rng = rng
        self.size = 2 ** (k + 1) - 1
        self.n = 2 * self.size
        self.cycles = ([_LazyCycles(2 ** k, False, rng), _LazyCycles(2 ** k, False, rng)] if self_weld
                       else _LazyCycles(2 ** k, True, rng))
        self.labels = LazyBijection(self.n, rng)

    def vid(self, side: int, heap: int) -> int:
        return side * self.size + heap - 1

    def decode(self, v: int) -> tuple[int, int]:
        side, h = divmod(v, self.size)
        return side, h + 1

    def is_root(self, v: int) -> bool:
        return self.decode(v)[1] == 1

    def depth(self, v: int) -> int:
        return self.decode(v)[1].bit_length() - 1

    def neighbors(self, v: int) -> list[int]:
        k = self.k
        side, heap = self.decode(v)
        out = []
        if heap > 1:
            out.append(self.vid(side, heap // 2))
        if heap < 2 ** k:
            out += [self.vid(side, 2 * heap), self.vid(side, 2 * heap + 1)]
        else:
            leaf = heap - 2 ** k
            if self.self_weld:
                nb = self.cycles[side].neighbors(0, leaf)
                out += [self.vid(side, x + 2 ** k) for _, x in nb]
            else:
                out += [self.vid(s, x + 2 ** k) for s, x in self.cycles.neighbors(side, leaf)]
        return out

    def label(self, v: int) -> int:
        return self.labels.forward(v)

    def vertex(self, label: int) -> int:
        return self.labels.backward(label)
