"""The classical tester with advice.

One :class:`TestContext` is one tester session over one oracle. Queried
labels get compact local ids; two filtered neighbor tables are kept per
loaded vertex:

* ``A``: single edges, minus edges joining two marked vertices (used by
  FindParent, FindRootPath and the consistency test);
* ``B``: all single edges (weld-consistency and completeness walks).

Double edges and self-loops are never walked.

Cost control. A literal run nests several 100-fold repetitions, which is
far too slow in Python. Within a session the engine therefore

* draws ``reps`` independent FindParent outcomes per vertex once, and lets
  run ``j`` of every FindRootPath use outcome ``j`` (so each test's runs
  stay independent, while different tests share samples);
* memoizes each vertex's consistency / weld-consistency verdicts and each
  root's completeness walks.

On intact instances every outcome is deterministic, so none of this
changes a verdict there.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .advice import AdviceSource
from .generators import candy_size, weld_parity
from .graph import EMPTY, SLOTS, EdgeKind, GraphError, OracleHandle, VertexRole
from .nbwalk import ROOT, Reason, Rejected, find_parent as _find_parent, find_root_path as _find_root_path
from .rng import child_seed, stream

REASONS = list(Reason)
BIG = 1 << 30
FP_ROOT = -1


def _code(reason: Reason) -> int:
    return REASONS.index(reason) + 1


def _reason(code: int) -> Reason | None:
    return None if code == 0 else REASONS[code - 1]


def _fp_code(reason: Reason) -> int:
    return -1 - _code(reason)


@dataclass
class TesterConfig:
    __test__ = False

    k: int
    eps: float = 0.1
    c1: float = 10.0
    c2: float = 10.0
    reps: int = 100
    convention: str = "odd-weld"

    def __post_init__(self):
        if self.k < 2:
            raise GraphError("tester needs k >= 2")
        if not 0 < self.eps < 1:
            raise GraphError("eps must lie in (0, 1)")
        if self.reps < 1 or self.c1 <= 0 or self.c2 <= 0:
            raise GraphError("repetition constants must be positive")

    @property
    def completeness_reps(self) -> int:
        return math.ceil(self.c1 * self.k / self.eps)

    @property
    def advice_tests(self) -> int:
        return math.ceil(self.c2 / self.eps)


@dataclass
class Verdict:
    accept: bool
    reason: Reason | None = None
    queries_used: int = 0
    advice_queries: int = 0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.accept != (self.reason is None):
            raise ValueError("reason must be None exactly when the verdict accepts")


class _Store:
    """Local-id tables for every label the session has touched."""

    def __init__(self, oracle: OracleHandle, advice: AdviceSource, reps: int):
        self.oracle = oracle
        self.advice = advice
        self.reps = reps
        self.index: dict[int, int] = {}
        self.n = 0
        self.advice_billed = 0
        self._alloc(256)

    def _alloc(self, cap: int) -> None:
        old = getattr(self, "cap", 0)
        self.cap = cap

        def grow(name, shape_tail, fill, dtype):
            arr = np.full((cap,) + shape_tail, fill, dtype)
            if old:
                arr[:old] = getattr(self, name)
            setattr(self, name, arr)

        grow("label", (), -1, np.int64)
        grow("loaded", (), False, bool)
        grow("mark", (), -1, np.int8)
        grow("loop", (), False, bool)
        grow("role", (), -1, np.int8)
        grow("nbrA", (SLOTS,), EMPTY, np.int64)
        grow("degA", (), 0, np.int64)
        grow("nbrB", (SLOTS,), EMPTY, np.int64)
        grow("degB", (), 0, np.int64)
        grow("mcount", (), 0, np.int64)
        grow("ndouble", (), 0, np.int64)
        grow("dbl", (), EMPTY, np.int64)
        grow("fp", (self.reps,), 0, np.int64)
        grow("fp_done", (), False, bool)

    def intern(self, label: int) -> int:
        i = self.index.get(label)
        if i is None:
            if self.n == self.cap:
                self._alloc(2 * self.cap)
            i = self.n
            self.n += 1
            self.index[label] = i
            self.label[i] = label
        return i

    def mark_of(self, i: int) -> int:
        if self.mark[i] < 0:
            self.mark[i] = self.advice.mark(int(self.label[i]))
            self.advice_billed += 1
        return int(self.mark[i])

    def load(self, i: int) -> None:
        label = int(self.label[i])
        ans = self.oracle.query(label)
        singles = [self.intern(w) for w, kd in ans.neighbors if kd is EdgeKind.SINGLE and w != label]
        doubles = [self.intern(w) for w, kd in ans.neighbors if kd is EdgeKind.DOUBLE]
        self.role[i] = ans.role
        self.loop[i] = ans.loop
        mine = self.mark_of(i)
        marks = [self.mark_of(w) for w in singles]
        a = [w for w, m in zip(singles, marks) if not (mine and m)]
        self.nbrB[i, :len(singles)] = singles[:SLOTS]
        self.degB[i] = len(singles)
        self.nbrA[i, :len(a)] = a[:SLOTS]
        self.degA[i] = len(a)
        self.mcount[i] = sum(marks)
        self.ndouble[i] = len(doubles)
        if doubles:
            self.dbl[i] = doubles[0]
        self.loaded[i] = True

    def ensure(self, ids) -> None:
        ids = np.asarray(ids).ravel()
        ids = ids[ids >= 0]
        if ids.size == 0:
            return
        todo = np.unique(ids)
        for i in todo[~self.loaded[todo]]:
            self.load(int(i))


@dataclass
class _Cons:
    code: int
    path: tuple[int, ...] = ()


@dataclass
class _RootBlock:
    code: int
    partner: int = -1
    branch_marked: dict = field(default_factory=dict)


class TestContext:
    """Tester session: oracle, advice source, parameters and randomness."""

    __test__ = False

    def __init__(self, oracle: OracleHandle, advice: AdviceSource, config: TesterConfig, seed: int = 0):
        self.oracle = oracle
        self.advice = advice
        self.config = config
        self.k = config.k
        self.reps = config.reps
        self.rng = stream(seed, "tester")
        self.py_rng = random.Random(child_seed(seed, "tester", "scalar"))
        self.store = _Store(oracle, advice, config.reps)
        self._cons: dict[int, _Cons] = {}
        self._wc: dict[int, int] = {}
        self._unmarked_branch: dict[tuple[int, int], int] = {}
        self._marked_branch: dict[tuple[int, int, int], int] = {}
        self._root: dict[tuple[int, bool], _RootBlock] = {}
        self._comp: dict[int, tuple] = {}

    # ----------------------------------------------------------------- walks
    def _step(self, table: np.ndarray, cur: np.ndarray, prev: np.ndarray) -> np.ndarray:
        cand = table[cur]
        ok = (cand != EMPTY) & (cand != prev[:, None])
        cnt = ok.sum(axis=1)
        u = (self.rng.random(len(cur)) * cnt).astype(np.int64)
        pick = (np.cumsum(ok, axis=1) > u[:, None]).argmax(axis=1)
        nxt = cand[np.arange(len(cur)), pick]
        nxt[cnt == 0] = EMPTY
        return nxt

    def _walk_b(self, start: np.ndarray, first: np.ndarray, steps: int) -> np.ndarray:
        """Trajectories ``(m, steps+1)`` over table B; ``-1`` after a dead end."""
        s = self.store
        traj = np.full((len(start), steps + 1), EMPTY, np.int64)
        traj[:, 0], traj[:, 1] = start, first
        prev, cur = start.copy(), first.copy()
        for t in range(1, steps):
            live = cur != EMPTY
            s.ensure(cur[live])
            nxt = np.full_like(cur, EMPTY)
            stop = np.zeros(len(cur), bool)
            stop[live] = s.degB[cur[live]] <= 1
            go = live & ~stop
            nxt[go] = self._step(s.nbrB, cur[go], prev[go])
            traj[:, t + 1] = nxt
            prev, cur = cur, nxt
        s.ensure(traj)
        return traj

    # ------------------------------------------------------------ FindParent
    def _ensure_fp(self, ids) -> None:
        s = self.store
        ids = np.unique(np.asarray(ids).ravel())
        ids = ids[ids >= 0]
        ids = ids[~s.fp_done[ids]]
        if ids.size == 0:
            return
        s.ensure(ids)
        deg = s.degA[ids]
        out = np.zeros((len(ids), self.reps), np.int64)
        out[deg == 4] = FP_ROOT
        out[~np.isin(deg, (1, 3, 4))] = _fp_code(Reason.BANNED_DEGREE)
        walk = (deg == 1) | (deg == 3)
        chunk = 1024
        for lo in range(0, int(walk.sum()), chunk):
            sel = np.flatnonzero(walk)[lo:lo + chunk]
            out[sel] = self._fp_walks(ids[sel])
        s.fp[ids] = out
        s.fp_done[ids] = True

    def _fp_walks(self, W: np.ndarray) -> np.ndarray:
        """``reps`` FindParent outcomes for each vertex of ``W`` (degree 1 or 3)."""
        s, k, R = self.store, self.k, self.reps
        nw = len(W)
        deg = s.degA[W]
        first = s.nbrA[W, :3]
        valid = np.arange(3)[None, :] < deg[:, None]
        shape = (nw, 3, R)
        wi, di, ri = np.nonzero(np.broadcast_to(valid[:, :, None], shape))
        prev = W[wi].copy()
        cur = first[wi, di].copy()
        m = len(cur)
        ell = np.full(m, 2 * k)
        stopped = np.zeros(m, bool)
        banned = np.full(m, BIG)
        r1, r2 = np.full(m, BIG), np.full(m, BIG)
        for t in range(1, 2 * k):
            act = np.flatnonzero(~stopped)
            if act.size == 0:
                break
            c = cur[act]
            s.ensure(c)
            dg = s.degA[c]
            hit = act[dg > 4]
            banned[hit] = t
            stopped[hit] = True
            leaf = act[dg == 1]
            ell[leaf] = t
            stopped[leaf] = True
            four = act[dg == 4]
            fresh = four[r1[four] == BIG]
            r1[fresh] = t
            again = four[r1[four] < t]
            r2[again] = np.minimum(r2[again], t)
            go = np.flatnonzero(~stopped)
            nxt = self._step(s.nbrA, cur[go], prev[go])
            prev[go], cur[go] = cur[go], nxt
        tail = np.flatnonzero(~stopped)
        s.ensure(cur[tail])
        noleaf = np.zeros(m, bool)
        noleaf[tail] = s.degA[cur[tail]] > 1

        def grid(x, fill):
            g = np.full(shape, fill, x.dtype)
            g[wi, di, ri] = x
            return g

        ell_g, ban_g, r1_g, r2_g, nl_g = (grid(ell, -1), grid(banned, BIG), grid(r1, BIG),
                                          grid(r2, BIG), grid(noleaf, False))
        result = np.zeros((nw, R), np.int64)
        decided = np.zeros((nw, R), bool)
        seen = np.zeros((nw, R), np.int64)
        root_dir = np.full((nw, R), -1)
        for d in range(3):
            vd = valid[:, d][:, None] & ~decided
            multi = np.where(seen >= 1, r1_g[:, d], r2_g[:, d])
            rej_b = vd & (ban_g[:, d] < multi)
            rej_m = vd & ~rej_b & (multi < BIG)
            rej_l = vd & ~rej_b & ~rej_m & nl_g[:, d]
            for mask, reason in ((rej_b, Reason.BANNED_DEGREE), (rej_m, Reason.MULTIPLE_ROOTS),
                                 (rej_l, Reason.NO_LEAF)):
                result[mask] = _fp_code(reason)
                decided |= mask
            has_root = vd & ~decided & (r1_g[:, d] < BIG)
            root_dir[has_root] = d
            seen += has_root
        # argmax with smallest-label tie-break
        labels = np.where(valid, s.label[np.maximum(first, 0)], np.iinfo(np.int64).max)
        best = np.zeros((nw, R), np.int64)
        for d in range(1, 3):
            better = valid[:, d][:, None] & ((ell_g[:, d] > np.take_along_axis(ell_g, best[:, None], 1)[:, 0])
                                             | ((ell_g[:, d] == np.take_along_axis(ell_g, best[:, None], 1)[:, 0])
                                                & (labels[:, d][:, None] < labels[np.arange(nw)[:, None], best])))
            best[better] = d
        three = (deg == 3)[:, None]
        others = np.sort(np.where(np.arange(3)[None, None, :] == best[:, :, None], -2,
                                  np.moveaxis(ell_g, 1, 2)), axis=2)[:, :, 1:]
        mismatch = three & (others[:, :, 0] != others[:, :, 1]) & ~decided
        result[mismatch] = _fp_code(Reason.LENGTH_MISMATCH)
        decided |= mismatch
        skip = ~decided & (seen > 0) & (root_dir != best)
        result[skip] = _fp_code(Reason.ROOT_SKIP)
        decided |= skip
        parent = first[np.arange(nw)[:, None], best]
        result[~decided] = parent[~decided]
        return result

    # ---------------------------------------------------------- consistency
    def _consistency(self, ids) -> None:
        s, k, R = self.store, self.k, self.reps
        ids = [int(i) for i in np.unique(np.asarray(ids).ravel()) if i >= 0 and int(i) not in self._cons]
        if not ids:
            return
        V = np.array(ids, np.int64)
        s.ensure(V)
        pre = (s.mark[V] == 1) & (s.degA[V] > 1)
        for v in V[pre]:
            self._cons[int(v)] = _Cons(_code(Reason.MARKED_NON_LEAF))
        V = V[~pre]
        if V.size == 0:
            return
        nv = len(V)
        paths = np.full((nv, R, k + 1), EMPTY, np.int64)
        paths[:, :, 0] = V[:, None]
        cur = np.repeat(V[:, None], R, axis=1)
        status = np.zeros((nv, R), np.int64)
        running = np.ones((nv, R), bool)
        ell = np.full((nv, R), k)
        reps = np.broadcast_to(np.arange(R)[None, :], (nv, R))
        for t in range(1, k + 1):
            if not running.any():
                break
            self._ensure_fp(cur[running])
            res = np.zeros((nv, R), np.int64)
            res[running] = s.fp[cur[running], reps[running]]
            root = running & (res == FP_ROOT)
            ell[root] = t - 1
            rej = running & (res < FP_ROOT)
            status[rej] = -1 - res[rej]
            running &= ~(root | rej)
            paths[running, t] = res[running]
            cur = np.where(running, res, cur)
        ok = status == 0
        end = np.take_along_axis(paths, ell[:, :, None], 2)[:, :, 0]
        s.ensure(end[ok])
        noroot = ok & (s.degA[np.maximum(end, 0)] != 4)
        status[noroot] = _code(Reason.NO_ROOT)
        ok &= ~noroot
        body = paths.copy()
        body[:, :, 0] = EMPTY
        pos = np.arange(k + 1)[None, None, :]
        body[pos > ell[:, :, None]] = EMPTY
        s.ensure(body)
        marked_on = ok & ((s.mark[np.maximum(body, 0)] == 1) & (body != EMPTY)).any(axis=2)
        status[marked_on] = _code(Reason.MARKED_ON_PATH)
        ok &= ~marked_on
        short = ok & (s.mark[V] == 1)[:, None] & (ell < k)
        status[short] = _code(Reason.SHORT_MARKED_PATH)
        masked = np.where(pos <= ell[:, :, None], paths, EMPTY)
        differs = (status == 0) & (masked != masked[:, :1]).any(axis=2)
        status[differs] = _code(Reason.PATH_DISAGREEMENT)
        for i, v in enumerate(V):
            bad = np.flatnonzero(status[i])
            if bad.size:
                self._cons[int(v)] = _Cons(int(status[i, bad[0]]))
            else:
                self._cons[int(v)] = _Cons(0, tuple(int(x) for x in paths[i, 0, :ell[i, 0] + 1]))

    def _cons_of(self, v: int) -> _Cons:
        self._consistency([v])
        return self._cons[v]

    # ------------------------------------------------------- weld-consistency
    def _weld_consistency(self, ids) -> None:
        s, k = self.store, self.k
        ids = [int(i) for i in np.unique(np.asarray(ids).ravel()) if i >= 0 and int(i) not in self._wc]
        if not ids:
            return
        self._consistency(ids)
        marked_nbrs = []
        for v in ids:
            c = self._cons[v]
            if c.code or len(c.path) - 1 < k or s.mark[v] != 1:
                continue
            nb = s.nbrB[v, :s.degB[v]]
            marked_nbrs.extend(int(w) for w in nb if s.mark[w] == 1)
        self._consistency(marked_nbrs)
        for v in ids:
            self._wc[v] = self._wc_one(v)

    def _wc_one(self, v: int) -> int:
        s, k = self.store, self.k
        c = self._cons[v]
        if c.code:
            return c.code
        if len(c.path) - 1 < k:
            return 0
        r, e = c.path[-1], c.path[-2]
        if s.mark[v] != 1:
            key = (r, e)
            if key not in self._unmarked_branch:
                self._unmarked_branch[key] = self._unmarked_walks(r, e)
            return self._unmarked_branch[key]
        nb = s.nbrB[v, :s.degB[v]]
        marked = [int(w) for w in nb if s.mark[w] == 1]
        if len(marked) != 2:
            return _code(Reason.MARKED_NEIGHBOR_COUNT)
        roots = []
        for w in marked:
            cw = self._cons_of(w)
            if cw.code:
                return cw.code
            roots.append(cw.path[-1])
        if roots[0] != roots[1] or roots[0] == r:
            return _code(Reason.WELD_PAIR_MISMATCH)
        key = (r, e, roots[0])
        if key not in self._marked_branch:
            self._marked_branch[key] = self._marked_walks(r, e, roots[0])
        return self._marked_branch[key]

    def _unmarked_walks(self, r: int, e: int) -> int:
        s, k, R = self.store, self.k, self.reps
        traj = self._walk_b(np.full(R, r), np.full(R, e), k)
        if (traj[:, k] == EMPTY).any():
            return _code(Reason.EARLY_STOP)
        # a leaf before step k is a walk that terminated early
        if (s.degB[traj[:, 1:k]] <= 1).any():
            return _code(Reason.EARLY_STOP)
        if (s.mark[traj[:, 1:]] == 1).any():
            return _code(Reason.MARKED_IN_BRANCH)
        return 0

    def _marked_walks(self, r: int, e: int, partner: int) -> int:
        s, k, R = self.store, self.k, self.reps
        s.ensure([r])
        if s.degB[r] != 4:
            return _code(Reason.INCOMPLETE_TREE)
        firsts = s.nbrB[r, :4]
        traj = self._walk_b(np.full(4 * R, r), np.tile(firsts, R), k).reshape(R, 4, k + 1)
        if (traj[:, :, k] == EMPTY).any() or (s.degB[traj[:, :, 1:k]] <= 1).any():
            return _code(Reason.EARLY_STOP)
        ends = traj[:, :, k]
        end_marked = s.mark[ends] == 1
        if (end_marked.sum(axis=1) != 2).any():
            return _code(Reason.MARKED_ENDPOINT_COUNT)
        along_e = int(np.flatnonzero(firsts == e)[0]) if (firsts == e).any() else -1
        if along_e < 0 or not end_marked[:, along_e].all():
            return _code(Reason.UNMARKED_BRANCH_END)
        marked_ends = ends[end_marked]
        if (s.mcount[marked_ends] != 2).any():
            return _code(Reason.MARKED_NEIGHBOR_COUNT)
        hops = self._random_marked_neighbor(marked_ends)
        self._consistency(hops)
        for y in np.unique(hops):
            cy = self._cons[int(y)]
            if cy.code:
                return cy.code
            if cy.path[-1] != partner:
                return _code(Reason.WELD_PAIR_MISMATCH)
        return 0

    def _random_marked_neighbor(self, xs: np.ndarray) -> np.ndarray:
        s = self.store
        cand = s.nbrB[xs]
        ok = (cand != EMPTY) & (s.mark[np.maximum(cand, 0)] == 1)
        cnt = ok.sum(axis=1)
        u = (self.rng.random(len(xs)) * cnt).astype(np.int64)
        pick = (np.cumsum(ok, axis=1) > u[:, None]).argmax(axis=1)
        return cand[np.arange(len(xs)), pick]

    # ---------------------------------------------------------- completeness
    def _root_block(self, r: int, traverse: bool) -> _RootBlock:
        key = (r, traverse)
        if key not in self._root:
            self._root[key] = self._root_walks(r, traverse)
        return self._root[key]

    def _root_walks(self, r: int, traverse: bool) -> _RootBlock:
        s, k = self.store, self.k
        reps = self.config.completeness_reps
        s.ensure([r])
        if s.degB[r] != 4:
            return _RootBlock(_code(Reason.INCOMPLETE_TREE))
        firsts = s.nbrB[r, :4].copy()
        traj = self._walk_b(np.full(4 * reps, r), np.tile(firsts, reps), k).reshape(reps, 4, k + 1)
        if (traj == EMPTY).any():
            return _RootBlock(_code(Reason.INCOMPLETE_TREE))
        if (s.degB[traj[:, :, 1:k]] != 3).any():
            return _RootBlock(_code(Reason.INCOMPLETE_TREE))
        ends = traj[:, :, k]
        end_marked = s.mark[ends] == 1
        good_end = (s.degB[ends] == 1) | (end_marked & (s.mcount[ends] == 2))
        if not good_end.all():
            return _RootBlock(_code(Reason.INCOMPLETE_TREE))
        if (end_marked.sum(axis=1) != 2).any():
            return _RootBlock(_code(Reason.MARKED_ENDPOINT_COUNT))
        branch = {int(f): bool(m) for f, m in zip(firsts, end_marked[0])}
        sampled = [traj.ravel()]
        partner = -1
        partners = []
        if traverse:
            which = (self.rng.random(reps) * 2).astype(np.int64)
            chosen = np.array([ends[i][end_marked[i]][which[i]] for i in range(reps)])
            hops = self._random_marked_neighbor(chosen)
            self._consistency(hops)
            for y in hops:
                cy = self._cons[int(y)]
                if cy.code:
                    return _RootBlock(cy.code)
                sampled.append(np.array(cy.path))
                partners.append(cy.path[-1])
            partner = partners[0]
        allv = np.unique(np.concatenate(sampled))
        self._weld_consistency(allv)
        for x in allv:
            if self._wc[int(x)]:
                return _RootBlock(self._wc[int(x)])
        for rp in dict.fromkeys(partners):
            mirror = self._root_block(rp, False)
            if mirror.code:
                return _RootBlock(mirror.code)
        return _RootBlock(0, partner, branch)

    def _completeness(self, v: int) -> tuple:
        """``(code, root, partner, unmarked_branch)``; branch is None for roots."""
        if v in self._comp:
            return self._comp[v]
        self._weld_consistency([v])
        code = self._wc[v]
        out: tuple
        if code:
            out = (code, -1, -1, None)
        else:
            path = self._cons[v].path
            r = path[-1]
            block = self._root_block(r, True)
            if block.code:
                out = (block.code, r, -1, None)
            else:
                unmarked = None if len(path) == 1 else not block.branch_marked.get(path[-2], False)
                out = (0, r, block.partner, unmarked)
        self._comp[v] = out
        return out

    def _advice(self, v: int) -> int:
        s = self.store
        code, r_v, rp_v, unmarked_v = self._completeness(v)
        if code:
            return code
        single_ok = s.ndouble[v] == 0 and s.degB[v] == 4
        if not (s.ndouble[v] == 1 or single_ok):
            return _code(Reason.STRUCTURE)
        if s.ndouble[v] == 0:
            return 0
        u = int(s.dbl[v])
        s.ensure([u])
        code, r_u, rp_u, unmarked_u = self._completeness(u)
        if code:
            return code
        if unmarked_v is None or unmarked_u is None or unmarked_v == unmarked_u:
            return _code(Reason.BRANCH_AMBIGUOUS)
        a_root, a_partner, b = (r_v, rp_v, u) if unmarked_v else (r_u, rp_u, v)
        s.ensure([a_root, a_partner])
        parity = (int(s.loop[a_root]) + int(s.loop[a_partner])) % 2
        expected = int(parity == weld_parity(self.config.convention))
        if s.mark_of(b) != expected:
            return _code(Reason.ADVICE_PARITY_MISMATCH)
        return 0

    # ------------------------------------------------------------ public API
    def local(self, label: int) -> int:
        if not 0 <= int(label) < self.oracle.vertex_count:
            raise GraphError(f"unknown label {label}")
        return self.store.intern(int(label))

    def adjacency_a(self, label: int) -> list[int]:
        """Filtered (consistency-test) neighbor labels of ``label``."""
        s = self.store
        i = self.local(label)
        s.ensure([i])
        return [int(s.label[w]) for w in s.nbrA[i, :s.degA[i]]]

    def _verdict(self, code: int, q0: int, a0: int, **info) -> Verdict:
        return Verdict(code == 0, _reason(code), self.oracle.query_counter - q0,
                       self.store.advice_billed - a0, info)

    def _counters(self) -> tuple[int, int]:
        return self.oracle.query_counter, self.store.advice_billed


def find_parent(ctx: TestContext, v: int):
    """Scalar FindParent on the consistency-test view; labels in and out."""
    return _find_parent(ctx.adjacency_a, v, ctx.k, ctx.py_rng)


def find_root_path(ctx: TestContext, v: int):
    return _find_root_path(ctx.adjacency_a, v, ctx.k, ctx.py_rng)


def consistency_test(ctx: TestContext, v: int) -> Verdict:
    q0, a0 = ctx._counters()
    i = ctx.local(v)
    c = ctx._cons_of(i)
    path = [int(ctx.store.label[x]) for x in c.path]
    return ctx._verdict(c.code, q0, a0, path=path)


def weld_consistency_test(ctx: TestContext, v: int) -> Verdict:
    q0, a0 = ctx._counters()
    i = ctx.local(v)
    ctx._weld_consistency([i])
    return ctx._verdict(ctx._wc[i], q0, a0)


def completeness_test(ctx: TestContext, v: int) -> Verdict:
    q0, a0 = ctx._counters()
    code, r, rp, unmarked = ctx._completeness(ctx.local(v))
    lab = ctx.store.label
    return ctx._verdict(code, q0, a0, root=int(lab[r]) if r >= 0 else None,
                        partner=int(lab[rp]) if rp >= 0 else None, unmarked_branch=unmarked)


def advice_test(ctx: TestContext, v: int) -> Verdict:
    q0, a0 = ctx._counters()
    return ctx._verdict(ctx._advice(ctx.local(v)), q0, a0)


def final_test(ctx: TestContext) -> Verdict:
    q0, a0 = ctx._counters()
    k = ctx.k
    n = ctx.oracle.vertex_count
    block = 2 * (2 ** k - 1) * candy_size(k)
    if n == 0 or n % block:
        return ctx._verdict(_code(Reason.VERTEX_COUNT_NOT_MULTIPLE), q0, a0)
    for trial in range(ctx.config.advice_tests):
        v = ctx.oracle.random_vertex(ctx.rng)
        code = ctx._advice(ctx.local(v))
        if code:
            return ctx._verdict(code, q0, a0, failed_vertex=v, trial=trial)
    return ctx._verdict(0, q0, a0)
