"""Classical adversaries against lazily sampled instances.

An adversary sees labels, roles and the edges returned by its queries; that
view is the :class:`KnowledgeGraph`. It acts through four actions: query a
fresh body label, query a fresh antenna label, query a known body label,
query a known antenna label. Antenna queries reveal the whole half-antenna
(the depth-(k-1) subtree hanging off one root edge) at once.

Two backends answer actions: :class:`RealBackend` over a
:class:`~weldlab.lazy.LazyInstance`, and :class:`SimulatorBackend`, which
answers with fresh labels only and never sees an instance. Games A to D run
plain queries on lazy (self-)welded trees.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest, chi2_contingency

from .generators import Variant
from .graph import EdgeKind, VertexRole
from .lazy import LazyInstance, LazyWeldedTree
from .rng import stream

BUCKETS = 16


class ExperimentTooLong(RuntimeError):
    """A label pool ran dry: the run outgrew the experiment's design envelope."""


class ContractViolation(RuntimeError):
    """A strategy issued an action inconsistent with its knowledge graph."""


class Action(enum.IntEnum):
    QUERY_UNKNOWN_BODY = 1
    QUERY_UNKNOWN_ANTENNA = 2
    QUERY_KNOWN_BODY = 3
    QUERY_KNOWN_ANTENNA = 4


@dataclass(frozen=True)
class AdversaryAction:
    kind: Action
    label: int | None = None


class KnowledgeGraph:
    """Labels, roles, edges and provenance seen so far. Only ever grows."""

    def __init__(self):
        self.roles: dict[int, VertexRole] = {}
        self.via: dict[int, str] = {}
        self.order: list[int] = []
        self.queried: set[int] = set()
        self.adj: dict[int, dict[int, EdgeKind]] = {}
        self.edge_count = 0
        self._uf: dict[int, tuple[int, int]] = {}
        self.odd_cycle = False

    def __contains__(self, label: int) -> bool:
        return label in self.roles

    def __len__(self) -> int:
        return len(self.roles)

    def add_vertex(self, label: int, role: VertexRole, via: str) -> bool:
        if label in self.roles:
            return False
        self.roles[label] = role
        self.via[label] = via
        self.order.append(label)
        self.adj[label] = {}
        return True

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj.get(a, ())

    def add_edge(self, a: int, b: int, kind: EdgeKind) -> bool:
        if a not in self.roles or b not in self.roles:
            raise ContractViolation(f"edge {a}-{b} has an unknown endpoint")
        if b in self.adj[a]:
            return False
        self.adj[a][b] = self.adj[b][a] = kind
        self.edge_count += 1
        if kind is EdgeKind.SINGLE:
            self._join(a, b)
        return True

    # parity union-find over single edges
    def _find(self, x: int) -> tuple[int, int]:
        uf = self._uf
        hit = uf.get(x)
        if hit is None:
            return x, 0
        p, parity = hit
        if p == x:
            return x, 0
        nxt = uf[p]
        if nxt[0] == p:
            return p, parity
        root, rest = self._find(p)
        uf[x] = (root, parity ^ rest)
        return root, parity ^ rest

    def _join(self, a: int, b: int) -> None:
        ra, pa = self._find(a)
        rb, pb = self._find(b)
        if ra == rb:
            if pa == pb:
                self.odd_cycle = True
            return
        uf = self._uf
        uf.setdefault(rb, (rb, 0))
        uf[ra] = (rb, pa ^ pb ^ 1)

    def add_block(self, labels: list[int], role: VertexRole, via: str, anchor: int | None = None) -> bool:
        """Add a complete binary tree given in heap order (``labels[j - 1]`` at
        heap ``j``) with single edges.

        Every label must be new, except ``anchor``, which may be known as long
        as it has no single edge yet. Returns False, changing nothing, otherwise.
        """
        roles = self.roles
        uf = self._uf
        for x in labels:
            if x in roles and not (x == anchor and x not in uf
                                   and all(kd is not EdgeKind.SINGLE for kd in self.adj[x].values())):
                return False
        n = len(labels)
        fresh = [x for x in labels if x not in roles]
        for x in fresh:
            roles[x] = role
        self.via.update(dict.fromkeys(fresh, via))
        self.order.extend(fresh)
        S = EdgeKind.SINGLE
        adj = self.adj
        for j, x in enumerate(labels, start=1):
            nb = {labels[c - 1]: S for c in (2 * j, 2 * j + 1) if c <= n}
            if j > 1:
                nb[labels[j // 2 - 1]] = S
            if x in adj:
                adj[x].update(nb)
            else:
                adj[x] = nb
        self.edge_count += n - 1
        top = labels[0]
        uf[top] = (top, 0)
        for j in range(2, n + 1):
            uf[labels[j - 1]] = (top, (j.bit_length() - 1) & 1)
        return True

    def unqueried(self, role: VertexRole | None = None) -> list[int]:
        return [x for x in self.order if x not in self.queried and (role is None or self.roles[x] == role)]

    def check(self) -> None:
        for a, nb in self.adj.items():
            for b, kd in nb.items():
                if b not in self.roles or self.adj[b].get(a) != kd:
                    raise AssertionError(f"edge {a}-{b} is not closed")


@dataclass
class Reveal:
    action: Action
    case: str
    target: int
    vertices: list[tuple[int, VertexRole, str]]
    edges: list[tuple[int, int, EdgeKind]]
    depth: int = -1
    events: set[str] = field(default_factory=set)
    free_queries: list[int] = field(default_factory=list)
    block: list[int] | None = None     # half-antenna labels in heap order

    def signature(self) -> tuple:
        body = sum(1 for x, r, _ in self.vertices if r == VertexRole.BODY and x != self.target)
        ant = sum(1 for x, r, _ in self.vertices if r == VertexRole.ANTENNA and x != self.target)
        return (self.case, body, ant, self.depth)


def _case(kg: KnowledgeGraph, action: Action, label: int | None) -> str:
    if action is Action.QUERY_UNKNOWN_BODY:
        return "I"
    if action is Action.QUERY_UNKNOWN_ANTENNA:
        return "II"
    if label not in kg:
        raise ContractViolation(f"label {label} is not in the knowledge graph")
    if label in kg.queried:
        raise ContractViolation(f"label {label} was already queried")
    want = VertexRole.BODY if action is Action.QUERY_KNOWN_BODY else VertexRole.ANTENNA
    if kg.roles[label] != want:
        raise ContractViolation(f"label {label} has role {kg.roles[label].name}")
    sub = "a" if kg.via[label] == "advice" else "b"
    return ("III" if action is Action.QUERY_KNOWN_BODY else "IV") + sub


def _fresh_label(lo: int, size: int, taken, rng: np.random.Generator) -> int:
    """Uniform label in ``[lo, lo + size)`` outside ``taken``."""
    used = sum(1 for x in taken if lo <= x < lo + size) if 4 * len(taken) > size else 0
    if used >= size:
        raise ExperimentTooLong("label pool exhausted")
    if 2 * used < size:
        for _ in range(10_000):
            x = lo + int(rng.integers(size))
            if x not in taken:
                return x
    free = [x for x in range(lo, lo + size) if x not in taken]
    if not free:
        raise ExperimentTooLong("label pool exhausted")
    return free[int(rng.integers(len(free)))]


def _fresh_labels(lo: int, size: int, taken, m: int, rng: np.random.Generator) -> list[int]:
    """``m`` distinct fresh labels, sequentially uniform; batched when the pool is sparse."""
    if 4 * (len(taken) + m) >= size:
        out: list[int] = []
        for _ in range(m):
            x = _fresh_label(lo, size, _Union(taken, out), rng)
            out.append(x)
        return out
    out, seen = [], set()
    while len(out) < m:
        for y in rng.integers(size, size=2 * (m - len(out)) + 8).tolist():
            x = lo + y
            if x not in taken and x not in seen:
                seen.add(x)
                out.append(x)
                if len(out) == m:
                    break
    return out


class _Union:
    def __init__(self, a, b):
        self.a, self.b = a, b

    def __contains__(self, x):
        return x in self.a or x in self.b

    def __iter__(self):
        yield from self.a
        yield from self.b

    def __len__(self):
        return len(self.a) + len(self.b)


class _Pending:
    """Labels known to the knowledge graph or already issued in this reveal."""

    def __init__(self, kg: KnowledgeGraph):
        self.kg = kg
        self.new: dict[int, tuple[VertexRole, str]] = {}

    def __contains__(self, x: int) -> bool:
        return x in self.kg.roles or x in self.new

    def __iter__(self):
        yield from self.kg.roles
        yield from self.new

    def __len__(self) -> int:
        return len(self.kg.roles) + len(self.new)

    def add(self, x: int, role: VertexRole, via: str) -> None:
        if x not in self:
            self.new[x] = (role, via)


class RealBackend:
    """Answers actions from a lazy G1 or G2 instance and flags the bad events.

    A1: an unknown-label action reveals a vertex of a tapped base graph (a
    candy or double-bow-tie with a known non-root vertex). A2: a known-label
    action reveals a new advice edge into a tapped base graph. ``root``: a
    root label appears; reached roots are then queried for free.
    """

    def __init__(self, instance: LazyInstance, rng: np.random.Generator):
        self.inst = instance
        self.rng = rng
        self.tapped: set[int] = set()

    def pool(self, role: VertexRole) -> tuple[int, int]:
        i = self.inst
        return (0, i.NB) if role == VertexRole.BODY else (i.NB, i.NA)

    def respond(self, kg: KnowledgeGraph, action: AdversaryAction) -> Reveal:
        inst = self.inst
        kind = action.kind
        case = _case(kg, kind, action.label)
        pend = _Pending(kg)
        if case in ("I", "II"):
            role = VertexRole.BODY if case == "I" else VertexRole.ANTENNA
            label = _fresh_label(*self.pool(role), pend, self.rng)
            pend.add(label, role, "fresh")
        else:
            label = action.label
        v = inst.vertex(label)
        role = inst.role(v)
        fresh_action = case in ("I", "II")
        events: set[str] = set()
        edges: list[tuple[int, int, EdgeKind]] = []
        free: list[int] = []
        if fresh_action and inst.pair_of(v) in self.tapped:
            events.add("A1")
        depth = -1
        block = None
        if case in ("II", "IVa"):
            block, depth = inst.half_antenna_labels(v)
            for x in block:
                pend.add(x, VertexRole.ANTENNA, "half")
        single_via = "body" if role == VertexRole.BODY else "antenna"
        for w, kd in inst.neighbors(v):
            wl = inst.label(w)
            known_before = wl in kg
            wrole = inst.role(w)
            if fresh_action and inst.pair_of(w) in self.tapped:
                events.add("A1")
            if (kd is EdgeKind.DOUBLE and not fresh_action and not kg.has_edge(label, wl)
                    and inst.pair_of(w) in self.tapped):
                events.add("A2")
            pend.add(wl, wrole, "advice" if kd is EdgeKind.DOUBLE else single_via)
            edges.append((label, wl, kd))
            if wrole == VertexRole.ROOT and not known_before and wl not in free:
                events.add("root")
                free.append(wl)
                for x, xk in inst.neighbors(w):
                    xl = inst.label(x)
                    pend.add(xl, inst.role(x), "root")
                    edges.append((wl, xl, xk))
        # every new non-root label lies in the queried vertex's pair or in a neighbor's
        for w in [v] + [w for w, _ in inst.neighbors(v)]:
            if inst.role(w) != VertexRole.ROOT and inst.label(w) in pend.new:
                self.tapped.add(inst.pair_of(w))
        verts = [(x, r, via) for x, (r, via) in pend.new.items()]
        return Reveal(kind, case, label, verts, edges, depth, events, free, block)


class SimulatorBackend:
    """The instance-free simulator: every answer is made of fresh labels.

    Antenna labels carry a position inside a virtual half-antenna. A label
    placed at the top of its half-antenna borders a root; querying it raises
    the ``root`` flag so that conditioning on no events treats both backends
    alike.
    """

    def __init__(self, k: int, NB: int, NA: int, rng: np.random.Generator):
        self.k = k
        self.NB, self.NA = NB, NA
        self.rng = rng
        self.heap: dict[int, int] = {}

    @classmethod
    def matching(cls, k: int, rng: np.random.Generator) -> "SimulatorBackend":
        trees = 4 * (2 ** k - 1)
        half = 2 ** (k + 1) - 2
        return cls(k, trees * half, trees * half, rng)

    def _fresh(self, pend: _Pending, role: VertexRole, via: str) -> int:
        lo, size = (0, self.NB) if role == VertexRole.BODY else (self.NB, self.NA)
        x = _fresh_label(lo, size, pend, self.rng)
        pend.add(x, role, via)
        return x

    def _half(self, pend: _Pending, q: int) -> tuple[int, list[int]]:
        """Place ``q`` uniformly in a fresh half-antenna; returns its heap index and the block."""
        size = 2 ** self.k - 1
        h = int(self.rng.integers(1, size + 1))
        fresh = _fresh_labels(self.NB, self.NA, pend, size - 1, self.rng)
        block = fresh[:h - 1] + [q] + fresh[h - 1:]
        for j, x in enumerate(block, start=1):
            pend.add(x, VertexRole.ANTENNA, "half")
            self.heap[x] = j
        return h, block

    def respond(self, kg: KnowledgeGraph, action: AdversaryAction) -> Reveal:
        case = _case(kg, action.kind, action.label)
        pend = _Pending(kg)
        edges: list[tuple[int, int, EdgeKind]] = []
        events: set[str] = set()
        depth = -1
        block = None
        B, A = VertexRole.BODY, VertexRole.ANTENNA
        if case == "I":
            q = self._fresh(pend, B, "fresh")
            n_body, n_ant = 3, 1
        elif case == "II":
            q = self._fresh(pend, A, "fresh")
            n_body, n_ant = 1, 0
        elif case == "IIIa":
            q, n_body, n_ant = action.label, 3, 0
        elif case == "IIIb":
            q, n_body, n_ant = action.label, 2, 1
        elif case == "IVa":
            q, n_body, n_ant = action.label, 0, 0
        else:
            q, n_body, n_ant = action.label, 1, 0
            if self.heap.get(q) == 1:
                events.add("root")
        if case in ("II", "IVa"):
            h, block = self._half(pend, q)
            depth = h.bit_length() - 1
            if h == 1:
                events.add("root")
        q_role = kg.roles.get(q, pend.new.get(q, (None,))[0])
        single_via = "body" if q_role == B else "antenna"
        for _ in range(n_body):
            kd = EdgeKind.SINGLE if q_role == B else EdgeKind.DOUBLE
            edges.append((q, self._fresh(pend, B, single_via if kd is EdgeKind.SINGLE else "advice"), kd))
        for _ in range(n_ant):
            edges.append((q, self._fresh(pend, A, "advice"), EdgeKind.DOUBLE))
        verts = [(x, r, via) for x, (r, via) in pend.new.items()]
        return Reveal(action.kind, case, q, verts, edges, depth, events, block=block)


def simulator_step(gs: SimulatorBackend, kg: KnowledgeGraph, action: AdversaryAction) -> Reveal:
    """One simulator answer, applied to ``kg``."""
    rev = gs.respond(kg, action)
    apply_reveal(kg, rev)
    return rev


def apply_reveal(kg: KnowledgeGraph, rev: Reveal) -> None:
    """Merge a reveal into ``kg``; adds ``cycle`` when a new edge joins two
    previously known labels."""
    fresh = {x: via for x, _, via in rev.vertices}
    edges = rev.edges
    if rev.block is not None:
        if kg.add_block(rev.block, VertexRole.ANTENNA, "half", anchor=rev.target):
            for x in rev.block:
                if fresh.get(x, "half") != "half":
                    kg.via[x] = fresh[x]
        else:
            n = len(rev.block)
            edges = [(rev.block[j - 1], rev.block[j // 2 - 1], EdgeKind.SINGLE) for j in range(2, n + 1)] + edges
    for x, r, via in rev.vertices:
        kg.add_vertex(x, r, via)
    for a, b, kd in edges:
        new = kg.add_edge(a, b, kd)
        if new and a not in fresh and b not in fresh:
            rev.events.add("cycle")
    kg.queried.add(rev.target)
    kg.queried.update(rev.free_queries)


# ------------------------------------------------------------------ strategies

class Strategy:
    """Deterministic given its rng. ``choose`` returns an action or ``None`` to stop."""

    name = "base"

    def reset(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def observe(self, rev: Reveal, kg: KnowledgeGraph) -> None:
        pass

    def choose(self, kg: KnowledgeGraph) -> AdversaryAction | None:
        raise NotImplementedError

    def guess(self, kg: KnowledgeGraph) -> Variant:
        """G2 iff an odd cycle of single edges has been seen."""
        return Variant.G2 if kg.odd_cycle else Variant.G1


def known_action(kg: KnowledgeGraph, label: int) -> AdversaryAction:
    role = kg.roles[label]
    kind = Action.QUERY_KNOWN_ANTENNA if role == VertexRole.ANTENNA else Action.QUERY_KNOWN_BODY
    return AdversaryAction(kind, label)


FRESH_BODY = AdversaryAction(Action.QUERY_UNKNOWN_BODY)
FRESH_ANTENNA = AdversaryAction(Action.QUERY_UNKNOWN_ANTENNA)


def _fallback(kg: KnowledgeGraph) -> AdversaryAction:
    """Oldest unqueried known label, else a fresh body label."""
    for x in kg.order:
        if x not in kg.queried:
            return known_action(kg, x)
    return FRESH_BODY


class RandomWalk(Strategy):
    """Uniform random walk over known edges; walking onto an unqueried label queries it."""

    name = "random-walk"
    max_hops = 64

    def reset(self, rng):
        super().reset(rng)
        self.here: int | None = None

    def observe(self, rev, kg):
        self.here = rev.target

    def choose(self, kg):
        if self.here is None:
            return _fallback(kg)
        x = self.here
        for _ in range(self.max_hops):
            nbrs = list(kg.adj[x])
            if not nbrs:
                break
            x = nbrs[int(self.rng.integers(len(nbrs)))]
            if x not in kg.queried:
                return known_action(kg, x)
        return _fallback(kg)


class FrontierBFS(Strategy):
    """Query known labels in discovery order."""

    name = "bfs"

    def reset(self, rng):
        super().reset(rng)
        self.head = 0

    def choose(self, kg):
        while self.head < len(kg.order) and kg.order[self.head] in kg.queried:
            self.head += 1
        if self.head < len(kg.order):
            return known_action(kg, kg.order[self.head])
        return FRESH_BODY


class ParityProbe(Strategy):
    """Depth-first along single edges, chasing long body paths where odd cycles close."""

    name = "parity-probe"

    def reset(self, rng):
        super().reset(rng)
        self.stack: list[int] = []

    def observe(self, rev, kg):
        nb = [w for w, kd in kg.adj[rev.target].items() if kd is EdgeKind.SINGLE and w not in kg.queried]
        self.rng.shuffle(nb)
        self.stack += nb

    def choose(self, kg):
        while self.stack:
            x = self.stack.pop()
            if x not in kg.queried:
                return known_action(kg, x)
        return _fallback(kg)


class Exhaustive(FrontierBFS):
    """BFS that falls back to fresh body, then fresh antenna labels."""

    name = "exhaustive"

    def choose(self, kg):
        act = super().choose(kg)
        if act is FRESH_BODY and getattr(self, "body_done", False):
            return FRESH_ANTENNA
        return act


class MixedActions(Strategy):
    """Uniform over the action types currently available, then a uniform label."""

    name = "mixed"

    def choose(self, kg):
        opts: list[AdversaryAction | Action] = [FRESH_BODY, FRESH_ANTENNA]
        body = kg.unqueried(VertexRole.BODY)
        ant = kg.unqueried(VertexRole.ANTENNA)
        if body:
            opts.append(Action.QUERY_KNOWN_BODY)
        if ant:
            opts.append(Action.QUERY_KNOWN_ANTENNA)
        pick = opts[int(self.rng.integers(len(opts)))]
        if isinstance(pick, AdversaryAction):
            return pick
        pool = body if pick is Action.QUERY_KNOWN_BODY else ant
        return AdversaryAction(pick, pool[int(self.rng.integers(len(pool)))])


class AntennaOnly(Strategy):
    name = "antenna-only"

    def choose(self, kg):
        return FRESH_ANTENNA


class ConstantGuess(FrontierBFS):
    name = "constant"

    def guess(self, kg):
        return Variant.G1


STRATEGIES = {s.name: s for s in (RandomWalk, FrontierBFS, ParityProbe, MixedActions,
                                  AntennaOnly, ConstantGuess, Exhaustive)}
REFERENCE_STRATEGIES = ("random-walk", "bfs", "parity-probe")


def make_strategy(name: str) -> Strategy:
    try:
        return STRATEGIES[name]()
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


# ---------------------------------------------------------------------- runs

@dataclass
class Transcript:
    reveals: list[Reveal]
    events: set[str]
    queries_used: int
    kg: KnowledgeGraph
    guess: Variant | None = None

    @property
    def clean(self) -> bool:
        return not self.events


def run_against(backend, strategy: Strategy, t: int, rng: np.random.Generator) -> Transcript:
    """Run ``strategy`` for at most ``t`` actions against a backend."""
    kg = KnowledgeGraph()
    strategy.reset(rng)
    reveals: list[Reveal] = []
    events: set[str] = set()
    for _ in range(t):
        act = strategy.choose(kg)
        if act is None:
            break
        try:
            rev = backend.respond(kg, act)
        except ExperimentTooLong:
            if not isinstance(strategy, Exhaustive):
                raise
            if act is not FRESH_BODY:
                break
            strategy.body_done = True
            act = FRESH_ANTENNA
            try:
                rev = backend.respond(kg, act)
            except ExperimentTooLong:
                break
        apply_reveal(kg, rev)
        reveals.append(rev)
        events |= rev.events
        strategy.observe(rev, kg)
    return Transcript(reveals, events, len(reveals), kg, strategy.guess(kg))


def wilson(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(level, method="wilson")
    return float(ci.low), float(ci.high)


# --------------------------------------------------------------------- games

GAMES = {
    # self weld, random start, other-root wins, any-root wins
    "A": (True, False, False, False),
    "B": (True, True, False, True),
    "C": (False, False, True, False),
    "D": (False, True, False, True),
}


@dataclass(frozen=True)
class GameSpec:
    game: str
    k: int
    t: int
    trials: int = 1000

    def __post_init__(self):
        if self.game not in GAMES:
            raise ValueError(f"unknown game {self.game!r}")
        if self.k < 1:
            raise ValueError("games need k >= 1")
        if not 0 <= self.t <= 2 ** (self.k - 1):
            raise ValueError(f"budget t={self.t} outside [0, 2^(k-1)]")


@dataclass
class GameResult:
    spec: GameSpec
    strategy: str
    wins: int

    @property
    def win_prob(self) -> float:
        return self.wins / self.spec.trials

    @property
    def stderr(self) -> float:
        p = self.win_prob
        return math.sqrt(p * (1 - p) / self.spec.trials)

    @property
    def interval(self) -> tuple[float, float]:
        return wilson(self.wins, self.spec.trials)


def play_game(game: str, k: int, t: int, strategy: Strategy, rng: np.random.Generator) -> bool:
    """One trial; True when the strategy closes a cycle or finds a winning root."""
    self_weld, random_start, other_root, any_root = GAMES[game]
    tree = LazyWeldedTree(k, self_weld, rng)
    start = int(rng.integers(tree.n)) if random_start else tree.vid(0, 1)
    kg = KnowledgeGraph()
    role = lambda v: VertexRole.ROOT if tree.is_root(v) else VertexRole.BODY
    s = tree.label(start)
    kg.add_vertex(s, role(start), "start")
    if any_root and tree.is_root(start):
        return True
    strategy.reset(rng)
    for _ in range(t):
        act = strategy.choose(kg)
        if act is None or act.label is None:
            break
        if act.label not in kg or act.label in kg.queried:
            raise ContractViolation(f"label {act.label} is not a known unqueried label")
        v = tree.vertex(act.label)
        verts, edges = [], []
        for w in tree.neighbors(v):
            wl = tree.label(w)
            if wl in kg:
                if not kg.has_edge(act.label, wl):
                    return True
                continue
            if tree.is_root(w) and (any_root or (other_root and w != start)):
                return True
            verts.append((wl, role(w), "body"))
            edges.append((act.label, wl, EdgeKind.SINGLE))
        rev = Reveal(act.kind, "game", act.label, verts, edges)
        apply_reveal(kg, rev)
        strategy.observe(rev, kg)
    return False


def run_game(spec: GameSpec, strategy: str | Strategy, seed: int = 0) -> GameResult:
    strat = make_strategy(strategy) if isinstance(strategy, str) else strategy
    wins = 0
    for trial in range(spec.trials):
        rng = stream(seed, "game", spec.game, spec.k, spec.t, strat.name, trial)
        wins += play_game(spec.game, spec.k, spec.t, strat, rng)
    return GameResult(spec, strat.name, wins)


def game_bound(k: int, t: int) -> float:
    """``t^2 2^{-k/4}``, the shape shared by the game lemmas and the final bound."""
    return t * t * 2.0 ** (-k / 4)


# -------------------------------------------------------------- distinguishing

def _tv(a: Counter, b: Counter) -> float:
    na, nb = sum(a.values()) or 1, sum(b.values()) or 1
    return 0.5 * sum(abs(a[x] / na - b[x] / nb) for x in set(a) | set(b))


@dataclass
class DistinguishResult:
    k: int
    t: int
    trials: int
    strategy: str
    g1_says_g1: int
    g2_says_g1: int
    events: dict[str, Counter]
    tv_to_simulator: dict[str, float]

    @property
    def advantage(self) -> float:
        return abs(self.g1_says_g1 - self.g2_says_g1) / self.trials

    @property
    def stderr(self) -> float:
        p, q = self.g1_says_g1 / self.trials, self.g2_says_g1 / self.trials
        return math.sqrt((p * (1 - p) + q * (1 - q)) / self.trials)

    @property
    def advantage_upper(self) -> float:
        """Upper end of the advantage from the two Wilson intervals."""
        l1, h1 = wilson(self.g1_says_g1, self.trials)
        l2, h2 = wilson(self.g2_says_g1, self.trials)
        return max(h1 - l2, h2 - l1)


def distinguishing_experiment(k: int, t: int, strategy: str, trials: int, seed: int = 0,
                              diagnostics: bool = True) -> DistinguishResult:
    strat = make_strategy(strategy)
    says_g1 = {}
    events = {}
    sigs: dict[str, Counter] = {}
    for variant in (Variant.G1, Variant.G2):
        count, ev, sg = 0, Counter(), Counter()
        for trial in range(trials):
            rng = stream(seed, "distinguish", k, t, strat.name, variant.value, trial)
            inst = LazyInstance(k, variant, rng)
            tr = run_against(RealBackend(inst, rng), strat, t, rng)
            count += tr.guess is Variant.G1
            ev.update(tr.events)
            sg.update(r.signature() for r in tr.reveals)
        says_g1[variant], events[variant.value], sigs[variant.value] = count, ev, sg
    tv = {}
    if diagnostics:
        sg = Counter()
        for trial in range(trials):
            rng = stream(seed, "distinguish", k, t, strat.name, "sim", trial)
            tr = run_against(SimulatorBackend.matching(k, rng), strat, t, rng)
            sg.update(r.signature() for r in tr.reveals)
        tv = {name: _tv(c, sg) for name, c in sigs.items()}
    return DistinguishResult(k, t, trials, strat.name, says_g1[Variant.G1], says_g1[Variant.G2], events, tv)


# ------------------------------------------------------------ simulator fidelity

def _bucket(label: int, role: VertexRole, NB: int, NA: int) -> int:
    lo, size = (0, NB) if role == VertexRole.BODY else (NB, NA)
    return (label - lo) * BUCKETS // size


@dataclass
class FidelityReport:
    k: int
    t: int
    trials: int
    kept: dict[str, int]
    p_values: dict[str, float]

    @property
    def passed(self) -> bool:
        return all(p > 0.01 for p in self.p_values.values())


def _histograms(backend_factory, strategy: Strategy, k: int, t: int, trials: int, seed: int, tag: str):
    steps, buckets = Counter(), Counter()
    kept = 0
    for trial in range(trials):
        rng = stream(seed, "fidelity", k, t, tag, trial)
        backend = backend_factory(rng)
        tr = run_against(backend, strategy, t, rng)
        if not tr.clean:
            continue
        kept += 1
        NB, NA = backend_sizes(backend)
        for i, rev in enumerate(tr.reveals):
            steps[(i, rev.signature())] += 1
            for x, r, _ in rev.vertices:
                buckets[(r, _bucket(x, r, NB, NA))] += 1
    return steps, buckets, kept


def backend_sizes(backend) -> tuple[int, int]:
    if isinstance(backend, RealBackend):
        return backend.inst.NB, backend.inst.NA
    return backend.NB, backend.NA


def chi2_same(a: Counter, b: Counter) -> float:
    """p-value of a chi-square homogeneity test between two histograms."""
    keys = sorted(set(a) | set(b), key=repr)
    table = np.array([[a[x] for x in keys], [b[x] for x in keys]], float)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    return float(chi2_contingency(table)[1])


def simulator_fidelity(k: int = 10, t: int = 5, trials: int = 5000, seed: int = 0,
                       strategy: str = "mixed") -> FidelityReport:
    """Compare per-step reveal signatures and fresh-label buckets of the
    simulator with real G1 and G2 runs, all conditioned on no event."""
    strat = make_strategy(strategy)
    sim = _histograms(lambda rng: SimulatorBackend.matching(k, rng), strat, k, t, trials, seed, "sim")
    kept = {"sim": sim[2]}
    pv = {}
    for variant in (Variant.G1, Variant.G2):
        real = _histograms(lambda rng: RealBackend(LazyInstance(k, variant, rng), rng),
                           strat, k, t, trials, seed, variant.value)
        kept[variant.value] = real[2]
        pv[f"{variant.value}-steps"] = chi2_same(real[0], sim[0])
        pv[f"{variant.value}-labels"] = chi2_same(real[1], sim[1])
    return FidelityReport(k, t, trials, kept, pv)
