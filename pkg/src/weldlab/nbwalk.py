"""Non-backtracking walks, FindParent and FindRootPath (scalar reference).

These work on any adjacency view: a callable ``adj(x)`` returning the
neighbors of ``x`` after the caller's edge filter has been applied. The
degree of ``x`` is ``len(adj(x))``. The vectorized tester in
:mod:`weldlab.tester` is checked against this module.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Callable, Sequence

Adjacency = Callable[[int], Sequence[int]]


class Reason(str, enum.Enum):
    BANNED_DEGREE = "BannedDegree"
    MULTIPLE_ROOTS = "MultipleRoots"
    NO_LEAF = "NoLeaf"
    LENGTH_MISMATCH = "LengthMismatch"
    ROOT_SKIP = "RootSkip"
    NO_ROOT = "NoRoot"
    PATH_TOO_LONG = "PathTooLong"
    MARKED_NON_LEAF = "MarkedNonLeaf"
    MARKED_ON_PATH = "MarkedOnPath"
    SHORT_MARKED_PATH = "ShortMarkedPath"
    PATH_DISAGREEMENT = "PathDisagreement"
    EARLY_STOP = "EarlyStop"
    MARKED_IN_BRANCH = "MarkedInBranch"
    MARKED_NEIGHBOR_COUNT = "MarkedNeighborCount"
    WELD_PAIR_MISMATCH = "WeldPairMismatch"
    MARKED_ENDPOINT_COUNT = "MarkedEndpointCount"
    UNMARKED_BRANCH_END = "UnmarkedBranchEnd"
    INCOMPLETE_TREE = "IncompleteTree"
    STRUCTURE = "AdviceStructure"
    BRANCH_AMBIGUOUS = "BranchAmbiguous"
    ADVICE_PARITY_MISMATCH = "AdviceParityMismatch"
    VERTEX_COUNT_NOT_MULTIPLE = "VertexCountNotMultiple"


class _RootMarker:
    def __repr__(self) -> str:
        return "ROOT"


ROOT = _RootMarker()


@dataclass(frozen=True)
class Rejected:
    reason: Reason


def nb_walk(adj: Adjacency, start: int, first: int, steps: int, rng: random.Random) -> list[int]:
    """Walk ``start -> first -> ...`` for up to ``steps`` edges, stopping at dead ends."""
    path = [start, first]
    while len(path) <= steps:
        options = [x for x in adj(path[-1]) if x != path[-2]]
        if not options:
            break
        path.append(options[rng.randrange(len(options))])
    return path


def find_parent(adj: Adjacency, v: int, k: int, rng: random.Random, *, strict: bool = True):
    """One call of FindParent. Returns a neighbor, :data:`ROOT` or :class:`Rejected`.

    ``strict=False`` skips the leaf verification after each walk, which the
    weld marker needs because its walks may run on into the unmarked body.
    """
    nb = list(adj(v))
    if len(nb) == 4:
        return ROOT
    if len(nb) not in (1, 3):
        return Rejected(Reason.BANNED_DEGREE)
    root = None
    lengths: dict[int, int] = {}
    visited: dict[int, list[int]] = {}
    for w in nb:
        path = [v, w]
        ell = 2 * k
        for t in range(1, 2 * k):
            here = adj(path[t])
            deg = len(here)
            if deg > 4:
                return Rejected(Reason.BANNED_DEGREE)
            if deg == 1:
                ell = t
                break
            if deg == 4:
                if root is None:
                    root = path[t]
                else:
                    return Rejected(Reason.MULTIPLE_ROOTS)
            options = [x for x in here if x != path[t - 1]]
            path.append(options[rng.randrange(len(options))])
        if strict and len(adj(path[ell])) > 1:
            return Rejected(Reason.NO_LEAF)
        lengths[w] = ell
        visited[w] = path[1:ell + 1]
    u = min(nb, key=lambda w: (-lengths[w], w))
    if len({lengths[w] for w in nb if w != u}) > 1:
        return Rejected(Reason.LENGTH_MISMATCH)
    if root is not None and root not in visited[u]:
        return Rejected(Reason.ROOT_SKIP)
    return u


def find_root_path(adj: Adjacency, v: int, k: int, rng: random.Random, *, strict: bool = True,
                   parent: Callable[[int], object] | None = None):
    """FindRootPath: a list ``[v, ..., root]`` or :class:`Rejected`.

    When FindParent reports that ``p[t-1]`` is itself the root, the path ends
    at ``p[t-1]``.
    """
    step = parent or (lambda x: find_parent(adj, x, k, rng, strict=strict))
    path = [v]
    for _ in range(k):
        res = step(path[-1])
        if isinstance(res, Rejected):
            return res
        if res is ROOT:
            break
        path.append(res)
    if len(adj(path[-1])) != 4:
        return Rejected(Reason.NO_ROOT)
    return path
