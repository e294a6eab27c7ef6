"""Text serialization for graphs and advice sidecars.

Format::

    weldlab-graph v1 n=<N> k=<K> variant=<g1|g2|yes|custom>
    <id> role=<body|antenna|root> loop=<0|1> : <nbr>[x2] <nbr> ...

``x2`` marks a double edge and a self-loop is written as the vertex's own
id. Neighbor lists are sorted ascending. ``k=0`` means unknown.
"""

from __future__ import annotations

import io
import os
import re
from pathlib import Path

import numpy as np

from .graph import EMPTY, SLOTS, EdgeKind, GraphError, MultiGraph, VertexRole

HEADER = re.compile(r"^weldlab-graph v1 n=(\d+) k=(\d+) variant=(g1|g2|yes|custom)$")
ROLE_NAMES = {VertexRole.BODY: "body", VertexRole.ANTENNA: "antenna", VertexRole.ROOT: "root"}
ROLE_CODES = {name: role for role, name in ROLE_NAMES.items()}


class ParseError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def dumps(g: MultiGraph) -> str:
    out = io.StringIO()
    out.write(f"weldlab-graph v1 n={g.vertex_count} k={g.k or 0} variant={g.variant}\n")
    nbr, kind = g.canonical()
    for v in range(g.vertex_count):
        items = []
        for w, kd in zip(nbr[v], kind[v]):
            if w == EMPTY:
                break
            items.append((int(w), "x2" if kd == EdgeKind.DOUBLE else ""))
        if g.loops[v]:
            items.append((v, ""))
        items.sort()
        body = " ".join(f"{w}{s}" for w, s in items)
        out.write(f"{v} role={ROLE_NAMES[VertexRole(int(g.roles[v]))]} loop={int(g.loops[v])} : {body}".rstrip() + "\n")
    return out.getvalue()


def loads(text: str) -> MultiGraph:
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "missing header")
    m = HEADER.match(lines[0].strip())
    if not m:
        raise ParseError(1, f"malformed header {lines[0]!r}")
    n, k, variant = int(m.group(1)), int(m.group(2)), m.group(3)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n:
        raise ParseError(len(lines), f"expected {n} vertex lines, found {len(body)}")
    nbr = np.full((n, SLOTS), EMPTY, np.int64)
    kind = np.zeros((n, SLOTS), np.int8)
    loops = np.zeros(n, bool)
    roles = np.zeros(n, np.int8)
    line_of = np.zeros(n, np.int64)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        head, sep, rest = line.partition(":")
        fields = head.split()
        if not sep or len(fields) != 3 or not fields[1].startswith("role=") or not fields[2].startswith("loop="):
            raise ParseError(lineno, "expected '<id> role=<r> loop=<0|1> : <neighbors>'")
        try:
            v = int(fields[0])
        except ValueError:
            raise ParseError(lineno, f"bad vertex id {fields[0]!r}") from None
        if not 0 <= v < n:
            raise ParseError(lineno, f"vertex id {v} out of range")
        if line_of[v]:
            raise ParseError(lineno, f"vertex {v} listed twice")
        line_of[v] = lineno
        role = ROLE_CODES.get(fields[1][5:])
        if role is None:
            raise ParseError(lineno, f"unknown role {fields[1][5:]!r}")
        roles[v] = role
        if fields[2] not in ("loop=0", "loop=1"):
            raise ParseError(lineno, f"bad loop flag {fields[2]!r}")
        loops[v] = fields[2] == "loop=1"
        slot, degree, own = 0, int(loops[v]), False
        for tok in rest.split():
            double = tok.endswith("x2")
            try:
                w = int(tok[:-2] if double else tok)
            except ValueError:
                raise ParseError(lineno, f"bad neighbor token {tok!r}") from None
            if not 0 <= w < n:
                raise ParseError(lineno, f"neighbor {w} out of range")
            if w == v:
                if double or own:
                    raise ParseError(lineno, "malformed self-loop entry")
                own = True
                continue
            degree += 2 if double else 1
            if slot == SLOTS or degree > 5:
                raise ParseError(lineno, f"vertex {v} exceeds the degree bound 5")
            nbr[v, slot] = w
            kind[v, slot] = EdgeKind.DOUBLE if double else EdgeKind.SINGLE
            slot += 1
        if own != bool(loops[v]):
            raise ParseError(lineno, "loop flag does not match own-id entry")
    # symmetry, reported against the line of the first offender
    rows = np.broadcast_to(np.arange(n)[:, None], nbr.shape)
    present = nbr != EMPTY
    u, w, kd = rows[present], nbr[present], kind[present].astype(np.int64)
    fwd = (u * n + w) * 3 + kd
    bwd = (w * n + u) * 3 + kd
    missing = np.setdiff1d(fwd, bwd)
    if missing.size:
        a, b = divmod(int(missing[0]) // 3, n)
        raise ParseError(int(line_of[a]), f"asymmetric edge {a}-{b}")
    if len(np.unique(fwd // 3)) != len(fwd):
        raise ParseError(int(line_of[u[0]]) if len(u) else 1, "repeated neighbor entry")
    return MultiGraph(nbr, kind, loops, roles, k=k or None, variant=variant)


def save_graph(g: MultiGraph, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps(g))


def load_graph(path: str | os.PathLike) -> MultiGraph:
    return loads(Path(path).read_text())


def save_advice(bits, path: str | os.PathLike) -> None:
    """Sidecar with one ``<id> <0|1>`` line per vertex id of the graph file."""
    bits = np.asarray(bits, dtype=np.int8)
    Path(path).write_text("".join(f"{i} {int(b)}\n" for i, b in enumerate(bits)))


def load_advice(path: str | os.PathLike, n: int | None = None) -> np.ndarray:
    entries = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ParseError(lineno, "expected '<id> <0|1>'")
        entries[int(parts[0])] = int(parts[1])
    size = n if n is not None else (max(entries) + 1 if entries else 0)
    bits = np.zeros(size, np.int8)
    for i, b in entries.items():
        if not 0 <= i < size:
            raise ParseError(0, f"advice id {i} out of range")
        bits[i] = b
    return bits
