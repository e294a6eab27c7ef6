import numpy as np
import pytest

from weldlab.analysis import Coloring, OddCycle, structural_census, two_color
from weldlab.graph import EdgeKind, MultiGraph, VertexRole
from weldlab.lazy import LazyBijection, LazyInstance, LazyWeldedTree


def materialize(lz: LazyInstance) -> MultiGraph:
    singles, doubles = set(), set()
    for v in range(lz.n):
        nbrs = lz.neighbors(v)
        for w, kd in nbrs:
            assert (v, kd) in lz.neighbors(w)
            (singles if kd == EdgeKind.SINGLE else doubles).add((min(v, w), max(v, w)))
    roles = [lz.role(v) for v in range(lz.n)]
    loops = [v for v in range(lz.n) if lz.has_loop(v)]
    return MultiGraph.from_edges(lz.n, sorted(singles), sorted(doubles), loops, roles, k=lz.k)


def test_bijection_is_a_permutation():
    b = LazyBijection(50, np.random.default_rng(0))
    ys = b.forward_many(range(0, 50, 2))
    ys += [b.forward(x) for x in range(1, 50, 2)]
    assert sorted(ys) == list(range(50))
    assert all(b.backward(b.forward(x)) == x for x in range(50))


def test_bijection_backward_first():
    b = LazyBijection(10, np.random.default_rng(1))
    xs = [b.backward(y) for y in range(10)]
    assert sorted(xs) == list(range(10))
    with pytest.raises(RuntimeError):
        b._fresh(b.bwd)


def test_forward_many_uniform_marginal():
    hits = np.zeros(8)
    for s in range(4000):
        b = LazyBijection(8, np.random.default_rng(s))
        b.forward(3)
        hits[b.forward_many([0, 1])[1]] += 1
    assert np.abs(hits / 4000 - 1 / 8).max() < 0.03


@pytest.mark.parametrize("variant", ["g1", "g2"])
def test_materialized_instance_passes_census(variant):
    lz = LazyInstance(3, variant, np.random.default_rng(7))
    g = materialize(lz)
    rep = structural_census(g, k=3)
    assert rep.passed, rep.failures
    col = two_color(g)
    assert isinstance(col, Coloring if variant == "g1" else OddCycle)


def test_labels_are_role_ranged():
    lz = LazyInstance(3, "g1", np.random.default_rng(3))
    for v in range(0, lz.n, 7):
        lab = lz.label(v)
        assert lz.role_of_label(lab) == lz.role(v)
        assert lz.vertex(lab) == v


def test_half_antenna_is_a_subtree():
    lz = LazyInstance(4, "g1", np.random.default_rng(2))
    v = lz.encode(5, VertexRole.ANTENNA, 6)
    tree, heaps, depth = lz.half_antenna(v)
    assert tree == 5 and depth == 1 and len(heaps) == 2 ** 4 - 1
    assert heaps[0] == 3 and 6 in heaps
    labels, d = lz.half_antenna_labels(v)
    assert d == 1 and lz.label(v) in labels
    with pytest.raises(ValueError):
        lz.half_antenna(lz.encode(5, VertexRole.BODY, 6))


@pytest.mark.parametrize("self_weld", [False, True])
def test_welded_tree(self_weld):
    t = LazyWeldedTree(3, self_weld, np.random.default_rng(0))
    deg = [len(t.neighbors(v)) for v in range(t.n)]
    roots = [v for v in range(t.n) if t.is_root(v)]
    assert sorted(deg[v] for v in roots) == [2, 2]
    assert all(deg[v] == 3 for v in range(t.n) if v not in roots)
    for v in range(t.n):
        assert all(v in t.neighbors(w) for w in t.neighbors(v))
        assert t.vertex(t.label(v)) == v
