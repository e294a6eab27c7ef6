import networkx as nx
import numpy as np
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from weldlab.adversary import KnowledgeGraph
from weldlab.analysis import Coloring, OddCycle, is_odd_cycle, local_search_cut, odd_cycle_packing, two_color
from weldlab.generators import InstanceSpec, build_instance
from weldlab.graph import EdgeKind, MultiGraph, VertexRole
from weldlab.graphio import dumps, loads
from weldlab.lazy import LazyBijection
from weldlab.rng import child_seed, hashed_permutation, stream

edges_st = st.integers(3, 14).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                                            .filter(lambda e: e[0] < e[1]), max_size=3 * n)))


def csr(n, edges):
    A = sp.lil_matrix((n, n), dtype=np.int8)
    for a, b in edges:
        A[a, b] = A[b, a] = 1
    return A.tocsr()


@settings(max_examples=60, deadline=None)
@given(edges_st)
def test_two_color_agrees_with_networkx(ne):
    n, edges = ne
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from(edges)
    A = csr(n, edges)
    res = two_color(A)
    assert isinstance(res, Coloring) == nx.is_bipartite(G)
    if isinstance(res, OddCycle):
        assert is_odd_cycle(A, res.witness)
    else:
        assert all(res.colors[a] != res.colors[b] for a, b in edges)


@settings(max_examples=40, deadline=None)
@given(edges_st, st.integers(0, 1000))
def test_packing_never_exceeds_cut(ne, seed):
    n, edges = ne
    A = csr(n, edges)
    assert len(odd_cycle_packing(A)) <= local_search_cut(A, seed)[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 63), st.integers(0, 40))
def test_hashed_permutation_is_permutation(key, size):
    assert sorted(hashed_permutation(key, size)) == list(range(size))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.lists(st.integers(0, 10 ** 6), max_size=4))
def test_streams_reproducible(seed, labels):
    assert stream(seed, *labels).integers(1 << 30) == stream(seed, *labels).integers(1 << 30)
    assert child_seed(seed, *labels) == child_seed(seed, *labels)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(0, 10 ** 6), st.data())
def test_lazy_bijection_consistent(size, seed, data):
    b = LazyBijection(size, np.random.default_rng(seed))
    ops = data.draw(st.lists(st.tuples(st.booleans(), st.integers(0, size - 1)), max_size=2 * size))
    for fwd, x in ops:
        if fwd:
            assert b.backward(b.forward(x)) == x
        else:
            assert b.forward(b.backward(x)) == x
    assert len(set(b.fwd.values())) == len(b.fwd)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)).filter(lambda e: e[0] != e[1]), max_size=40))
def test_knowledge_graph_parity_matches_networkx(edges):
    kg = KnowledgeGraph()
    G = nx.Graph()
    for a, b in edges:
        for x in (a, b):
            kg.add_vertex(x, VertexRole.BODY, "fresh")
        kg.add_edge(a, b, EdgeKind.SINGLE)
        G.add_edge(a, b)
    assert kg.odd_cycle == (not nx.is_bipartite(G))


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 3), st.sampled_from(["g1", "g2", "yes"]), st.integers(0, 10 ** 6))
def test_generated_graphs_roundtrip(k, variant, seed):
    g = build_instance(InstanceSpec(k, variant, seed=seed)).graph
    g.validate()
    assert loads(dumps(g)).same_structure(g)
    assert (two_color(g).__class__ is Coloring) == (variant != "g2")
