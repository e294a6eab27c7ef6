import itertools

import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from weldlab.analysis import (EXACT_LIMIT, Coloring, DistanceReport, DomainError, OddCycle, bipartite_distance,
                              exact_distance, is_odd_cycle, local_search_cut, monochromatic, odd_cycle_packing,
                              reduced_graph, sibling_distance, structural_census, two_color, weld_subgraph)
from weldlab.generators import InstanceSpec, build_instance, expected_census
from weldlab.graph import MultiGraph


def adjacency(n, edges):
    A = sp.lil_matrix((n, n), dtype=np.int8)
    for a, b in edges:
        A[a, b] = A[b, a] = 1
    return A.tocsr()


def brute_force(n, edges):
    best = len(edges)
    for bits in itertools.product((0, 1), repeat=n - 1):
        c = (0,) + bits
        best = min(best, sum(c[a] == c[b] for a, b in edges))
    return best


def petersen():
    return [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + \
           [(5 + i, 5 + (i + 2) % 5) for i in range(5)]


def test_two_color_bipartite_and_odd():
    even = adjacency(6, [(i, (i + 1) % 6) for i in range(6)])
    col = two_color(even)
    assert isinstance(col, Coloring) and monochromatic(even, col.colors) == 0
    odd = adjacency(7, [(i, (i + 1) % 7) for i in range(7)])
    cyc = two_color(odd)
    assert isinstance(cyc, OddCycle) and len(cyc.witness) == 7 and is_odd_cycle(odd, cyc.witness)


def test_witness_is_a_cycle_in_petersen():
    A = adjacency(10, petersen())
    cyc = two_color(A)
    assert isinstance(cyc, OddCycle) and is_odd_cycle(A, cyc.witness)
    assert not is_odd_cycle(A, [0, 1, 2, 3])


@pytest.mark.parametrize("seed", range(6))
def test_bounds_bracket_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 11
    G = nx.gnm_random_graph(n, 22, seed=seed)
    edges = list(G.edges)
    A = adjacency(n, edges)
    truth = brute_force(n, edges)
    lb = len(odd_cycle_packing(A))
    ub, colors = local_search_cut(A, seed=int(rng.integers(100)))
    assert lb <= truth <= ub
    assert monochromatic(A, colors) == ub
    assert exact_distance(A) == truth


def test_exact_domain_limit():
    A = adjacency(EXACT_LIMIT + 1, [(i, (i + 1) % (EXACT_LIMIT + 1)) for i in range(EXACT_LIMIT + 1)])
    with pytest.raises(DomainError):
        exact_distance(A)


def test_exact_sums_components():
    tri = [(0, 1), (1, 2), (2, 0)]
    A = adjacency(6, tri + [(a + 3, b + 3) for a, b in tri])
    assert exact_distance(A) == 2


def test_packing_cycles_are_edge_disjoint():
    A = adjacency(10, petersen())
    cycles = odd_cycle_packing(A)
    used = set()
    for c in cycles:
        assert is_odd_cycle(A, c)
        es = {frozenset(e) for e in zip(c, c[1:] + c[:1])}
        assert not used & es
        used |= es


def test_report_invariants():
    with pytest.raises(AssertionError):
        DistanceReport(False, [0, 1, 2], 5, 3)
    with pytest.raises(AssertionError):
        DistanceReport(True, [0, 1, 2], 0, 0)
    with pytest.raises(ValueError):
        bipartite_distance(adjacency(3, []), mode="sdp")


def test_reduced_graph_drops_doubles(g1_k3):
    A = reduced_graph(g1_k3.graph)
    singles = sum(1 for *_, kd in g1_k3.graph.edge_set() if kd == 1)
    assert A.nnz == 2 * singles


def test_g1_bipartite_g2_not(g1_k3, g2_k3):
    r1 = bipartite_distance(g1_k3.graph, "ub")
    assert r1.is_bipartite and r1.upper_bound == 0
    r2 = bipartite_distance(g2_k3.graph, "lb")
    assert not r2.is_bipartite and r2.lower_bound >= 1


def test_g2_k3_distance_report():
    # frozen: packing, local search and branch-and-bound on one pinned k=3 G2 instance
    g = build_instance(InstanceSpec(3, "g2", seed=7)).graph
    r = bipartite_distance(g, "exact", seed=0)
    assert (r.lower_bound, r.upper_bound, r.exact) == (62, 86, 84)


def milp_distance(A):
    """Independent route: min monochromatic edges as a 0/1 program."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    A = sp.triu(A, 1).tocoo()
    n, m = A.shape[0], A.nnz
    rows = []
    for e, (a, b) in enumerate(zip(A.row, A.col)):
        for sa in (1, -1):              # y_e >= 1 - x_a - x_b and y_e >= x_a + x_b - 1
            r = np.zeros(n + m)
            r[[a, b]] = sa
            r[n + e] = 1
            rows.append((r, 1 if sa == 1 else -1))
    M = np.array([r for r, _ in rows])
    lo = np.array([b for _, b in rows])
    c = np.r_[np.zeros(n), np.ones(m)]
    integrality = np.ones(n + m)
    res = milp(c, constraints=LinearConstraint(M, lo, np.inf), integrality=integrality,
               bounds=Bounds(0, 1))
    return round(res.fun)


def test_exact_matches_milp_on_g2_components():
    from scipy.sparse.csgraph import connected_components
    A = reduced_graph(build_instance(InstanceSpec(3, "g2", seed=7)).graph)
    _, comp = connected_components(A, directed=False)
    for c in range(4):
        idx = np.flatnonzero(comp == c)
        sub = A[idx][:, idx]
        assert exact_distance(sub) == milp_distance(sub)


def test_weld_subgraph_shape(g1_k3):
    A, verts = weld_subgraph(g1_k3, 4)
    assert A.shape[0] == len(verts)


def test_census_passes_and_detects(g1_k3):
    rep = structural_census(g1_k3)
    assert rep.passed and rep.census == rep.expected
    g = g1_k3.graph
    loops = g.loops.copy()
    loops[np.flatnonzero(loops)[0]] = False
    broken = MultiGraph(g.nbr, g.kind, loops, g.roles, k=3)
    bad = structural_census(broken)
    assert not bad.passed and any("loop" in f for f in bad.failures)


def test_census_empty_graph():
    rep = structural_census(MultiGraph.empty())
    assert rep.passed and rep.census.vertices == 0


def test_census_rows_cover_fields(g2_k3):
    rows = structural_census(g2_k3).rows()
    assert ("vertices", 812, 812) in rows
    assert ("loop_classes", "3;8;3", "3;8;3") in rows


def test_sibling_distance_frozen():
    # frozen from the k=3 pair with seed 0: every weld edge differs, and nothing else
    sd = sibling_distance(3, 0)
    assert sd.vertices == 812 and sd.differing_edges == 448
    assert sd.differing_edges == 2 * expected_census(3).weld
