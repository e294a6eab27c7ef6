import random

import numpy as np
import pytest

from weldlab.generators import InstanceSpec, build_instance
from weldlab.marker import AdviceMap, LeafScan, classify_vertex, find_exit, leaf_scan
from weldlab.qwalk import walk_cost


@pytest.mark.parametrize("k,variant", [(2, "g1"), (3, "g1"), (3, "yes")])
def test_marker_matches_truth(k, variant):
    inst = build_instance(InstanceSpec(k, variant, seed=21))
    o = inst.oracle
    amap = AdviceMap(o, k, seed=1)
    marks = np.array([amap.mark(o.label(v)) for v in range(o.vertex_count)])
    assert np.array_equal(marks, inst.is_weld.astype(int))
    assert amap.malformed == 0


def test_classify_costs(g1_k3):
    o = g1_k3.oracle
    w = int(np.flatnonzero(g1_k3.is_weld)[0])
    res = classify_vertex(o, o.label(w), 3, seed=2)
    assert res.bit == 1 and res.malformed is None
    assert res.quantum_queries == walk_cost(3)
    assert res.classical_queries > 0
    root = classify_vertex(o, o.label(0), 3)
    assert root.bit == 0 and root.quantum_queries == 0


def test_memoized_marks_do_not_recharge(g1_k3):
    o = g1_k3.oracle
    amap = AdviceMap(o, 3)
    w = o.label(int(np.flatnonzero(g1_k3.is_weld)[3]))
    amap.mark(w)
    q = amap.modeled_quantum_queries
    amap.mark(w)
    assert amap.modeled_quantum_queries == q and amap.evaluations == 2
    assert o.query_counter == 0


def test_leaf_scan_roles(g1_k3):
    o = g1_k3.oracle
    rng = random.Random(0)
    w = int(np.flatnonzero(g1_k3.is_weld)[0])
    assert leaf_scan(o, o.label(w), 3, rng) is not LeafScan.NOT_IN_W
    assert leaf_scan(o, o.label(0), 3, rng) is LeafScan.NOT_IN_W


def test_find_exit_pairs_roots(g1_k3):
    o = g1_k3.oracle
    T = 29
    for tree in (0, 5, 17):
        partner = find_exit(o, o.label(tree * T), 3, random.Random(tree))
        assert int(o.vertex_of[partner]) == (tree ^ 1) * T
