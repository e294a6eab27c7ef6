import random

import numpy as np
import pytest

from weldlab.advice import ConstantAdvice, RandomAdvice, parity_advice
from weldlab.generators import InstanceSpec, build_instance, make_root_joined_tree
from weldlab.graph import GraphError, OracleHandle
from weldlab.nbwalk import ROOT, Reason, Rejected, find_parent, find_root_path, nb_walk
from weldlab.tester import (TestContext, TesterConfig, completeness_test, consistency_test, final_test,
                            weld_consistency_test)


def tree_adj(k):
    tpl = make_root_joined_tree(k)
    return tpl, lambda v: [int(w) for w in tpl.nbr[v] if w >= 0]


def test_nb_walk_never_backtracks():
    tpl, adj = tree_adj(4)
    rng = random.Random(0)
    for _ in range(50):
        p = nb_walk(adj, 0, adj(0)[0], 8, rng)
        assert all(p[i] != p[i + 2] for i in range(len(p) - 2))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_find_root_path_on_template(k):
    tpl, adj = tree_adj(k)
    rng = random.Random(1)
    for v in range(tpl.size):
        path = find_root_path(adj, v, k, rng)
        assert not isinstance(path, Rejected)
        assert path[-1] == 0 and len(path) == tpl.depth[v] + 1
        assert all(int(tpl.nbr[a, 0]) == b for a, b in zip(path, path[1:]))


def test_find_parent_root_and_degree():
    tpl, adj = tree_adj(3)
    assert find_parent(adj, 0, 3, random.Random(0)) is ROOT
    res = find_parent(lambda v: [1, 2], 5, 3, random.Random(0))
    assert isinstance(res, Rejected) and res.reason is Reason.BANNED_DEGREE


def ctx(inst, advice, seed=0, **kw):
    return TestContext(inst.oracle.fork(), advice, TesterConfig(inst.k, **kw), seed=seed)


def test_config_derived_counts():
    cfg = TesterConfig(4, eps=0.1)
    assert cfg.completeness_reps == 400 and cfg.advice_tests == 100
    with pytest.raises(GraphError):
        TesterConfig(3, eps=1.5)


def test_truth_advice_accepts_g1(g1_k3):
    v = final_test(ctx(g1_k3, g1_k3.truth()))
    assert v.accept and v.reason is None and v.queries_used > 0


@pytest.mark.parametrize("make", [lambda i: ConstantAdvice(0), lambda i: ConstantAdvice(1),
                                  lambda i: RandomAdvice(3), lambda i: parity_advice(i),
                                  lambda i: i.truth()])
def test_g2_rejected(g2_k3, make):
    v = final_test(ctx(g2_k3, make(g2_k3)))
    assert not v.accept and isinstance(v.reason, Reason)


def test_subtests_accept_every_g1_vertex(g1_k3):
    c = ctx(g1_k3, g1_k3.truth())
    rng = np.random.default_rng(0)
    for label in rng.choice(g1_k3.graph.vertex_count, 40, replace=False):
        for sub in (consistency_test, weld_consistency_test, completeness_test):
            assert sub(c, int(label)).accept


def test_flipped_weld_bit_is_caught(g1_k3):
    truth = g1_k3.truth()
    bits = truth.bits.copy()
    o = g1_k3.oracle
    w = int(np.flatnonzero(g1_k3.is_weld)[0])
    bits[o.label(w)] = 0
    from weldlab.advice import TableAdvice
    c = ctx(g1_k3, TableAdvice(bits))
    assert not consistency_test(c, o.label(w)).accept or not final_test(c).accept


def test_verdict_is_reproducible(g2_k3):
    a = final_test(ctx(g2_k3, RandomAdvice(1), seed=4))
    b = final_test(ctx(g2_k3, RandomAdvice(1), seed=4))
    assert (a.accept, a.reason, a.queries_used) == (b.accept, b.reason, b.queries_used)
