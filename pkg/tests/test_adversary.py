import networkx as nx
import numpy as np
import pytest

from weldlab import adversary as adv
from weldlab.adversary import (Action, AdversaryAction, ContractViolation, KnowledgeGraph, RealBackend,
                               SimulatorBackend, run_against)
from weldlab.generators import Variant
from weldlab.graph import EdgeKind, VertexRole
from weldlab.lazy import LazyInstance
from weldlab.rng import stream

S = EdgeKind.SINGLE


def test_parity_union_find_detects_odd_cycles():
    kg = KnowledgeGraph()
    for x in range(5):
        kg.add_vertex(x, VertexRole.BODY, "fresh")
    for a, b in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        kg.add_edge(a, b, S)
    assert not kg.odd_cycle
    kg.add_edge(0, 4, S)
    kg.add_edge(4, 1, S)
    assert kg.odd_cycle
    kg.check()


def test_double_edges_do_not_count_for_parity():
    kg = KnowledgeGraph()
    for x in range(3):
        kg.add_vertex(x, VertexRole.BODY, "fresh")
    kg.add_edge(0, 1, S)
    kg.add_edge(1, 2, S)
    kg.add_edge(2, 0, EdgeKind.DOUBLE)
    assert not kg.odd_cycle
    with pytest.raises(ContractViolation):
        kg.add_edge(0, 9, S)


def test_add_block_matches_edgewise_parity():
    labels = list(range(100, 115))
    kg = KnowledgeGraph()
    assert kg.add_block(labels, VertexRole.ANTENNA, "half")
    assert kg.edge_count == 14 and not kg.odd_cycle
    kg.add_edge(labels[1], labels[2], S)          # two depth-1 nodes: odd cycle through the top
    assert kg.odd_cycle
    kg2 = KnowledgeGraph()
    kg2.add_vertex(100, VertexRole.ANTENNA, "fresh")
    kg2.add_vertex(5, VertexRole.BODY, "fresh")
    kg2.add_edge(100, 5, S)
    assert not kg2.add_block(labels, VertexRole.ANTENNA, "half", anchor=100)


@pytest.mark.parametrize("variant", ["g1", "g2"])
def test_exhaustive_reveals_whole_instance(variant):
    rng = stream(0, "exhaustive", variant)
    inst = LazyInstance(3, variant, rng)
    tr = run_against(RealBackend(inst, rng), adv.make_strategy("exhaustive"), 10 ** 5, rng)
    kg = tr.kg
    assert len(kg) == inst.n
    assert kg.edge_count == 1400
    kg.check()
    assert tr.guess is Variant(variant)
    G = nx.Graph([(a, b) for a, nb in kg.adj.items() for b, kd in nb.items() if kd is S])
    assert nx.is_bipartite(G) == (variant == "g1")


@pytest.mark.parametrize("name", sorted(adv.STRATEGIES))
def test_strategies_respect_budget(name):
    rng = stream(1, name)
    tr = run_against(RealBackend(LazyInstance(6, "g1", rng), rng), adv.make_strategy(name), 4, rng)
    assert tr.queries_used <= 4
    tr.kg.check()


def test_unknown_strategy():
    with pytest.raises(ValueError):
        adv.make_strategy("oracle")


def test_simulator_gives_fresh_labels_only():
    rng = stream(2, "sim")
    gs = SimulatorBackend.matching(8, rng)
    kg = KnowledgeGraph()
    for _ in range(6):
        adv.simulator_step(gs, kg, AdversaryAction(Action.QUERY_UNKNOWN_BODY))
    assert not kg.odd_cycle
    body = [x for x, r in kg.roles.items() if r == VertexRole.BODY]
    assert all(0 <= x < gs.NB for x in body)


def test_signatures_have_case_and_counts():
    rng = stream(3, "sig")
    inst = LazyInstance(8, "g1", rng)
    tr = run_against(RealBackend(inst, rng), adv.make_strategy("mixed"), 5, rng)
    for rev in tr.reveals:
        sig = rev.signature()
        assert sig[0] in ("I", "II", "IIIa", "IIIb", "IVa", "IVb")
        assert all(isinstance(x, int) for x in sig[1:])


def test_game_spec_validation():
    with pytest.raises(ValueError):
        adv.GameSpec("E", 8, 2)
    with pytest.raises(ValueError):
        adv.GameSpec("A", 4, 9)


def test_game_bound_shape():
    assert adv.game_bound(16, 4) == pytest.approx(1.0)
    assert adv.game_bound(8, 4) == pytest.approx(4.0)


def test_games_reproducible():
    spec = adv.GameSpec("D", 10, 5, 200)
    a = adv.run_game(spec, "random-walk", seed=4)
    b = adv.run_game(spec, "random-walk", seed=4)
    assert a.wins == b.wins
    lo, hi = a.interval
    assert lo <= a.win_prob <= hi


def test_wilson_interval():
    lo, hi = adv.wilson(0, 100)
    assert lo == 0 and 0.03 < hi < 0.04
    assert adv.wilson(0, 0) == (0.0, 1.0)


def test_distinguishing_small_budget_has_no_advantage():
    r = adv.distinguishing_experiment(10, 2, "bfs", 100, seed=1)
    assert r.advantage_upper <= 0.1
    assert set(r.tv_to_simulator) == {"g1", "g2"}


def test_exhaustive_distinguishes_at_large_budget():
    r = adv.distinguishing_experiment(3, 10 ** 4, "exhaustive", 5, seed=1, diagnostics=False)
    assert r.advantage == 1.0


def test_fidelity_smoke():
    rep = adv.simulator_fidelity(8, 3, 150, seed=2)
    assert set(rep.p_values) == {"g1-steps", "g1-labels", "g2-steps", "g2-labels"}
    assert rep.kept["sim"] > 0
