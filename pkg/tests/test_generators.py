import networkx as nx
import numpy as np
import pytest

from weldlab.generators import (InstanceSpec, Variant, build_instance, candy_size, expected_census,
                                instance_size, loop_class_sizes, make_root_joined_tree, sample_instance,
                                tree_size, weld_parity)
from weldlab.graph import EdgeKind, GraphError, VertexRole

# closed forms checked by hand for k = 3: 28 pairs of 29-vertex trees
FROZEN_K3 = {"tree": 29, "candy": 58, "n": 812, "loops": (3, 8, 3)}


def test_sizes_k3():
    assert tree_size(3) == FROZEN_K3["tree"]
    assert candy_size(3) == FROZEN_K3["candy"]
    assert instance_size(3) == FROZEN_K3["n"]
    assert loop_class_sizes(3) == FROZEN_K3["loops"]


@pytest.mark.parametrize("k", range(2, 9))
def test_loop_classes_partition_pairs(k):
    zero, one, two = loop_class_sizes(k)
    assert zero + one + two == 2 * (2 ** k - 1)
    # antenna of odd-loop pairs matches the weld vertices exactly, even-loop pairs the interior
    antenna_per_pair = 2 * (2 ** (k + 1) - 2)
    c = expected_census(k)
    assert one * antenna_per_pair == c.weld
    assert (zero + two) * antenna_per_pair == c.interior


def test_conventions_swap_parity():
    assert weld_parity("odd-weld") == 1 and weld_parity("even-weld") == 0


def test_spec_validation():
    with pytest.raises(GraphError):
        InstanceSpec(1)
    with pytest.raises(GraphError):
        InstanceSpec(3, "g1", j=2)
    with pytest.raises(ValueError):
        InstanceSpec(3, "g3")
    with pytest.raises(GraphError):
        InstanceSpec(3, advice_convention="other")


def test_template_shape():
    tpl = make_root_joined_tree(3)
    g = tpl.graph()
    g.validate()
    assert tpl.size == 29
    assert (tpl.roles == VertexRole.ROOT).sum() == 1
    assert len(tpl.body_leaves) == 8
    assert nx.is_tree(nx.Graph(list((a, b) for a, b, _ in g.edge_set())))


def weld_graph(inst):
    g = inst.graph
    w = set(np.flatnonzero(inst.is_weld).tolist())
    return nx.Graph([(a, b) for a, b, kd in g.edge_set([EdgeKind.SINGLE]) if a in w and b in w])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_g1_welds_are_single_alternating_cycles(k):
    inst = build_instance(InstanceSpec(k, "g1", seed=5))
    layout = inst.layout()
    W = weld_graph(inst)
    comps = list(nx.connected_components(W))
    assert len(comps) == inst.spec.pairs
    for comp in comps:
        sub = W.subgraph(comp)
        assert len(comp) == 2 ** (k + 1) and all(d == 2 for _, d in sub.degree())
        assert nx.is_bipartite(sub)
        trees = {int(layout.tree_of(v)) for v in comp}
        assert len(trees) == 2 and len({t // 2 for t in trees}) == 1
        assert all(layout.tree_of(a) != layout.tree_of(b) for a, b in sub.edges)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_g2_welds_stay_inside_trees(k):
    inst = build_instance(InstanceSpec(k, "g2", seed=5))
    layout = inst.layout()
    W = weld_graph(inst)
    comps = list(nx.connected_components(W))
    assert len(comps) == 2 * inst.spec.pairs
    assert all(len(c) == 2 ** k and len({int(layout.tree_of(v)) for v in c}) == 1 for c in comps)


def test_advice_edges_respect_loop_parity(g1_k3):
    inst = g1_k3
    g, layout = inst.graph, inst.layout()
    parity = inst.loops.pair_class % 2
    body = np.flatnonzero(g.roles == VertexRole.BODY)
    partner = g.nbr[body, 3]
    assert (g.kind[body, 3] == EdgeKind.DOUBLE).all()
    assert (g.roles[partner] == VertexRole.ANTENNA).all()
    odd = parity[layout.pair_of(partner)] == weld_parity()
    assert np.array_equal(odd, inst.is_weld[body])


def test_build_is_deterministic():
    a = build_instance(InstanceSpec(3, "g2", seed=9)).graph
    b = build_instance(InstanceSpec(3, "g2", seed=9)).graph
    c = build_instance(InstanceSpec(3, "g2", seed=10)).graph
    assert a.same_structure(b) and not a.same_structure(c)


def test_siblings_share_steps_a_to_c():
    a = build_instance(InstanceSpec(3, "g1", seed=4))
    b = build_instance(InstanceSpec(3, "g2", seed=4))
    assert np.array_equal(a.graph.loops, b.graph.loops)
    assert np.array_equal(a.graph.nbr[:, 3], b.graph.nbr[:, 3])


def test_yes_variant_with_multiplicity():
    inst = build_instance(InstanceSpec(2, "yes", j=2, seed=1))
    assert inst.graph.vertex_count == instance_size(2, 2)
    inst.graph.validate()


def test_expected_census_k3():
    c = expected_census(3)
    assert (c.vertices, c.roots, c.weld, c.interior, c.antenna) == (812, 28, 224, 168, 392)
    assert c.loops == 14
    assert expected_census(3, variant=Variant.G2) == c


def test_sample_bundle(g1_k3):
    s = sample_instance(InstanceSpec(3, "g1", seed=11))
    assert s.graph.same_structure(g1_k3.graph)
    assert s.truth.bits.sum() == 224
