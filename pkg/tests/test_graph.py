import numpy as np
import pytest

from weldlab.graph import EdgeKind, GraphError, Ignore, MultiGraph, OracleHandle, VertexRole
from weldlab.graphio import ParseError, dumps, load_advice, loads, save_advice


def small():
    return MultiGraph.from_edges(4, singles=[(0, 1), (1, 2)], doubles=[(2, 3)], loops=[0],
                                 roles=[0, 0, 1, 2], k=0)


def test_degrees_count_doubles_twice():
    g = small()
    assert g.degrees().tolist() == [2, 2, 3, 2]
    assert g.degrees(Ignore.DOUBLE).tolist() == [2, 2, 1, 0]
    assert g.degrees(Ignore.LOOP | Ignore.DOUBLE).tolist() == [1, 2, 1, 0]


def test_neighbors_and_roles():
    g = small()
    assert sorted(g.neighbors(2)) == [(1, EdgeKind.SINGLE), (3, EdgeKind.DOUBLE)]
    assert g.role(3) is VertexRole.ROOT
    with pytest.raises(GraphError):
        g.neighbors(9)


@pytest.mark.parametrize("kwargs", [
    {"singles": [(0, 0)]},
    {"singles": [(0, 1), (1, 0)]},
    {"singles": [(0, 8)]},
    {"singles": [(0, i) for i in range(1, 7)]},
])
def test_from_edges_rejects(kwargs):
    with pytest.raises(GraphError):
        MultiGraph.from_edges(8, **kwargs)


def test_asymmetric_table_rejected():
    nbr = np.full((2, 5), -1)
    nbr[0, 0] = 1
    kind = np.zeros((2, 5), np.int8)
    kind[0, 0] = 1
    with pytest.raises(GraphError, match="asymmetric"):
        MultiGraph(nbr, kind, np.zeros(2, bool), np.zeros(2, np.int8))


def test_roundtrip_text(g2_k3):
    g = loads(dumps(g2_k3.graph))
    assert g.same_structure(g2_k3.graph)
    assert g.k == 3 and g.variant == "g2"


def test_parse_errors():
    with pytest.raises(ParseError):
        loads("weldlab-graph v2 n=1 k=0 variant=custom\n0 role=body loop=0 :\n")
    with pytest.raises(ParseError, match="line 2"):
        loads("weldlab-graph v1 n=1 k=0 variant=custom\n0 role=leaf loop=0 :\n")


def test_advice_sidecar(tmp_path):
    p = tmp_path / "a.advice"
    save_advice([1, 0, 1], p)
    assert load_advice(p).tolist() == [1, 0, 1]
    p.write_text("0 2\n")
    with pytest.raises(ParseError):
        load_advice(p)


def test_oracle_counts_and_relabels(g1_k3):
    o = OracleHandle(g1_k3.graph, seed=3)
    lab = o.label(5)
    a = o.query(lab)
    b = o.answer(lab)
    assert a == b and o.query_counter == 1
    assert {o.vertex_of[x] for x, _ in a.neighbors} == {w for w, _ in g1_k3.graph.neighbors(5)}
    assert sorted(o.label_of.tolist()) == list(range(o.vertex_count))
    twin = o.fork()
    assert twin.query_counter == 0 and twin.label(5) == lab
