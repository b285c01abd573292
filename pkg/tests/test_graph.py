import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from popping.errors import InfeasibleInstanceError, InvalidGraphError
from popping.graph import (DirectedGraph, UndirectedGraph,
                           arborescence_toward_root, barbell, bidirect,
                           complete, connected_components, cycle,
                           has_tree_component, is_connected,
                           is_root_connected, lollipop, pack_subset, path,
                           unpack_subset)


# -- bidirect ---------------------------------------------------------------

def test_bidirect_single_edge():
    g = UndirectedGraph(2, [(0, 1)], p=0.3)
    d = bidirect(g)
    assert d.m == 2
    assert sorted(map(tuple, d.arcs.tolist())) == [(0, 1), (1, 0)]
    assert np.allclose(d.p, [0.3, 0.3])
    assert d.twin.tolist() == [1, 0]


def test_bidirect_triangle_twin_is_involution():
    d = bidirect(cycle(3, p=0.5))
    assert d.m == 6
    for a in range(6):
        b = int(d.twin[a])
        assert int(d.twin[b]) == a
        assert tuple(d.arcs[b]) == (int(d.arcs[a, 1]), int(d.arcs[a, 0]))


def test_bidirect_lollipop_arc_count():
    d = bidirect(lollipop(3, 6, p=0.5))
    assert d.m == 36  # 2*3 path arcs + 6*5 clique arcs


def test_bidirect_then_forget_directions_recovers_edges():
    g = lollipop(2, 4, p=0.25)
    d = bidirect(g)
    undirected = {tuple(sorted(a)) for a in map(tuple, d.arcs.tolist())}
    assert undirected == {tuple(e) for e in map(tuple, g.edges.tolist())}


# -- is_root_connected --------------------------------------------------------

def test_root_connected_single_vertex_empty_subset():
    d = DirectedGraph(1, [], np.zeros(0))
    assert is_root_connected(d, np.zeros(0, dtype=bool), 0)


def test_root_connected_single_edge_directions():
    d = bidirect(UndirectedGraph(2, [(0, 1)], p=0.5))
    # arc 0 = 0->1, arc 1 = 1->0; root 0 needs 1 -> 0
    assert is_root_connected(d, np.array([False, True]), 0)
    assert not is_root_connected(d, np.array([True, False]), 0)


def test_root_connected_triangle_path():
    d = bidirect(cycle(3, p=0.5))
    # subset {1->2, 2->0} lets every vertex reach 0
    sub = np.zeros(6, dtype=bool)
    arcs = list(map(tuple, d.arcs.tolist()))
    sub[arcs.index((1, 2))] = True
    sub[arcs.index((2, 0))] = True
    assert is_root_connected(d, sub, 0)
    assert not is_root_connected(d, sub, 1)


# -- has_tree_component -------------------------------------------------------

def test_tree_component_examples():
    assert not has_tree_component(cycle(3))
    assert has_tree_component(path(3))
    tri_plus_edge = UndirectedGraph(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
    assert has_tree_component(tri_plus_edge)


# -- generators ---------------------------------------------------------------

def test_lollipop_counts_and_root():
    g = lollipop(3, 6)
    assert g.n == 9 and g.m == 18 and g.root == 0


def test_cycle_and_path_counts():
    g = cycle(10)
    assert g.n == 10 and g.m == 10
    g = path(4)
    assert g.n == 4 and g.m == 3
    assert complete(5).m == 10


def test_barbell_2_4():
    g = barbell(2, 4)
    assert g.n == 9 and g.m == 2 * 6 + 2
    comps = connected_components(g)
    assert len(comps) == 1


def test_generator_parameter_validation():
    with pytest.raises(InvalidGraphError):
        cycle(2)
    with pytest.raises(InvalidGraphError):
        lollipop(0, 5)
    with pytest.raises(InvalidGraphError):
        barbell(1, 2)


# -- arborescence -------------------------------------------------------------

def test_arborescence_single_edge_forced():
    d = bidirect(UndirectedGraph(2, [(0, 1)], p=0.5))
    tree = arborescence_toward_root(d, 0)
    arcs = list(map(tuple, d.arcs.tolist()))
    assert tree.sum() == 1 and tree[arcs.index((1, 0))]


def test_arborescence_triangle_lowest_index_tiebreak():
    d = bidirect(cycle(3, p=0.5))
    tree = arborescence_toward_root(d, 0)
    arcs = [tuple(a) for a, used in zip(map(tuple, d.arcs.tolist()), tree) if used]
    assert sorted(arcs) == [(1, 0), (2, 0)]


def test_arborescence_path_forced():
    d = bidirect(path(3, p=0.5))
    tree = arborescence_toward_root(d, 0)
    arcs = [tuple(a) for a, used in zip(map(tuple, d.arcs.tolist()), tree) if used]
    assert sorted(arcs) == [(1, 0), (2, 1)]


def test_arborescence_walks_reach_root_without_cycles():
    for g in (complete(5, p=0.5), lollipop(3, 4, p=0.5), barbell(2, 3, p=0.5)):
        d = bidirect(g)
        for r in range(g.n):
            tree = arborescence_toward_root(d, r)
            assert int(tree.sum()) == g.n - 1
            out = {int(d.tail[a]): int(d.head[a])
                   for a in np.nonzero(tree)[0]}
            for v in range(g.n):
                if v == r:
                    assert v not in out
                    continue
                cur, steps = v, 0
                while cur != r:
                    cur = out[cur]
                    steps += 1
                    assert steps <= g.n


def test_arborescence_requires_root_connected():
    d = DirectedGraph(2, [(0, 1)], [0.5])
    with pytest.raises(InfeasibleInstanceError):
        arborescence_toward_root(d, 0)


# -- validation ---------------------------------------------------------------

def test_rejects_self_loop_parallel_and_bad_probs():
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(2, [(0, 0)])
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(2, [(0, 1)], p=1.0)
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(2, [(0, 1)], p=0.0)
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(2, [(0, 1)], w=-2.0)
    with pytest.raises(InvalidGraphError):
        UndirectedGraph(2, [(0, 2)])
    with pytest.raises(InvalidGraphError):
        DirectedGraph(2, [(0, 1), (1, 0)], [0.5, 0.5], twin=[0, 1])


def test_graph_arrays_are_immutable():
    g = cycle(3, p=0.5)
    with pytest.raises(ValueError):
        g.edges[0, 0] = 5
    with pytest.raises(ValueError):
        g.p[0] = 0.9


# -- ingestion ----------------------------------------------------------------

def test_text_roundtrip_p_mode():
    text = """3 3
0 1 0.2
1 2 0.5
0 2 0.8
"""
    g = UndirectedGraph.from_text(text, values="p")
    assert g.n == 3 and g.m == 3
    assert np.allclose(g.p, [0.2, 0.5, 0.8])
    gw = UndirectedGraph.from_text(text, values="w")
    assert np.allclose(gw.w, [0.2, 0.5, 0.8]) and gw.p is None
    gi = UndirectedGraph.from_text(text, values="ignore")
    assert gi.p is None and gi.w is None


def test_text_rejects_malformed():
    with pytest.raises(InvalidGraphError):
        UndirectedGraph.from_text("")
    with pytest.raises(InvalidGraphError):
        UndirectedGraph.from_text("2 1\n0 1 0.5\n0 1 0.5")
    with pytest.raises(InvalidGraphError):
        UndirectedGraph.from_text("2 1\n0 1", values="p")  # value required


def test_object_format_with_root():
    g = UndirectedGraph.from_object(
        {"n": 3, "edges": [[0, 1, 0.5], [1, 2, 0.5]], "root": 2}, values="p")
    assert g.root == 2 and g.m == 2


# -- subset packing ------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.lists(st.booleans(), min_size=0, max_size=30))
def test_pack_unpack_roundtrip(bits):
    arr = np.array(bits, dtype=bool)
    assert np.array_equal(unpack_subset(pack_subset(arr), len(bits)), arr)


def test_components_and_connectivity():
    g = UndirectedGraph(5, [(0, 1), (2, 3)])
    assert connected_components(g) == [[0, 1], [2, 3], [4]]
    assert not is_connected(g)
    assert is_connected(cycle(4))
