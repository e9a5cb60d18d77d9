import numpy as np
import pytest

from oddcoupling import (
    block_decomposition,
    build_graph,
    component_indicators,
    incidence_matrix,
)
from oddcoupling.errors import DuplicateEdgeError, SelfLoopError, ValidationError
from oddcoupling.graphs import graph_from_dict, graph_to_dict, induced_subgraph, parse_edge_list

from helpers import elimination_rank, random_graph


def test_triangle():
    G = build_graph([(0, 1), (1, 2), (2, 0)])
    assert (G.n, G.m, G.c) == (3, 3, 1)
    assert G.edges == ((0, 1), (1, 2), (2, 0))


def test_two_components():
    G = build_graph([(0, 1), (2, 3)])
    assert G.c == 2
    assert G.component_of == (0, 0, 1, 1)


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError):
        build_graph([(0, 0)])


def test_duplicate_rejected_both_orientations():
    with pytest.raises(DuplicateEdgeError):
        build_graph([(0, 1), (1, 0)])
    with pytest.raises(DuplicateEdgeError):
        build_graph([(0, 1), (2, 3), (0, 1)])


def test_bad_labels():
    with pytest.raises(ValidationError):
        build_graph([(-1, 2)])
    with pytest.raises(ValidationError):
        build_graph([(0, 1)], n=1)


def test_isolated_vertices_via_n_override():
    G = build_graph([(0, 1)], n=4)
    assert G.n == 4
    assert G.c == 3
    assert G.degree(3) == 0


def test_single_edge_incidence_column():
    G = build_graph([(0, 1)])
    B = incidence_matrix(G).B
    assert B[:, 0].tolist() == [-1, 1]


def test_incidence_rank_triangle_and_k4():
    tri = build_graph([(0, 1), (1, 2), (2, 0)])
    assert incidence_matrix(tri).rank() == 2
    k4 = build_graph([(i, j) for i in range(4) for j in range(i + 1, 4)])
    inc = incidence_matrix(k4)
    assert inc.B.shape == (4, 6)
    assert inc.rank() == 3
    assert elimination_rank(inc.B) == 3


def test_incidence_columns_sum_to_zero():
    rng = np.random.default_rng(7)
    for _ in range(20):
        G = random_graph(rng)
        B = incidence_matrix(G).B
        assert np.all(B.sum(axis=0) == 0)


def test_rank_equals_n_minus_c_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        G = random_graph(rng)
        inc = incidence_matrix(G)
        assert inc.rank() == G.n - G.c
        assert elimination_rank(inc.B) == G.n - G.c


def test_component_indicators():
    tri = build_graph([(0, 1), (1, 2), (2, 0)])
    D = component_indicators(tri)
    assert D.tolist() == [[1.0, 1.0, 1.0]]
    two = build_graph([(0, 1), (2, 3)])
    D = component_indicators(two)
    assert D.tolist() == [[1, 1, 0, 0], [0, 0, 1, 1]]


def test_indicators_span_left_kernel():
    rng = np.random.default_rng(3)
    for _ in range(20):
        G = random_graph(rng)
        B = incidence_matrix(G).B.astype(float)
        D = component_indicators(G)
        assert np.allclose(B.T @ D.T, 0.0)
        # orthogonal family
        gram = D @ D.T
        assert np.allclose(gram, np.diag(np.diag(gram)))


def test_blocks_two_triangles_sharing_vertex():
    G = build_graph([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    dec = block_decomposition(G)
    assert len(dec.blocks) == 2
    assert dec.cut_vertices == (0,)
    assert sorted(dec.blocks) == [(0, 1, 2), (0, 3, 4)]


def test_blocks_path():
    G = build_graph([(0, 1), (1, 2)])
    dec = block_decomposition(G)
    assert sorted(dec.blocks) == [(0, 1), (1, 2)]
    assert dec.cut_vertices == (1,)


def test_blocks_k4_single():
    G = build_graph([(i, j) for i in range(4) for j in range(i + 1, 4)])
    dec = block_decomposition(G)
    assert len(dec.blocks) == 1
    assert dec.cut_vertices == ()


def test_blocks_partition_edges():
    rng = np.random.default_rng(23)
    for _ in range(30):
        G = random_graph(rng)
        dec = block_decomposition(G)
        all_edges = [e for blk in dec.block_edges for e in blk]
        assert sorted(all_edges) == list(range(G.m))
        # two blocks share at most one vertex, a cut vertex
        for i in range(len(dec.blocks)):
            for j in range(i + 1, len(dec.blocks)):
                shared = set(dec.blocks[i]) & set(dec.blocks[j])
                assert len(shared) <= 1
                assert shared <= set(dec.cut_vertices)


def test_bridge_is_two_vertex_block():
    G = build_graph([(0, 1), (1, 2), (2, 0), (2, 3)])
    dec = block_decomposition(G)
    assert (2, 3) in dec.blocks


def test_induced_subgraph():
    G = build_graph([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    sub, relabel = induced_subgraph(G, [0, 3, 4])
    assert sub.n == 3 and sub.m == 3
    assert relabel == {0: 0, 3: 1, 4: 2}


def test_json_round_trip():
    G = build_graph([(0, 1), (1, 2)], n=4)
    G2 = graph_from_dict(graph_to_dict(G))
    assert G2 == G


def test_parse_edge_list():
    G = parse_edge_list("# comment\n0 1\n1 2  # inline\n\n2 0\n")
    assert (G.n, G.m) == (3, 3)
    with pytest.raises(ValidationError):
        parse_edge_list("0 1 2\n")
    with pytest.raises(ValidationError):
        parse_edge_list("a b\n")
