import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oversquash.graph import (
    UNREACHABLE,
    GraphError,
    bfs_distances,
    build_graph,
    connected_components,
    diameter,
)

from conftest import complete_graph, path_graph, random_graph


def test_build_path():
    g = build_graph(3, [(0, 1), (1, 2)])
    assert g.num_nodes == 3 and g.num_edges == 2
    assert g.adjacency == ((1,), (0, 2), (1,))


def test_build_dedups_and_drops_self_loops():
    g = build_graph(2, [(0, 1), (1, 0), (0, 0)])
    assert g.edges == ((0, 1),)
    assert g.self_loops_dropped == 1


def test_build_rejects_out_of_range():
    with pytest.raises(GraphError, match=r"\(0, 5\)"):
        build_graph(4, [(0, 5)])


def test_components():
    assert connected_components(path_graph(3)).sizes == (3,)
    two = connected_components(build_graph(4, [(0, 1), (2, 3)]))
    assert two.sizes == (2, 2)
    assert list(two.label) == [0, 0, 1, 1]
    mixed = connected_components(build_graph(3, [(1, 2)]))
    assert sorted(mixed.sizes) == [1, 2]
    assert mixed.label[0] == 0


@pytest.mark.parametrize(
    "g, expected",
    [
        (path_graph(3), 2),
        (complete_graph(4), 1),
        (build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]), 1),
        (build_graph(3, []), 0),
    ],
)
def test_diameter(g, expected):
    assert diameter(g).value == expected


def test_bfs_distances():
    assert list(bfs_distances(path_graph(3), 0)) == [0, 1, 2]
    assert list(bfs_distances(build_graph(3, [(0, 1)]), 0)) == [0, 1, UNREACHABLE]
    assert list(bfs_distances(build_graph(1, []), 0)) == [0]


def _floyd_warshall(g):
    n = g.num_nodes
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in g.edges:
        d[u, v] = d[v, u] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.floats(0.05, 0.6), st.integers(0, 2**32 - 1))
def test_diameter_matches_floyd_warshall(n, p, seed):
    g = random_graph(np.random.default_rng(seed), n, p)
    d = _floyd_warshall(g)
    assert diameter(g).value == int(d[np.isfinite(d)].max())
    comps = connected_components(g)
    same = comps.label[:, None] == comps.label[None, :]
    assert np.array_equal(same, np.isfinite(d))
    assert sum(comps.sizes) == n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.floats(0.05, 0.6), st.integers(0, 2**32 - 1))
def test_rebuild_is_identity(n, p, seed):
    g = random_graph(np.random.default_rng(seed), n, p)
    h = build_graph(g.num_nodes, g.edge_list())
    assert h == g and h.adjacency == g.adjacency


def test_adjacency_symmetric(rng):
    g = random_graph(rng, 10, 0.4)
    for u in range(g.num_nodes):
        for v in g.adjacency[u]:
            assert u in g.adjacency[v]
            assert g.has_edge(u, v) and g.has_edge(v, u)
