import numpy as np
import pytest

from kgc import netmetrics as nm

from oracles import efficiency_from_dist, enumerate_paths, floyd_warshall


def _random_digraph(rng, n, density=0.4):
    w = rng.uniform(0.1, 2.0, size=(n, n)) * (rng.uniform(size=(n, n)) < density)
    np.fill_diagonal(w, 0)
    return w


def test_dijkstra_matches_oracles(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        w = _random_digraph(rng, n)
        D = nm.shortest_paths(nm.WeightedDigraph(w))
        np.testing.assert_allclose(D, floyd_warshall(w), atol=1e-10, rtol=0)
        if n <= 6:
            np.testing.assert_allclose(D, enumerate_paths(w), atol=1e-10, rtol=0)
        assert nm.global_efficiency(w) == pytest.approx(efficiency_from_dist(floyd_warshall(w)),
                                                        abs=1e-10)


def test_chain_graph_efficiency():
    # directed chain 0->1->2, unit weights: (1 + 1/2 + 1) / 6
    w = np.diag(np.ones(2), k=1)
    assert nm.global_efficiency(w) == 5 / 12
    w4 = np.diag(np.ones(3), k=1)
    assert nm.global_efficiency(w4) == pytest.approx((3 + 1 + 1 / 3) / 12)


def test_edge_addition_monotone(rng):
    for _ in range(100):
        n = int(rng.integers(3, 9))
        w = _random_digraph(rng, n)
        before = nm.global_efficiency(w)
        i, j = rng.choice(n, size=2, replace=False)
        w2 = w.copy()
        w2[i, j] = max(w2[i, j], rng.uniform(0.1, 2.0))
        assert nm.global_efficiency(w2) >= before - 1e-12


def test_complete_graph():
    w = np.ones((5, 5))
    assert nm.global_efficiency(w) == 1.0
    eloc, mean = nm.local_efficiency(w)
    np.testing.assert_array_equal(eloc, np.ones(5))
    assert mean == 1.0


def test_local_efficiency_star():
    # hub 0 linked both ways to leaves that share no edges
    w = np.zeros((4, 4))
    w[0, 1:] = w[1:, 0] = 1.0
    eloc, _ = nm.local_efficiency(w)
    assert eloc.tolist() == [0.0, 0.0, 0.0, 0.0]
    w[1, 2] = 1.0
    eloc, _ = nm.local_efficiency(w)
    # neighbours of 0 are {1, 2, 3}; only 1->2 exists: 1/6
    assert eloc[0] == pytest.approx(1 / 6)


def test_degrees_and_hubs():
    adj = np.zeros((12, 12), dtype=int)
    adj[0, 1:] = 1
    adj[1:, 0] = 1
    deg = nm.node_degrees(adj)
    assert deg[0] == 22 and all(deg[1:] == 2)
    assert nm.detect_hubs(deg) == [0]
    assert nm.hub_report(deg) == [(0, 22)]
    assert nm.detect_hubs(np.full(5, 3)) == []


def test_graph_validation():
    with pytest.raises(nm.GraphError):
        nm.WeightedDigraph(np.ones((2, 3)))
    with pytest.raises(nm.GraphError):
        nm.WeightedDigraph(-np.ones((2, 2)))
    with pytest.raises(nm.GraphError):
        nm.global_efficiency(np.zeros((1, 1)))
    g = nm.WeightedDigraph(np.ones((3, 3)))
    assert np.all(np.diag(g.weights) == 0)


def test_group_efficiency(rng):
    strong = [_random_digraph(rng, 6, 0.8) * 2 for _ in range(10)]
    weak = [_random_digraph(rng, 6, 0.3) * 0.5 for _ in range(10)]
    res = nm.compare_group_efficiency(strong, weak)
    assert res.mean_a > res.mean_b
    assert res.significant
    with pytest.raises(nm.GraphError):
        nm.compare_group_efficiency(strong[:1], weak)
