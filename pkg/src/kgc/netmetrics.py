"""Degree, hub and efficiency measures on weighted directed graphs.

Edge length is ``1 / weight``; a zero weight means no edge.  Shortest paths
use Dijkstra from every source, O(n (m + n log n)) overall.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .connectome import welch_ttest


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedDigraph:
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(getattr(self.weights, "values", self.weights), dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise GraphError(f"weights must be square, got shape {w.shape}")
        if np.isnan(w).any():
            raise GraphError("weights contain NaN")
        if (w < 0).any():
            raise GraphError("weights must be non-negative")
        np.fill_diagonal(w, 0.0)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def lengths(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.weights > 0, 1.0 / self.weights, np.inf)


def node_degrees(adj) -> np.ndarray:
    """In-degree plus out-degree of a binary directed adjacency matrix."""
    a = (np.asarray(adj) != 0).astype(int)
    np.fill_diagonal(a, 0)
    return a.sum(axis=0) + a.sum(axis=1)


def detect_hubs(degrees) -> list[int]:
    """Nodes whose degree is at least two sample SDs above the mean.

    A degenerate distribution (SD 0) has no hubs.
    """
    deg = np.asarray(degrees, dtype=float)
    if deg.size < 2:
        raise GraphError("need at least two nodes")
    sd = deg.std(ddof=1)
    if sd == 0:
        return []
    return [int(v) for v in np.flatnonzero(deg >= deg.mean() + 2 * sd)]


def hub_report(degrees) -> list[tuple[int, int]]:
    """``(node, degree)`` for each hub, highest degree first."""
    deg = np.asarray(degrees)
    return sorted(((v, int(deg[v])) for v in detect_hubs(deg)), key=lambda x: (-x[1], x[0]))


def shortest_paths(g: WeightedDigraph) -> np.ndarray:
    L = g.lengths()
    n = g.n
    adj = [[(int(v), float(L[u, v])) for v in np.flatnonzero(np.isfinite(L[u]))]
           for u in range(n)]
    D = np.full((n, n), np.inf)
    for src in range(n):
        dist = D[src]
        dist[src] = 0.0
        heap = [(0.0, src)]
        done = np.zeros(n, dtype=bool)
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, luv in adj[u]:
                nd = du + luv
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return D


def global_efficiency(g) -> float:
    if not isinstance(g, WeightedDigraph):
        g = WeightedDigraph(g)
    n = g.n
    if n < 2:
        raise GraphError("need at least two nodes")
    D = shortest_paths(g)
    off = ~np.eye(n, dtype=bool)
    with np.errstate(divide="ignore"):
        inv = 1.0 / D[off]
    return float(inv.sum() / (n * (n - 1)))


def local_efficiency(g) -> tuple[np.ndarray, float]:
    """Per-node efficiency of the subgraph induced by in- and out-neighbours."""
    if not isinstance(g, WeightedDigraph):
        g = WeightedDigraph(g)
    n = g.n
    if n < 2:
        raise GraphError("need at least two nodes")
    w = g.weights
    eloc = np.zeros(n)
    for v in range(n):
        nb = np.flatnonzero((w[v] > 0) | (w[:, v] > 0))
        nb = nb[nb != v]
        if nb.size < 2:
            continue
        eloc[v] = global_efficiency(WeightedDigraph(w[np.ix_(nb, nb)]))
    return eloc, float(eloc.mean())


@dataclass
class GroupEfficiency:
    mean_a: float
    mean_b: float
    t: float
    p: float
    alpha: float
    values_a: list[float]
    values_b: list[float]

    @property
    def significant(self) -> bool:
        return self.p <= self.alpha


def compare_group_efficiency(graphs_a, graphs_b, alpha: float = 0.01) -> GroupEfficiency:
    if len(graphs_a) < 2 or len(graphs_b) < 2:
        raise GraphError("each group needs at least 2 graphs")
    ea = [global_efficiency(g) for g in graphs_a]
    eb = [global_efficiency(g) for g in graphs_b]
    t, p = welch_ttest(ea, eb)
    return GroupEfficiency(float(np.mean(ea)), float(np.mean(eb)), t, p, alpha, ea, eb)
