"""Node centralities and Freeman centralization for undirected graphs.

Betweenness uses the pair-dependency accumulation algorithm over unweighted
shortest paths (endpoints excluded, each unordered pair counted once;
unreachable pairs contribute nothing).  Eigenvector centrality is the
principal eigenvector of the adjacency matrix by power iteration.
"""

from __future__ import annotations

import warnings
from collections import deque

import numpy as np

from .graph import Graph

DEGREE = "degree"
BETWEENNESS = "betweenness"
EIGENVECTOR = "eigenvector"

_KINDS = (DEGREE, BETWEENNESS, EIGENVECTOR)


def degree_centrality(g: Graph) -> np.ndarray:
    return g.degrees().astype(float)


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Raw (unnormalized) betweenness; each unordered pair counted once."""
    n = g.n
    neighbors = [np.flatnonzero(g.adj[v]) for v in range(n)]
    bc = np.zeros(n)
    for s in range(n):
        # single-source shortest paths with path counting
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        preds = [[] for _ in range(n)]
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # back-propagate pair dependencies
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def eigenvector_centrality(g: Graph, tol: float = 1e-10,
                           max_iter: int = 100000) -> np.ndarray:
    """Principal eigenvector, Euclidean norm 1, nonnegative orientation.

    Power iteration runs on A + I so bipartite graphs (where +/- the leading
    eigenvalue tie) still converge; the shift leaves eigenvectors unchanged.
    """
    n = g.n
    a = g.adj.astype(float)
    if g.edge_count == 0:
        warnings.warn("eigenvector centrality of an empty graph is zero")
        return np.zeros(n)
    m = a + np.eye(n)
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = m @ x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    else:
        warnings.warn("eigenvector centrality: power iteration hit the "
                      "iteration cap (near-tied leading eigenvalues?)")
    if x.sum() < 0:
        x = -x
    x[np.abs(x) < 1e-15] = 0.0
    return x


def centrality(g: Graph, kind: str) -> np.ndarray:
    if kind == DEGREE:
        return degree_centrality(g)
    if kind == BETWEENNESS:
        return betweenness_centrality(g)
    if kind == EIGENVECTOR:
        return eigenvector_centrality(g)
    raise ValueError(f"unknown centrality kind {kind!r}; expected one of {_KINDS}")


def centralization_max(n: int, kind: str) -> float:
    """Theoretical maximum of the raw centralization sum (attained by a star)."""
    if kind == DEGREE:
        return float((n - 1) * (n - 2))
    if kind == BETWEENNESS:
        return float((n - 1) ** 2 * (n - 2) / 2.0)
    raise ValueError(f"no centralization maximum defined for {kind!r}")


def centralization(g: Graph, kind: str) -> float:
    """Freeman centralization sum(max C - C_i), normalized to [0, 1]."""
    if g.n < 3:
        raise ValueError("centralization undefined for n < 3")
    c = centrality(g, kind)
    raw = float(np.sum(c.max() - c))
    return raw / centralization_max(g.n, kind)
