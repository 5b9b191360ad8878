"""Shared test helpers: random graph factories and independent oracles.

The oracles here are deliberately naive re-implementations (explicit loops,
exhaustive path enumeration) so the library is checked against something
that cannot share its bugs.
"""

import numpy as np

from hopergm import Graph


def random_graph(n, density=0.4, seed=0, attrs=False, dyad_cov=False):
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, k=1)
    vals = rng.random(len(iu[0])) < density
    adj[iu] = vals
    adj = adj | adj.T
    node_attrs = None
    covs = None
    if attrs:
        node_attrs = {
            "group": rng.integers(1, 4, size=n).astype(float),
            "score": np.round(rng.normal(size=n), 2),
        }
    if dyad_cov:
        w = rng.normal(size=(n, n))
        w = (w + w.T) / 2.0
        np.fill_diagonal(w, 0.0)
        covs = {"dist": w}
    return Graph(n, adjacency=adj, node_attrs=node_attrs,
                 dyad_covariates=covs)


def naive_stats(g, model):
    """Loop-based sufficient statistics, one term family at a time."""
    n = g.n
    adj = g.adj
    out = []
    for t in model.terms:
        if t.term == "edges":
            out.append(sum(adj[i, j] for i in range(n) for j in range(i + 1, n)))
        elif t.term == "gwesp":
            u = 1.0 - np.exp(-t.decay)
            s = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    if adj[i, j]:
                        esp = sum(adj[i, k] and adj[j, k] for k in range(n))
                        s += np.exp(t.decay) * (1.0 - u ** esp)
            out.append(s)
        elif t.term == "gwdegree":
            u = 1.0 - np.exp(-t.decay)
            s = 0.0
            for i in range(n):
                d = int(adj[i].sum())
                s += np.exp(t.decay) * (1.0 - u ** d)
            out.append(s)
        elif t.term == "nodematch":
            x = g.node_attrs[t.attr]
            out.append(sum(adj[i, j] and x[i] == x[j]
                           for i in range(n) for j in range(i + 1, n)))
        elif t.term == "nodematch_diff":
            x = g.node_attrs[t.attr]
            for lvl in t.levels(g):
                out.append(sum(adj[i, j] and x[i] == lvl and x[j] == lvl
                               for i in range(n) for j in range(i + 1, n)))
        elif t.term == "nodecov":
            x = g.node_attrs[t.attr]
            out.append(sum((x[i] + x[j]) for i in range(n)
                           for j in range(i + 1, n) if adj[i, j]))
        elif t.term == "edgecov":
            w = g.dyad_covariates[t.attr]
            out.append(sum(w[i, j] for i in range(n)
                           for j in range(i + 1, n) if adj[i, j]))
    return np.array(out, dtype=float)


def brute_betweenness(adj):
    """Betweenness by exhaustive enumeration of all simple paths.

    Feasible only for very small graphs; counts, for every unordered pair,
    the fraction of geodesics passing through each interior node.
    """
    adj = np.asarray(adj, dtype=bool)
    n = len(adj)
    bc = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            paths = []
            stack = [(s, (s,))]
            while stack:
                v, path = stack.pop()
                if v == t:
                    paths.append(path)
                    continue
                for w in range(n):
                    if adj[v, w] and w not in path:
                        stack.append((w, path + (w,)))
            if not paths:
                continue
            d = min(len(p) for p in paths)
            geos = [p for p in paths if len(p) == d]
            for v in range(n):
                if v in (s, t):
                    continue
                bc[v] += sum(v in p for p in geos) / len(geos)
    return bc
