"""Undirected graph data model: dyad indexing, attributes, missing-state masks, file I/O.

Graphs are simple (no loops, no multi-edges) and stored densely as a symmetric
boolean adjacency matrix.  After construction a Graph is treated as immutable:
the backing arrays are marked read-only so instances can be shared freely
across threads/processes.  Mutation happens on private copies (see
:func:`toggle` and the sampler module).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


class GraphDataError(ValueError):
    """Malformed graph input (bad edgelist row, attribute length mismatch, ...)."""


def n_dyads(n: int) -> int:
    """Number of unordered dyads on n nodes, C(n, 2)."""
    return n * (n - 1) // 2


def dyad_index(i: int, j: int, n: int) -> int:
    """Map an unordered node pair to its linear dyad index in 0..C(n,2)-1.

    Order-insensitive: (i, j) and (j, i) map to the same index.  Indices run
    in row-major upper-triangular order: (0,1), (0,2), ..., (n-2, n-1).
    """
    if i == j:
        raise ValueError(f"self-loop dyad ({i},{i}) is not defined")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"dyad ({i},{j}) out of range for n={n}")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def index_to_dyad(k: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`dyad_index`."""
    if not 0 <= k < n_dyads(n):
        raise IndexError(f"dyad index {k} out of range for n={n}")
    i = 0
    row = n - 1
    while k >= row:
        k -= row
        row -= 1
        i += 1
    return i, i + 1 + k


def all_dyads(n: int) -> np.ndarray:
    """All unordered dyads as an (C(n,2), 2) int array in index order."""
    iu = np.triu_indices(n, k=1)
    return np.column_stack(iu).astype(np.int64)


def validate_dyads(dyads, n: int) -> np.ndarray:
    """Normalize a dyad collection to an (k, 2) array with i<j, checking set semantics."""
    arr = np.asarray(dyads, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GraphDataError("dyad set must be a sequence of (i, j) pairs")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise GraphDataError("dyad set contains a self-loop")
    if arr.min() < 0 or arr.max() >= n:
        raise GraphDataError(f"dyad index out of range for n={n}")
    arr = np.sort(arr, axis=1)
    keys = arr[:, 0] * n + arr[:, 1]
    if len(np.unique(keys)) != len(keys):
        raise GraphDataError("dyad set contains duplicates")
    return arr


class Graph:
    """Undirected simple graph with node attributes and dyad covariates.

    Parameters
    ----------
    n : int
        Node count (isolates allowed; nodes are 0..n-1).
    edges : array-like of (i, j) pairs, optional
    node_attrs : dict of name -> length-n numeric vector, optional
    dyad_covariates : dict of name -> symmetric (n, n) float matrix, optional
    """

    def __init__(self, n, edges=None, node_attrs=None, dyad_covariates=None,
                 adjacency=None):
        if n <= 0:
            raise GraphDataError("node count must be positive")
        self.n = int(n)
        if adjacency is not None:
            adj = np.asarray(adjacency, dtype=bool).copy()
            if adj.shape != (n, n):
                raise GraphDataError("adjacency must be n x n")
            if adj.diagonal().any():
                raise GraphDataError("self-loops are not allowed")
            if not np.array_equal(adj, adj.T):
                raise GraphDataError("adjacency must be symmetric")
        else:
            adj = np.zeros((n, n), dtype=bool)
            if edges is not None and len(edges) > 0:
                e = validate_dyads(edges, n)
                if adj[e[:, 0], e[:, 1]].any() or len(e) != len(set(map(tuple, e))):
                    raise GraphDataError("duplicate edge in edge list")
                adj[e[:, 0], e[:, 1]] = True
                adj[e[:, 1], e[:, 0]] = True
        adj.flags.writeable = False
        self.adj = adj

        self.node_attrs = {}
        for name, vec in (node_attrs or {}).items():
            v = np.asarray(vec, dtype=float).copy()
            if v.shape != (self.n,):
                raise GraphDataError(
                    f"node attribute {name!r} has length {v.shape}, expected {self.n}")
            v.flags.writeable = False
            self.node_attrs[name] = v

        self.dyad_covariates = {}
        for name, mat in (dyad_covariates or {}).items():
            m = np.asarray(mat, dtype=float).copy()
            if m.shape != (self.n, self.n):
                raise GraphDataError(f"dyad covariate {name!r} must be n x n")
            if not np.allclose(m, m.T):
                raise GraphDataError(f"dyad covariate {name!r} must be symmetric")
            m.flags.writeable = False
            self.dyad_covariates[name] = m

    # -- basic views ---------------------------------------------------------

    def edges(self) -> np.ndarray:
        """Edge list as (m, 2) array with i<j, in dyad-index order."""
        iu = np.triu_indices(self.n, k=1)
        mask = self.adj[iu]
        return np.column_stack((iu[0][mask], iu[1][mask])).astype(np.int64)

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1).astype(np.int64)

    def density(self) -> float:
        return self.edge_count / n_dyads(self.n)

    def has_edge(self, i, j) -> bool:
        if i == j:
            raise ValueError("self-loop dyad is not defined")
        return bool(self.adj[i, j])

    def dyad_states(self, dyads: np.ndarray) -> np.ndarray:
        """States (0/1) of the given dyads as a uint8 vector."""
        d = validate_dyads(dyads, self.n)
        if d.size == 0:
            return np.zeros(0, dtype=np.uint8)
        return self.adj[d[:, 0], d[:, 1]].astype(np.uint8)

    def replace_adjacency(self, adjacency: np.ndarray) -> "Graph":
        """New Graph sharing attributes/covariates but with a different adjacency."""
        g = Graph.__new__(Graph)
        g.n = self.n
        adj = np.asarray(adjacency, dtype=bool).copy()
        adj.flags.writeable = False
        g.adj = adj
        g.node_attrs = self.node_attrs
        g.dyad_covariates = self.dyad_covariates
        return g

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.adj, other.adj)
                and self.node_attrs.keys() == other.node_attrs.keys()
                and all(np.array_equal(v, other.node_attrs[k])
                        for k, v in self.node_attrs.items()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


def toggle(g: Graph, dyad) -> Graph:
    """Return a new graph differing from g at exactly one dyad."""
    i, j = dyad
    if i == j:
        raise ValueError("cannot toggle a self-loop")
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise IndexError(f"dyad ({i},{j}) out of range for n={g.n}")
    adj = g.adj.copy()
    adj[i, j] = not adj[i, j]
    adj[j, i] = adj[i, j]
    return g.replace_adjacency(adj)


@dataclass
class PartialGraph:
    """A graph together with the set of dyads whose state is treated as missing.

    ``base`` carries some state for every dyad, but the states of dyads in
    ``free`` are not to be trusted by estimation: they are the held-out part.
    """

    base: Graph
    free: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), np.int64))

    def __post_init__(self):
        self.free = validate_dyads(self.free, self.base.n)

    @property
    def n_free(self) -> int:
        return len(self.free)

    @property
    def n_observed(self) -> int:
        return n_dyads(self.base.n) - self.n_free

    def observed_dyads(self) -> np.ndarray:
        """All dyads not in the free set, in dyad-index order."""
        n = self.base.n
        mask = np.ones(n_dyads(n), dtype=bool)
        if self.n_free:
            idx = [dyad_index(i, j, n) for i, j in self.free]
            mask[idx] = False
        return all_dyads(n)[mask]


# -- file I/O ----------------------------------------------------------------

def load_edgelist(path, n: int, index_base: int = 0) -> Graph:
    """Read a whitespace-separated edgelist (``#`` comments allowed)."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphDataError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            try:
                i, j = int(parts[0]) - index_base, int(parts[1]) - index_base
            except ValueError as exc:
                raise GraphDataError(f"{path}:{lineno}: non-integer node id") from exc
            if i == j:
                raise GraphDataError(f"{path}:{lineno}: self-loop {i + index_base}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphDataError(f"{path}:{lineno}: node id out of range for n={n}")
            edges.append((min(i, j), max(i, j)))
    if len(edges) != len(set(edges)):
        raise GraphDataError(f"{path}: duplicate edge in edgelist")
    return Graph(n, edges=edges)


def load_node_attrs(path, n: int) -> dict[str, np.ndarray]:
    """Read a node-attribute CSV (header row of names, row k = node k)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise GraphDataError(f"{path}: empty attribute file")
    header = [h.strip() for h in rows[0]]
    data = rows[1:]
    if len(data) != n:
        raise GraphDataError(
            f"{path}: {len(data)} attribute rows, expected n={n}")
    out = {}
    for c, name in enumerate(header):
        try:
            out[name] = np.array([float(row[c]) for row in data])
        except (ValueError, IndexError) as exc:
            raise GraphDataError(f"{path}: bad value in column {name!r}") from exc
    return out


def load_dyad_covariate(path, n: int) -> np.ndarray:
    """Read an n x n symmetric matrix from CSV."""
    mat = np.loadtxt(path, delimiter=",")
    if mat.shape != (n, n):
        raise GraphDataError(f"{path}: expected {n}x{n} matrix, got {mat.shape}")
    if not np.allclose(mat, mat.T):
        raise GraphDataError(f"{path}: dyad covariate matrix is not symmetric")
    return mat


def load_graph(edgelist_path, attr_path=None, n: int = None, index_base: int = 0,
               dyad_covariate_paths=None) -> Graph:
    """Load a graph from an edgelist file plus optional attribute/covariate files."""
    if n is None:
        raise GraphDataError("node count n must be given (isolates are invisible "
                             "in an edgelist)")
    g = load_edgelist(edgelist_path, n, index_base=index_base)
    attrs = load_node_attrs(attr_path, n) if attr_path else None
    covs = None
    if dyad_covariate_paths:
        covs = {name: load_dyad_covariate(p, n)
                for name, p in dyad_covariate_paths.items()}
    return Graph(n, adjacency=g.adj, node_attrs=attrs, dyad_covariates=covs)


def save_edgelist(g: Graph, path_or_file, index_base: int = 0) -> None:
    """Write the edge list in the format accepted by :func:`load_edgelist`."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w") if own else path_or_file
    try:
        for i, j in g.edges():
            fh.write(f"{i + index_base} {j + index_base}\n")
    finally:
        if own:
            fh.close()


def edgelist_str(g: Graph) -> str:
    buf = io.StringIO()
    save_edgelist(g, buf)
    return buf.getvalue()


# -- descriptive statistics --------------------------------------------------

def _sample_sd(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def _sample_skewness(x: np.ndarray) -> float:
    """Adjusted Fisher-Pearson sample skewness."""
    n = len(x)
    if n < 3:
        return float("nan")
    m = x.mean()
    m2 = np.mean((x - m) ** 2)
    m3 = np.mean((x - m) ** 3)
    if m2 == 0:
        return float("nan")
    g1 = m3 / m2 ** 1.5
    return float(g1 * np.sqrt(n * (n - 1)) / (n - 2))


def transitivity(g: Graph):
    """Global clustering coefficient: 3 * triangles / connected triples."""
    if g.n < 3:
        return None
    a = g.adj.astype(np.int64)
    triangles_x6 = int(np.trace(a @ a @ a))
    deg = g.degrees()
    triples = int(np.sum(deg * (deg - 1) // 2))
    if triples == 0:
        return None
    return (triangles_x6 / 2) / triples


def descriptives(g: Graph) -> dict:
    """Summary record: size, edges, density, degree moments, isolates, transitivity."""
    deg = g.degrees().astype(float)
    return {
        "size": g.n,
        "edges": g.edge_count,
        "density": g.density(),
        "mean_degree": float(deg.mean()),
        "sd_degree": _sample_sd(deg),
        "skewness_degree": _sample_skewness(deg),
        "isolates": int(np.sum(deg == 0)),
        "transitivity": transitivity(g),
    }
