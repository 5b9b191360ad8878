"""Model terms: sufficient statistics and change scores for binary undirected ERGMs.

Supported term families: edge count, geometrically weighted edgewise shared
partners (fixed decay), geometrically weighted degree (fixed decay), uniform
and differential homophily, node covariate, and edge covariate.  Decay
parameters are user-fixed constants; curved estimation is out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graph import Graph


class ModelSpecError(ValueError):
    """A term references something the graph does not have, or is malformed."""


EDGES = "edges"
GWESP = "gwesp"
GWDEG = "gwdegree"
NODEMATCH = "nodematch"
NODEMATCH_DIFF = "nodematch_diff"
NODECOV = "nodecov"
EDGECOV = "edgecov"


@dataclass(frozen=True)
class TermSpec:
    """One model term.  ``decay`` applies to gwesp/gwdegree, ``attr`` to the
    covariate terms, ``keep`` to differential homophily (levels in ascending
    order; None = all observed levels)."""

    term: str
    decay: float = None
    attr: str = None
    keep: tuple = None

    def __post_init__(self):
        if self.term not in (EDGES, GWESP, GWDEG, NODEMATCH, NODEMATCH_DIFF,
                             NODECOV, EDGECOV):
            raise ModelSpecError(f"unknown term {self.term!r}")
        if self.term in (GWESP, GWDEG):
            if self.decay is None or self.decay < 0:
                raise ModelSpecError(f"{self.term} requires decay >= 0")
        if self.term in (NODEMATCH, NODEMATCH_DIFF, NODECOV, EDGECOV) and not self.attr:
            raise ModelSpecError(f"{self.term} requires an attribute name")

    def coordinate_names(self, g: Graph) -> list[str]:
        if self.term == EDGES:
            return ["edges"]
        if self.term == GWESP:
            return [f"gwesp[{self.decay:g}]"]
        if self.term == GWDEG:
            return [f"gwdegree[{self.decay:g}]"]
        if self.term == NODEMATCH:
            return [f"nodematch.{self.attr}"]
        if self.term == NODEMATCH_DIFF:
            return [f"nodematch.{self.attr}[{lvl:g}]" for lvl in self.levels(g)]
        if self.term == NODECOV:
            return [f"nodecov.{self.attr}"]
        return [f"edgecov.{self.attr}"]

    def levels(self, g: Graph) -> list[float]:
        """Kept levels for differential homophily, ascending."""
        x = self._node_attr(g)
        observed = sorted(set(x.tolist()))
        if self.keep is None:
            return observed
        kept = sorted(float(v) for v in self.keep)
        missing = [v for v in kept if v not in observed]
        if missing:
            raise ModelSpecError(
                f"nodematch levels {missing} not observed in attribute {self.attr!r}")
        return kept

    def dimension(self, g: Graph) -> int:
        return len(self.levels(g)) if self.term == NODEMATCH_DIFF else 1

    def _node_attr(self, g: Graph) -> np.ndarray:
        try:
            return g.node_attrs[self.attr]
        except KeyError:
            raise ModelSpecError(
                f"graph has no node attribute {self.attr!r}") from None

    def _dyad_cov(self, g: Graph) -> np.ndarray:
        try:
            return g.dyad_covariates[self.attr]
        except KeyError:
            raise ModelSpecError(
                f"graph has no dyad covariate {self.attr!r}") from None


@dataclass(frozen=True)
class ModelSpec:
    """Ordered list of terms; term order fixes coefficient order downstream."""

    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))
        if not self.terms:
            raise ModelSpecError("model must contain at least one term")

    def dimension(self, g: Graph) -> int:
        return sum(t.dimension(g) for t in self.terms)

    def coordinate_names(self, g: Graph) -> list[str]:
        names = []
        for t in self.terms:
            names.extend(t.coordinate_names(g))
        return names

    @property
    def is_dyadic_independent(self) -> bool:
        """True when no term couples distinct dyads (no gwesp/gwdegree)."""
        return all(t.term not in (GWESP, GWDEG) for t in self.terms)

    def validate(self, g: Graph) -> None:
        self.dimension(g)
        for t in self.terms:
            if t.term in (NODEMATCH, NODEMATCH_DIFF, NODECOV):
                t._node_attr(g)
            elif t.term == EDGECOV:
                t._dyad_cov(g)

    def to_json(self) -> str:
        out = []
        for t in self.terms:
            d = {"term": t.term}
            if t.decay is not None:
                d["decay"] = t.decay
            if t.attr is not None:
                d["attr"] = t.attr
            if t.keep is not None:
                d["keep"] = list(t.keep)
            out.append(d)
        return json.dumps(out)


def model_from_json(text: str) -> ModelSpec:
    """Parse a model from a JSON term array.

    Schema: ``[{"term": "edges"}, {"term": "gwesp", "decay": 0.75},
    {"term": "nodematch", "attr": "office", "diff": true, "keep": [1, 2]}]``.
    ``nodematch`` with ``"diff": true`` maps to the differential variant.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSpecError(f"invalid model JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ModelSpecError("model JSON must be an array of term objects")
    terms = []
    for item in raw:
        if not isinstance(item, dict) or "term" not in item:
            raise ModelSpecError(f"bad term entry: {item!r}")
        name = item["term"]
        if name == NODEMATCH and item.get("diff"):
            name = NODEMATCH_DIFF
        keep = item.get("keep")
        terms.append(TermSpec(term=name, decay=item.get("decay"),
                              attr=item.get("attr"),
                              keep=tuple(keep) if keep is not None else None))
    return ModelSpec(terms)


# -- shared-partner and degree distributions ---------------------------------

def ep_distribution(g: Graph) -> np.ndarray:
    """EP[k] = number of edges whose endpoints have exactly k common neighbors,
    for k = 0..n-2.  Sums to the edge count."""
    n = g.n
    a = g.adj.astype(np.int64)
    common = a @ a
    iu = np.triu_indices(n, k=1)
    esp = common[iu][g.adj[iu]]
    counts = np.bincount(esp, minlength=max(n - 1, 1))
    return counts[:max(n - 1, 1)].astype(np.int64)


def dg_distribution(g: Graph) -> np.ndarray:
    """D[k] = number of nodes with exactly k neighbors, for k = 0..n-1."""
    return np.bincount(g.degrees(), minlength=g.n).astype(np.int64)


def gw_weighted_sum(counts: np.ndarray, decay: float, k_start: int) -> float:
    """exp(decay) * sum_k {1 - (1 - e^-decay)^k} counts[k], k from k_start."""
    u = 1.0 - np.exp(-decay)
    ks = np.arange(len(counts))
    weights = 1.0 - u ** ks
    return float(np.exp(decay) * np.sum(weights[k_start:] * counts[k_start:]))


# -- sufficient statistics ---------------------------------------------------

def suff_stats(g: Graph, model: ModelSpec) -> np.ndarray:
    """Sufficient statistic vector g(y), one coordinate per term dimension."""
    n = g.n
    iu = np.triu_indices(n, k=1)
    edge_mask = g.adj[iu]
    out = []
    for t in model.terms:
        if t.term == EDGES:
            out.append(float(edge_mask.sum()))
        elif t.term == GWESP:
            out.append(gw_weighted_sum(ep_distribution(g), t.decay, k_start=1))
        elif t.term == GWDEG:
            out.append(gw_weighted_sum(dg_distribution(g), t.decay, k_start=0))
        elif t.term == NODEMATCH:
            x = t._node_attr(g)
            match = x[iu[0]] == x[iu[1]]
            out.append(float(np.sum(edge_mask & match)))
        elif t.term == NODEMATCH_DIFF:
            x = t._node_attr(g)
            for lvl in t.levels(g):
                match = (x[iu[0]] == lvl) & (x[iu[1]] == lvl)
                out.append(float(np.sum(edge_mask & match)))
        elif t.term == NODECOV:
            x = t._node_attr(g)
            out.append(float(np.sum((x[iu[0]] + x[iu[1]])[edge_mask])))
        elif t.term == EDGECOV:
            w = t._dyad_cov(g)
            out.append(float(np.sum(w[iu][edge_mask])))
    return np.array(out)


# -- change statistics -------------------------------------------------------

def change_stats(g: Graph, dyad, model: ModelSpec) -> np.ndarray:
    """Change score delta(d) = g(y with d on) - g(y with d off).

    Independent of d's current state in g; computed from d's local
    neighborhood without recomputing any global statistic.
    """
    i, j = int(dyad[0]), int(dyad[1])
    if i == j:
        raise ValueError("change score undefined for a self-loop")
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise IndexError(f"dyad ({i},{j}) out of range for n={g.n}")
    adj = g.adj
    had_edge = adj[i, j]
    if had_edge:
        # evaluate in the off state; the delta is the same either way
        adj = adj.copy()
        adj[i, j] = adj[j, i] = False

    out = []
    for t in model.terms:
        if t.term == EDGES:
            out.append(1.0)
        elif t.term == GWESP:
            out.append(_gwesp_delta(adj, i, j, t.decay))
        elif t.term == GWDEG:
            u = 1.0 - np.exp(-t.decay)
            di = int(adj[i].sum())
            dj = int(adj[j].sum())
            out.append(float(u ** di + u ** dj))
        elif t.term == NODEMATCH:
            x = t._node_attr(g)
            out.append(1.0 if x[i] == x[j] else 0.0)
        elif t.term == NODEMATCH_DIFF:
            x = t._node_attr(g)
            for lvl in t.levels(g):
                out.append(1.0 if x[i] == lvl and x[j] == lvl else 0.0)
        elif t.term == NODECOV:
            x = t._node_attr(g)
            out.append(float(x[i] + x[j]))
        elif t.term == EDGECOV:
            out.append(float(t._dyad_cov(g)[i, j]))
    return np.array(out)


def _gwesp_delta(adj: np.ndarray, i: int, j: int, decay: float) -> float:
    """GWESP change for adding edge (i, j) to a graph where it is absent.

    The new edge contributes its own shared-partner weight; in addition every
    common neighbor k gains a shared partner on its edges (i, k) and (j, k),
    each worth u^esp where esp is that edge's current shared-partner count and
    u = 1 - e^-decay (the per-increment weight telescopes to u^esp).
    """
    u = 1.0 - np.exp(-decay)
    common = adj[i] & adj[j]
    cn = np.flatnonzero(common)
    d = np.exp(decay) * (1.0 - u ** len(cn))
    for k in cn:
        esp_ik = int(np.sum(adj[i] & adj[k]))
        esp_jk = int(np.sum(adj[j] & adj[k]))
        d += u ** esp_ik + u ** esp_jk
    return float(d)
