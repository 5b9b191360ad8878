"""Metropolis-Hastings toggle sampler over graph space.

Supports unconditional sampling from the model and conditional sampling in
which a set of "free" dyads is resampled while every other dyad is pinned at
its observed state.  Chains are deterministic given (graph, theta, config
seed, chain count); per-chain streams are derived with numpy SeedSequence and
driven by the MT19937-based legacy generator inside the compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .graph import Graph, PartialGraph, all_dyads, validate_dyads
from .terms import (EDGES, GWDEG, GWESP, NODECOV, NODEMATCH,
                    NODEMATCH_DIFF, ModelSpec, suff_stats)

RNG_NAME = "numpy SeedSequence-derived MT19937 streams"

UNIFORM_DYAD = "uniform"
TIE_NO_TIE = "tnt"


class SamplerError(ValueError):
    pass


@dataclass(frozen=True)
class SamplerConfig:
    """burn_in/thin of None means the scale-aware defaults 20*|free| and
    4*|free| + 1 toggles per retained draw.  The default thin is odd on
    purpose: with an always-accept parameter vector (theta = 0) each step
    flips exactly one dyad, so an even lag would freeze the edge-count parity
    of the retained draws."""

    burn_in: int = None
    thin: int = None
    proposal: str = UNIFORM_DYAD
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        if self.burn_in is not None and self.burn_in < 0:
            raise SamplerError("burn_in must be >= 0")
        if self.thin is not None and self.thin < 1:
            raise SamplerError("thin must be >= 1")
        if self.proposal not in (UNIFORM_DYAD, TIE_NO_TIE):
            raise SamplerError(f"unknown proposal {self.proposal!r}")
        if self.chains < 1:
            raise SamplerError("chains must be >= 1")

    def resolved(self, n_free: int) -> "SamplerConfig":
        burn = self.burn_in if self.burn_in is not None else 20 * n_free
        thin = self.thin if self.thin is not None else 4 * n_free + 1
        return replace(self, burn_in=burn, thin=max(1, thin))


class ModelEncoding:
    """Coordinate-level arrays consumed by the compiled kernels."""

    def __init__(self, g: Graph, model: ModelSpec):
        model.validate(g)
        n = g.n
        kinds, ephi, u, level = [], [], [], []
        node_x, dyad_w = [], []
        zero_vec = np.zeros(n)
        zero_mat = np.zeros((n, n))
        for t in model.terms:
            if t.term == EDGES:
                kinds.append(_kernels.K_EDGES)
                ephi.append(0.0); u.append(0.0); level.append(0.0)
                node_x.append(zero_vec); dyad_w.append(zero_mat)
            elif t.term in (GWESP, GWDEG):
                kinds.append(_kernels.K_GWESP if t.term == GWESP
                             else _kernels.K_GWDEG)
                ephi.append(np.exp(t.decay)); u.append(1.0 - np.exp(-t.decay))
                level.append(0.0)
                node_x.append(zero_vec); dyad_w.append(zero_mat)
            elif t.term == NODEMATCH:
                kinds.append(_kernels.K_MATCH)
                ephi.append(0.0); u.append(0.0); level.append(0.0)
                node_x.append(t._node_attr(g)); dyad_w.append(zero_mat)
            elif t.term == NODEMATCH_DIFF:
                for lvl in t.levels(g):
                    kinds.append(_kernels.K_MATCH_LVL)
                    ephi.append(0.0); u.append(0.0); level.append(lvl)
                    node_x.append(t._node_attr(g)); dyad_w.append(zero_mat)
            elif t.term == NODECOV:
                kinds.append(_kernels.K_NODECOV)
                ephi.append(0.0); u.append(0.0); level.append(0.0)
                node_x.append(t._node_attr(g)); dyad_w.append(zero_mat)
            else:  # EDGECOV
                kinds.append(_kernels.K_EDGECOV)
                ephi.append(0.0); u.append(0.0); level.append(0.0)
                node_x.append(zero_vec); dyad_w.append(t._dyad_cov(g))
        self.kind = np.array(kinds, dtype=np.int8)
        self.ephi = np.array(ephi)
        self.u = np.array(u)
        self.level = np.array(level)
        self.node_x = np.ascontiguousarray(np.array(node_x))
        self.dyad_w = np.ascontiguousarray(np.array(dyad_w))
        self.p = len(kinds)

    def kernel_args(self):
        return (self.kind, self.ephi, self.u, self.level,
                self.node_x, self.dyad_w)


def _chain_seeds(seed: int, chains: int, salt=()) -> list[int]:
    ss = np.random.SeedSequence((int(seed),) + tuple(int(s) for s in salt))
    return [int(s) for s in ss.generate_state(chains)]


class ChainState:
    """Mutable sampler state: current graph, incrementally cached statistics,
    and the RNG stream.  Cached stats always track suff_stats(current)."""

    def __init__(self, g: Graph, model: ModelSpec, seed: int = 0):
        self.graph_template = g
        self.model = model
        self.enc = ModelEncoding(g, model)
        self.adj = g.adj.copy()
        self.stats = suff_stats(g, model)
        self.rng = np.random.default_rng(seed)

    def current_graph(self) -> Graph:
        return self.graph_template.replace_adjacency(self.adj)


def mh_step(state: ChainState, theta: np.ndarray, free: np.ndarray) -> bool:
    """One uniform-proposal MH toggle step restricted to ``free`` dyads.

    Mutates ``state`` and returns whether the proposal was accepted.  The bulk
    sampler below runs the same dynamics in compiled code.
    """
    free = validate_dyads(free, state.adj.shape[0])
    if len(free) == 0:
        raise SamplerError("free dyad set is empty; nothing to sample")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (state.enc.p,):
        raise SamplerError(f"theta has length {theta.size}, model needs {state.enc.p}")
    f = state.rng.integers(len(free))
    i, j = int(free[f, 0]), int(free[f, 1])
    cur = state.adj[i, j]
    if cur:
        state.adj[i, j] = state.adj[j, i] = False
    delta = np.empty(state.enc.p)
    _kernels.add_delta(state.adj, i, j, *state.enc.kernel_args(), delta)
    logr = float(theta @ delta) * (-1.0 if cur else 1.0)
    accept = logr >= 0 or state.rng.random() < np.exp(logr)
    if accept:
        if cur:
            state.stats -= delta
        else:
            state.adj[i, j] = state.adj[j, i] = True
            state.stats += delta
    elif cur:
        state.adj[i, j] = state.adj[j, i] = True
    return accept


@dataclass
class SampleResult:
    """Draws from one (possibly conditional) sampling run.

    ``states`` is (B, n_free) uint8 with the sampled states of the free dyads
    (column order matches ``free``); ``stats`` is (B, p) with the full
    statistic vector of each retained graph.
    """

    base: Graph
    free: np.ndarray
    states: np.ndarray
    stats: np.ndarray

    def graph(self, b: int) -> Graph:
        adj = self.base.adj.copy()
        fi, fj = self.free[:, 0], self.free[:, 1]
        adj[fi, fj] = self.states[b].astype(bool)
        adj[fj, fi] = self.states[b].astype(bool)
        return self.base.replace_adjacency(adj)

    def graphs(self) -> list[Graph]:
        return [self.graph(b) for b in range(len(self.states))]


def sample_conditional_raw(g_obs: PartialGraph, theta, model: ModelSpec,
                           B: int, cfg: SamplerConfig) -> SampleResult:
    """Draw B graphs from the model conditional on the observed dyads.

    Free dyads are initialized by independent Bernoulli draws at the observed
    density; every returned draw agrees with the base graph off the free set.
    """
    if B < 1:
        raise SamplerError("B must be >= 1")
    free = g_obs.free
    if len(free) == 0:
        raise SamplerError("free dyad set is empty; nothing to sample")
    g = g_obs.base
    enc = ModelEncoding(g, model)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (enc.p,):
        raise SamplerError(f"theta has length {theta.size}, model needs {enc.p}")
    cfg = cfg.resolved(len(free))

    chains = cfg.chains
    per_chain = np.full(chains, B // chains)
    per_chain[:B % chains] += 1
    seeds = _chain_seeds(cfg.seed, 2 * chains)
    init_seeds, run_seeds = seeds[:chains], seeds[chains:]

    density = g.density()
    fi = np.ascontiguousarray(free[:, 0])
    fj = np.ascontiguousarray(free[:, 1])
    use_tnt = cfg.proposal == TIE_NO_TIE
    states_parts, stats_parts = [], []
    for c in range(chains):
        nb = int(per_chain[c])
        if nb == 0:
            continue
        adj = g.adj.copy()
        init_rng = np.random.default_rng(init_seeds[c])
        init = init_rng.random(len(free)) < density
        adj[fi, fj] = init
        adj[fj, fi] = init
        stats = suff_stats(g.replace_adjacency(adj), model)
        states_out = np.empty((nb, len(free)), dtype=np.uint8)
        stats_out = np.empty((nb, enc.p))
        _kernels.mh_run(adj, stats, theta, *enc.kernel_args(), fi, fj,
                        cfg.burn_in, nb, cfg.thin, run_seeds[c] & 0x7FFFFFFF,
                        use_tnt, states_out, stats_out)
        states_parts.append(states_out)
        stats_parts.append(stats_out)
    return SampleResult(base=g, free=free,
                        states=np.concatenate(states_parts),
                        stats=np.concatenate(stats_parts))


def sample_conditional(g_obs: PartialGraph, theta, model: ModelSpec,
                       B: int, cfg: SamplerConfig) -> list[Graph]:
    """Conditional draws materialized as a list of B graphs."""
    return sample_conditional_raw(g_obs, theta, model, B, cfg).graphs()


def sample_unconditional_raw(g: Graph, theta, model: ModelSpec,
                             B: int, cfg: SamplerConfig) -> SampleResult:
    """Unconditional model draws (all dyads free), started at g's adjacency."""
    pg = PartialGraph(g, all_dyads(g.n))
    if B < 1:
        raise SamplerError("B must be >= 1")
    free = pg.free
    g0 = pg.base
    enc = ModelEncoding(g0, model)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (enc.p,):
        raise SamplerError(f"theta has length {theta.size}, model needs {enc.p}")
    cfg = cfg.resolved(len(free))
    chains = cfg.chains
    per_chain = np.full(chains, B // chains)
    per_chain[:B % chains] += 1
    run_seeds = _chain_seeds(cfg.seed, chains, salt=(1,))
    fi = np.ascontiguousarray(free[:, 0])
    fj = np.ascontiguousarray(free[:, 1])
    use_tnt = cfg.proposal == TIE_NO_TIE
    states_parts, stats_parts = [], []
    for c in range(chains):
        nb = int(per_chain[c])
        if nb == 0:
            continue
        adj = g0.adj.copy()
        stats = suff_stats(g0, model)
        states_out = np.empty((nb, len(free)), dtype=np.uint8)
        stats_out = np.empty((nb, enc.p))
        _kernels.mh_run(adj, stats, theta, *enc.kernel_args(), fi, fj,
                        cfg.burn_in, nb, cfg.thin, run_seeds[c] & 0x7FFFFFFF,
                        use_tnt, states_out, stats_out)
        states_parts.append(states_out)
        stats_parts.append(stats_out)
    return SampleResult(base=g0, free=free,
                        states=np.concatenate(states_parts),
                        stats=np.concatenate(stats_parts))
