"""Parameter estimation for binary undirected ERGMs.

Provides maximum pseudo-likelihood (IRLS logistic regression on change
scores), Monte Carlo MLE by stochastic Fisher scoring (handling missing dyad
states through the observed-data likelihood), a small-graph exact enumeration
oracle, and path-sampled log-likelihood / AIC / BIC.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logsumexp

from .graph import Graph, PartialGraph, all_dyads, n_dyads
from .sampler import (SamplerConfig, sample_conditional_raw,
                      sample_unconditional_raw)
from .terms import ModelSpec, change_stats, suff_stats

MPLE = "mple"
MCMLE = "mcmle"
EXACT = "exact"


class EstimationError(RuntimeError):
    pass


class SeparationError(EstimationError):
    """Complete separation in the pseudo-likelihood logistic regression."""


class BoundaryMLEError(EstimationError):
    """An observed statistic sits at its support extreme; the MLE diverges."""


@dataclass(frozen=True)
class EstimatorConfig:
    method: str = MCMLE
    max_iter: int = 60
    grad_tol: float = 0.08
    mc_samples: int = 2500
    final_mc_samples: int = 10000
    max_halvings: int = 15
    ridge: float = 1e-8
    seed: int = 0
    sampler: SamplerConfig = field(default_factory=SamplerConfig)

    def __post_init__(self):
        if self.max_iter < 1 or self.mc_samples < 2 or self.grad_tol <= 0:
            raise ValueError("estimator sizes/tolerances must be positive")


@dataclass
class FitResult:
    theta: np.ndarray
    coord_names: list
    method: str
    std_err: np.ndarray = None
    loglik: float = None
    aic: float = None
    bic: float = None
    n_observed_dyads: int = None
    diagnostics: dict = field(default_factory=dict)

    def with_loglik(self, loglik: float) -> "FitResult":
        p = len(self.theta)
        out = FitResult(
            theta=self.theta, coord_names=self.coord_names, method=self.method,
            std_err=self.std_err, loglik=loglik,
            n_observed_dyads=self.n_observed_dyads,
            diagnostics=dict(self.diagnostics))
        out.aic = -2.0 * loglik + 2.0 * p
        out.bic = -2.0 * loglik + p * np.log(self.n_observed_dyads)
        return out

    def to_dict(self) -> dict:
        return {
            "coefficients": {name: float(v)
                             for name, v in zip(self.coord_names, self.theta)},
            "std_err": (None if self.std_err is None else
                        {name: float(v)
                         for name, v in zip(self.coord_names, self.std_err)}),
            "method": self.method,
            "loglik": self.loglik,
            "aic": self.aic,
            "bic": self.bic,
            "n_observed_dyads": self.n_observed_dyads,
            "diagnostics": self.diagnostics,
        }


# -- MPLE --------------------------------------------------------------------

def _mple_design(pg: PartialGraph, model: ModelSpec):
    """Design matrix of change scores and responses over the observed dyads.

    Change scores are evaluated on the base graph with all free dyads forced
    off, so held-out states never leak into the pseudo-likelihood.
    """
    g = pg.base
    if pg.n_free:
        adj = g.adj.copy()
        adj[pg.free[:, 0], pg.free[:, 1]] = False
        adj[pg.free[:, 1], pg.free[:, 0]] = False
        g = g.replace_adjacency(adj)
    obs = pg.observed_dyads()
    X = np.array([change_stats(g, d, model) for d in obs])
    y = g.dyad_states(obs).astype(float)
    return X, y


def mple(pg: PartialGraph, model: ModelSpec,
         cfg: EstimatorConfig = None) -> FitResult:
    """Maximum pseudo-likelihood estimate via iteratively reweighted least squares.

    For dyadic-independence models this is the exact MLE of the observed-dyad
    likelihood.  ``loglik`` in the result is the maximized pseudo-likelihood,
    which equals the log-likelihood only in the dyadic-independence case.
    """
    cfg = cfg or EstimatorConfig(method=MPLE)
    if isinstance(pg, Graph):
        pg = PartialGraph(pg)
    model.validate(pg.base)
    X, y = _mple_design(pg, model)
    names = model.coordinate_names(pg.base)
    p = X.shape[1]
    if np.all(y == y[0]):
        raise SeparationError(
            "all observed dyads share one state; intercept-only separation")
    theta = np.zeros(p)
    grad_norm = np.inf
    for it in range(cfg.max_iter):
        eta = X @ theta
        mu = expit(eta)
        wt = np.clip(mu * (1.0 - mu), 1e-12, None)
        grad = X.T @ (y - mu)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm < 1e-9 * max(1.0, len(y)):
            break
        H = (X * wt[:, None]).T @ X
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            raise EstimationError(
                "singular weighted normal equations; a term may be collinear "
                "or constant, consider removing it") from None
        theta = theta + step
        blown = np.abs(theta) > 25.0
        if blown.any():
            k = int(np.argmax(np.abs(theta)))
            raise SeparationError(
                f"complete separation detected on coordinate {names[k]!r}")
    eta = X @ theta
    mu = expit(eta)
    perfect = np.all(np.where(y == 1.0, mu > 1 - 1e-6, mu < 1e-6))
    if perfect and np.max(np.abs(theta)) > 8.0:
        k = int(np.argmax(np.abs(theta)))
        raise SeparationError(
            f"complete separation detected on coordinate {names[k]!r}")
    wt = np.clip(mu * (1.0 - mu), 1e-12, None)
    H = (X * wt[:, None]).T @ X
    try:
        cov = np.linalg.inv(H)
        se = np.sqrt(np.diag(cov))
    except np.linalg.LinAlgError:
        se = None
    pll = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    res = FitResult(theta=theta, coord_names=names, method=MPLE, std_err=se,
                    n_observed_dyads=pg.n_observed,
                    diagnostics={"iterations": it + 1,
                                 "gradient_norm": grad_norm,
                                 "pseudo_loglik": pll})
    if model.is_dyadic_independent and pg.n_free == 0:
        return res.with_loglik(pll)
    if model.is_dyadic_independent and pg.n_free:
        # likelihood factorizes over dyads; missing dyads integrate out
        return res.with_loglik(pll)
    return res


# -- exact enumeration oracle ------------------------------------------------

MAX_EXACT_NODES = 6
MAX_EXACT_FREE = 25


class ExactModel:
    """Exhaustive-enumeration likelihood machinery for desk-scale graphs.

    Enumerates all graphs on n nodes (n <= 6) to evaluate the normalizer
    exactly, plus the conditional configuration space of a free dyad set
    (|free| <= 25) for the observed-data likelihood and conditional pmf.
    """

    def __init__(self, pg: PartialGraph, model: ModelSpec):
        if isinstance(pg, Graph):
            pg = PartialGraph(pg)
        g = pg.base
        if g.n > MAX_EXACT_NODES:
            raise EstimationError(
                f"exact enumeration limited to n <= {MAX_EXACT_NODES}")
        if pg.n_free > MAX_EXACT_FREE:
            raise EstimationError(
                f"exact conditional enumeration limited to |free| <= {MAX_EXACT_FREE}")
        self.pg = pg
        self.model = model
        self.names = model.coordinate_names(g)
        self.all_stats = self._enumerate(g, all_dyads(g.n))
        if pg.n_free:
            self.cond_stats = self._enumerate(g, pg.free)
        else:
            self.cond_stats = suff_stats(g, model)[None, :]
        self.obs_stats = suff_stats(g, model)

    def _enumerate(self, g: Graph, free: np.ndarray) -> np.ndarray:
        """Statistics of every configuration of ``free`` dyads (others fixed)."""
        k = len(free)
        fi, fj = free[:, 0], free[:, 1]
        rows = []
        adj = g.adj.copy()
        for code in range(1 << k):
            bits = (code >> np.arange(k)) & 1
            adj[fi, fj] = bits.astype(bool)
            adj[fj, fi] = bits.astype(bool)
            rows.append(suff_stats(g.replace_adjacency(adj), self.model))
        return np.array(rows)

    def log_kappa(self, theta) -> float:
        return float(logsumexp(self.all_stats @ np.asarray(theta, float)))

    def log_kappa_conditional(self, theta) -> float:
        return float(logsumexp(self.cond_stats @ np.asarray(theta, float)))

    def loglik(self, theta) -> float:
        """Observed-data log-likelihood (face value when dyads are missing)."""
        return self.log_kappa_conditional(theta) - self.log_kappa(theta)

    def pmf(self, theta) -> np.ndarray:
        """Exact pmf over all graph configurations (code order: dyad bits)."""
        lp = self.all_stats @ np.asarray(theta, float)
        return np.exp(lp - logsumexp(lp))

    def conditional_pmf(self, theta) -> np.ndarray:
        """Exact conditional pmf over free-dyad configurations."""
        lp = self.cond_stats @ np.asarray(theta, float)
        return np.exp(lp - logsumexp(lp))

    def check_boundary(self) -> None:
        """Raise when an observed statistic is at its support extreme."""
        if self.pg.n_free:
            return
        for k, name in enumerate(self.names):
            col = self.all_stats[:, k]
            v = self.obs_stats[k]
            if (v <= col.min() and not np.all(col == v)) or \
               (v >= col.max() and not np.all(col == v)):
                raise BoundaryMLEError(
                    f"observed statistic {name!r} = {v:g} is at its support "
                    "extreme; the MLE is infinite (boundary MLE)")

    def mle(self, check_boundary: bool = True) -> FitResult:
        if check_boundary:
            self.check_boundary()
        fun = lambda th: -self.loglik(th)
        def grad(th):
            # E[g] under conditional minus unconditional, negated
            wa = self.pmf(th)
            wc = self.conditional_pmf(th)
            return -(wc @ self.cond_stats - wa @ self.all_stats)
        res = minimize(fun, np.zeros(self.all_stats.shape[1]), jac=grad,
                       method="BFGS", options={"gtol": 1e-10, "maxiter": 500})
        if np.any(np.abs(res.x) > 40.0):
            raise BoundaryMLEError(
                "likelihood maximized on the boundary (diverging coefficient)")
        ll = self.loglik(res.x)
        out = FitResult(theta=res.x, coord_names=self.names, method=EXACT,
                        n_observed_dyads=self.pg.n_observed,
                        diagnostics={"iterations": int(res.nit),
                                     "gradient_norm": float(np.linalg.norm(res.jac))})
        return out.with_loglik(ll)


def exact_enumeration(pg: PartialGraph, model: ModelSpec) -> ExactModel:
    return ExactModel(pg, model)


# -- MCMC MLE ----------------------------------------------------------------

def _standardized_grad_norm(diff: np.ndarray, cov: np.ndarray,
                            ridge: float) -> float:
    c = cov + ridge * np.eye(len(diff))
    try:
        return float(np.sqrt(diff @ np.linalg.solve(c, diff)))
    except np.linalg.LinAlgError:
        return float(np.linalg.norm(diff) / np.sqrt(np.trace(c) / len(diff)))


def mcmle(pg: PartialGraph, model: ModelSpec,
          cfg: EstimatorConfig = None, theta0: np.ndarray = None) -> FitResult:
    """Monte Carlo MLE by stochastic Fisher scoring.

    The score of the observed-data log-likelihood is the gap between the
    conditional expectation of the statistics given the observed dyads and
    the unconditional expectation; both are estimated by MH sampling.  For a
    fully observed graph the conditional expectation is the observed
    statistic vector and the update is classical MCMC-MLE.  The Newton
    direction uses the unconditional sample covariance; step halving enforces
    ascent of the importance-sampled likelihood ratio.
    """
    cfg = cfg or EstimatorConfig()
    if isinstance(pg, Graph):
        pg = PartialGraph(pg)
    g = pg.base
    model.validate(g)
    names = model.coordinate_names(g)

    if theta0 is None:
        try:
            theta = mple(pg, model).theta
        except SeparationError:
            # separated pseudo-likelihood does not imply a degenerate MLE
            theta = np.zeros(model.dimension(g))
    else:
        theta = np.asarray(theta0, dtype=float).copy()
    p = len(theta)

    fully_observed = pg.n_free == 0
    obs_stats = suff_stats(g, model) if fully_observed else None
    ss = np.random.SeedSequence((int(cfg.seed), 0xE57))
    seeds = iter(ss.generate_state(4 * cfg.max_iter + 8).tolist())

    if not fully_observed:
        # held-out states must not leak: start unconditional chains from a
        # graph whose free dyads are redrawn at the observed density
        adj = g.adj.copy()
        init_rng = np.random.default_rng(next(seeds))
        init = init_rng.random(pg.n_free) < g.density()
        adj[pg.free[:, 0], pg.free[:, 1]] = init
        adj[pg.free[:, 1], pg.free[:, 0]] = init
        g = g.replace_adjacency(adj)

    ridge_warned = False
    trace = []
    z = np.inf
    cov = np.eye(p)
    for it in range(cfg.max_iter):
        final_pass = False
        S = cfg.mc_samples
        samp = replace(cfg.sampler, seed=next(seeds))
        unc = sample_unconditional_raw(g, theta, model, S, samp).stats
        if fully_observed:
            cond_mean = obs_stats
            cond_stats = None
        else:
            samp_c = replace(cfg.sampler, seed=next(seeds))
            cond_stats = sample_conditional_raw(pg, theta, model, S, samp_c).stats
            cond_mean = cond_stats.mean(axis=0)
        unc_mean = unc.mean(axis=0)
        if np.all(unc.std(axis=0) < 1e-12):
            raise BoundaryMLEError(
                "sampler frozen on a single graph at the current coefficients; "
                "model is degenerate here")
        cov = np.cov(unc.T).reshape(p, p)
        if np.linalg.cond(cov + cfg.ridge * np.eye(p)) > 1e10:
            ridge_warned = True
            cov = cov + 1e-4 * np.trace(cov) / p * np.eye(p)
        grad = cond_mean - unc_mean
        z = _standardized_grad_norm(grad, cov, cfg.ridge)
        trace.append({"iter": it, "z": z, "theta": theta.tolist()})
        if z < cfg.grad_tol:
            # confirm with a larger fresh sample before stopping
            S2 = cfg.final_mc_samples
            samp = replace(cfg.sampler, seed=next(seeds))
            unc2 = sample_unconditional_raw(g, theta, model, S2, samp).stats
            if fully_observed:
                cond_mean2 = obs_stats
            else:
                samp_c = replace(cfg.sampler, seed=next(seeds))
                cond_mean2 = sample_conditional_raw(
                    pg, theta, model, S2, samp_c).stats.mean(axis=0)
            cov2 = np.cov(unc2.T).reshape(p, p)
            grad2 = cond_mean2 - unc2.mean(axis=0)
            z2 = _standardized_grad_norm(grad2, cov2, cfg.ridge)
            if z2 < cfg.grad_tol:
                # polish with one norm-capped Newton step from the big sample
                step = np.linalg.solve(cov2 + cfg.ridge * np.eye(p), grad2)
                cap = 0.25
                m_ = np.max(np.abs(step))
                if m_ > cap:
                    step *= cap / m_
                theta = theta + step
                cov = cov2
                z = z2
                final_pass = True
                break
            unc, cov, grad = unc2, cov2, grad2
            if not fully_observed:
                cond_mean = cond_mean2
        direction = np.linalg.solve(cov + cfg.ridge * np.eye(p), grad)
        alpha = 1.0
        for _ in range(cfg.max_halvings):
            cand = theta + alpha * direction
            dth = cand - theta
            # importance-sampled log-likelihood ratio estimate
            lr = -(logsumexp(unc @ dth) - np.log(len(unc)))
            if fully_observed:
                lr += float(obs_stats @ dth)
            else:
                lr += float(logsumexp(cond_stats @ dth) - np.log(len(cond_stats)))
            if lr > 0 or alpha < 1e-4:
                break
            alpha *= 0.5
        theta = theta + alpha * direction
        blown = np.abs(theta) > 40.0
        if blown.any():
            k = int(np.argmax(np.abs(theta)))
            raise BoundaryMLEError(
                f"coefficient {names[k]!r} diverging; model may be degenerate "
                "for the observed statistics")
    else:
        raise EstimationError(
            f"MCMLE did not converge in {cfg.max_iter} iterations "
            f"(standardized gradient norm {z:.3f}); trace: {trace[-5:]}")

    se = None
    if fully_observed:
        try:
            fisher_inv = np.linalg.inv(cov)
            se = np.sqrt(np.diag(fisher_inv))
        except np.linalg.LinAlgError:
            se = None
    return FitResult(theta=theta, coord_names=names, method=MCMLE, std_err=se,
                     n_observed_dyads=pg.n_observed,
                     diagnostics={"iterations": it + 1,
                                  "gradient_norm": float(z),
                                  "mc_samples": cfg.mc_samples,
                                  "final_mc_samples": cfg.final_mc_samples,
                                  "ridge_regularized": ridge_warned,
                                  "converged": True,
                                  "final_confirmation": final_pass})


# -- path-sampled log-likelihood --------------------------------------------

def loglik_path_sampling(theta_hat, model: ModelSpec, pg: PartialGraph,
                         cfg: EstimatorConfig = None, bridges: int = 24,
                         draws_per_bridge: int = 1500) -> float:
    """Estimate the maximized observed-data log-likelihood at theta_hat.

    log kappa(theta) - log kappa(0) is the integral over t in [0, 1] of
    E_{t*theta}[theta' g], estimated by MH sampling at equally spaced bridge
    points (trapezoid rule); log kappa(0) = C(n,2) log 2 exactly.  With
    missing dyads the same construction applies to the conditional
    normalizer, whose reference value is |free| log 2.
    """
    cfg = cfg or EstimatorConfig()
    if isinstance(pg, Graph):
        pg = PartialGraph(pg)
    g = pg.base
    theta_hat = np.asarray(theta_hat, dtype=float)
    ss = np.random.SeedSequence((int(cfg.seed), 0xB41D6E))
    seeds = iter(ss.generate_state(2 * (bridges + 1)).tolist())

    def bridge_integral(conditional: bool) -> float:
        ts = np.linspace(0.0, 1.0, bridges + 1)
        means = np.empty(len(ts))
        for k, t in enumerate(ts):
            samp = replace(cfg.sampler, seed=next(seeds))
            if conditional:
                stats = sample_conditional_raw(
                    pg, t * theta_hat, model, draws_per_bridge, samp).stats
            else:
                stats = sample_unconditional_raw(
                    g, t * theta_hat, model, draws_per_bridge, samp).stats
            means[k] = float((stats @ theta_hat).mean())
        return float(np.trapezoid(means, ts))

    log_kappa = n_dyads(g.n) * np.log(2.0) + bridge_integral(conditional=False)
    if pg.n_free == 0:
        return float(suff_stats(g, model) @ theta_hat) - log_kappa
    log_kappa_cond = pg.n_free * np.log(2.0) + bridge_integral(conditional=True)
    return log_kappa_cond - log_kappa


def fit(pg: PartialGraph, model: ModelSpec, cfg: EstimatorConfig = None,
        compute_loglik: bool = False, theta0=None,
        bridges: int = 24, draws_per_bridge: int = 1500) -> FitResult:
    """Fit by the configured method, optionally adding path-sampled AIC/BIC."""
    cfg = cfg or EstimatorConfig()
    if isinstance(pg, Graph):
        pg = PartialGraph(pg)
    if cfg.method == MPLE:
        res = mple(pg, model, cfg)
    elif cfg.method == EXACT:
        res = exact_enumeration(pg, model).mle()
    else:
        res = mcmle(pg, model, cfg, theta0=theta0)
    if compute_loglik and res.loglik is None:
        ll = loglik_path_sampling(res.theta, model, pg, cfg,
                                  bridges=bridges,
                                  draws_per_bridge=draws_per_bridge)
        res = res.with_loglik(ll)
    return res
