"""Dyad-, node-, and graph-level predictive metrics for held-out evaluation.

Dyad level: aggregate confusion matrix over all (fold, draw) pairs, the
edge/null/overall accuracies derived from it, shrunk marginal edge
probabilities, and total squared loss.  Node level: reliability of centrality
scores.  Graph level: RMSE of Freeman centralization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from .centrality import centralization
from .graph import Graph
from .terms import ModelSpec, change_stats


@dataclass
class ConfusionMatrix:
    """True-vs-imputed dyad states aggregated over all folds and draws."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def add_draws(self, truth: np.ndarray, draws: np.ndarray) -> None:
        """truth: (k,) 0/1; draws: (B, k) 0/1 imputed states."""
        truth = np.asarray(truth)
        draws = np.asarray(draws)
        pos = draws[:, truth == 1]
        neg = draws[:, truth == 0]
        self.tp += int(pos.sum())
        self.fn += int(pos.size - pos.sum())
        self.fp += int(neg.sum())
        self.tn += int(neg.size - neg.sum())

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


class Accuracies(NamedTuple):
    edge_acc: float
    null_acc: float
    overall_acc: float


def accuracy_from_confusion(f: ConfusionMatrix) -> Accuracies:
    """Edge, null, and overall predictive accuracy; None on an empty margin."""
    edge = f.tp / (f.tp + f.fn) if (f.tp + f.fn) else None
    null = f.tn / (f.tn + f.fp) if (f.tn + f.fp) else None
    overall = (f.tp + f.tn) / f.total if f.total else None
    return Accuracies(edge, null, overall)


def marginal_estimate(draws, B: int = None) -> float:
    """Jeffreys-shrunk marginal edge probability (0.5 + sum) / (B + 1)."""
    draws = np.asarray(draws)
    if B is None:
        B = len(draws)
    if B < 1:
        raise ValueError("B must be >= 1")
    return float((0.5 + draws.sum()) / (B + 1))


def exact_marginal_change_score(g_obs: Graph, dyad, theta_hat,
                                model: ModelSpec) -> float:
    """Exact conditional edge probability when only this dyad is held out.

    The conditional distribution of a single dyad given all others is
    Bernoulli with logit equal to the change score inner product; this is the
    fast alternative to simulation under leave-1-out.
    """
    delta = change_stats(g_obs, dyad, model)
    return float(expit(np.asarray(theta_hat, float) @ delta))


class TslResult(NamedTuple):
    raw: float
    scaled: float      # raw / 2 under node-held-out, else == raw
    strategy: str


def total_squared_loss(y_true: dict, y_hat: dict, strategy: str = "lmo") -> TslResult:
    """Sum of squared errors between shrunk marginals and true states.

    Both arguments are keyed by (fold_index, dyad); under node-held-out every
    dyad appears under two folds and the reported value is the raw sum
    divided by 2 so strategies stay comparable.
    """
    missing = set(y_true) - set(y_hat)
    if missing:
        raise KeyError(f"missing marginal estimate for {sorted(missing)[:3]}...")
    raw = float(sum((y_hat[k] - y_true[k]) ** 2 for k in y_true))
    scaled = raw / 2.0 if strategy == "node" else raw
    return TslResult(raw=raw, scaled=scaled, strategy=strategy)


class Reliability(NamedTuple):
    rho: float    # None when the observed scores have no variation
    mse: float


def reliability_rho(obs: np.ndarray, sims: np.ndarray) -> Reliability:
    """Coefficient of reliability of a centrality score.

    ``sims`` stacks the per-(fold, draw) centrality vectors as rows.  rho is
    1 - MSE / (TSS/n) where MSE averages squared errors over all rows and
    nodes and TSS is the total sum of squares of the observed scores; the raw
    MSE is returned alongside for low-variation graphs.
    """
    obs = np.asarray(obs, float)
    sims = np.asarray(sims, float)
    if sims.ndim == 1:
        sims = sims[None, :]
    mse = float(np.mean((sims - obs[None, :]) ** 2))
    tss = float(np.sum((obs - obs.mean()) ** 2))
    if tss == 0.0:
        return Reliability(None, mse)
    return Reliability(1.0 - mse / (tss / len(obs)), mse)


def reliability_from_sums(obs: np.ndarray, sq_err_sum: float,
                          n_rows: int) -> Reliability:
    """Same as :func:`reliability_rho` from a streamed sum of squared errors."""
    obs = np.asarray(obs, float)
    n = len(obs)
    mse = sq_err_sum / (n_rows * n)
    tss = float(np.sum((obs - obs.mean()) ** 2))
    if tss == 0.0:
        return Reliability(None, mse)
    return Reliability(1.0 - mse / (tss / n), mse)


def rmse_centralization(obs: Graph, sims, kind: str) -> float:
    """Root mean squared centralization gap over all simulated graphs.

    ``sims`` may be Graphs or precomputed centralization values.
    """
    target = centralization(obs, kind)
    vals = np.array([centralization(s, kind) if isinstance(s, Graph) else float(s)
                     for s in sims])
    if len(vals) == 0:
        raise ValueError("need at least one simulated graph")
    return float(np.sqrt(np.mean((target - vals) ** 2)))


@dataclass
class MetricRow:
    """One line of the held-out evaluation table (model x strategy)."""

    model: str
    strategy: str
    edge_acc: float
    null_acc: float
    overall_acc: float
    tsl: float
    tsl_raw: float
    rho_degree: float
    rho_betweenness: float
    rho_eigen: float
    mse_degree: float
    mse_betweenness: float
    mse_eigen: float
    rmse_betweenness_centralization: float
    rmse_degree_centralization: float

    CSV_FIELDS = ("model", "strategy", "edge_acc", "null_acc", "overall_acc",
                  "tsl", "rho_degree", "rho_betweenness", "rho_eigen",
                  "rmse_betweenness_centralization",
                  "rmse_degree_centralization")

    def validate(self) -> None:
        for a in (self.edge_acc, self.null_acc, self.overall_acc):
            if a is not None and not 0.0 <= a <= 1.0:
                raise ValueError(f"accuracy out of [0,1]: {a}")
        if self.tsl_raw < 0:
            raise ValueError("TSL must be nonnegative")
        for r in (self.rho_degree, self.rho_betweenness, self.rho_eigen):
            if r is not None and r > 1.0 + 1e-12:
                raise ValueError(f"reliability above 1: {r}")
        for r in (self.rmse_betweenness_centralization,
                  self.rmse_degree_centralization):
            if r < 0:
                raise ValueError("RMSE must be nonnegative")
