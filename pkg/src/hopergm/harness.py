"""Held-out evaluation harness: partition dyads, refit, conditionally
simulate, and score predictions across folds, models, and strategies.

Each (model, fold) job is independent: fit to the graph with that fold's dyad
states marked missing, draw B graphs conditional on the rest, and accumulate
dyad/node/graph-level summaries.  Jobs can run on a process pool; per-job
seeds are derived from (master seed, model index, fold index) so the report
is identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .centrality import (BETWEENNESS, DEGREE, EIGENVECTOR,
                         centrality as node_centrality,
                         centralization)
from .estimation import (EstimationError, EstimatorConfig, mcmle, mple)
from .graph import Graph, PartialGraph, all_dyads, validate_dyads
from .metrics import (ConfusionMatrix, MetricRow, accuracy_from_confusion,
                      exact_marginal_change_score, marginal_estimate,
                      reliability_from_sums, total_squared_loss)
from .sampler import RNG_NAME, SamplerConfig, sample_conditional_raw
from .terms import ModelSpec

LEAVE_ONE_OUT = "loo"
LEAVE_M_OUT = "lmo"
NODE_HELD_OUT = "node"
EXPLICIT = "explicit"

SCHEMA_VERSION = 1


class HarnessError(RuntimeError):
    pass


@dataclass
class FoldPlan:
    """Partition of (a subset of) the dyad set into held-out batches."""

    strategy: str
    folds: list
    seed: int = 0
    subset: np.ndarray = None

    def __post_init__(self):
        seen = set()
        for f in self.folds:
            for i, j in f:
                key = (int(i), int(j))
                if key in seen and self.strategy != NODE_HELD_OUT:
                    raise HarnessError(f"dyad {key} appears in two folds")
                seen.add(key)

    @property
    def M(self) -> int:
        return len(self.folds)

    def held_out_dyads(self) -> set:
        return {(int(i), int(j)) for f in self.folds for i, j in f}


def build_partition(g: Graph, strategy: str, seed: int = 0, M: int = None,
                    subset=None, folds=None) -> FoldPlan:
    """Build a fold plan.

    loo: one fold per dyad.  lmo: seeded shuffle of the dyad set chunked into
    M folds whose sizes differ by at most one (loo is the M = |D| special
    case).  node: n folds, fold v holding out every dyad incident to v.
    explicit: caller-provided fold list.
    """
    n = g.n
    dyads = all_dyads(n) if subset is None else validate_dyads(subset, n)
    if strategy == EXPLICIT:
        if not folds:
            raise HarnessError("explicit strategy requires folds")
        return FoldPlan(EXPLICIT, [validate_dyads(f, n) for f in folds],
                        seed=seed, subset=subset)
    if strategy == LEAVE_ONE_OUT:
        return FoldPlan(LEAVE_ONE_OUT, [dyads[k:k + 1] for k in range(len(dyads))],
                        seed=seed, subset=subset)
    if strategy == LEAVE_M_OUT:
        if M is None:
            M = n - 1
        if not 1 <= M <= len(dyads):
            raise HarnessError(f"M={M} out of range for {len(dyads)} dyads")
        rng = np.random.default_rng(seed)
        perm = dyads[rng.permutation(len(dyads))]
        return FoldPlan(LEAVE_M_OUT, np.array_split(perm, M), seed=seed,
                        subset=subset)
    if strategy == NODE_HELD_OUT:
        folds_out = []
        for v in range(n):
            mask = (dyads[:, 0] == v) | (dyads[:, 1] == v)
            folds_out.append(dyads[mask])
        return FoldPlan(NODE_HELD_OUT, folds_out, seed=seed, subset=subset)
    raise HarnessError(f"unknown strategy {strategy!r}")


@dataclass
class HopeReport:
    rows: list
    per_fold: list
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "rows": [vars(r) for r in self.rows],
            "per_fold": self.per_fold,
            "provenance": self.provenance,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kw)

    def metrics_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(("schema_version", SCHEMA_VERSION))
        w.writerow(MetricRow.CSV_FIELDS)
        for r in self.rows:
            w.writerow([getattr(r, f) for f in MetricRow.CSV_FIELDS])
        return buf.getvalue()

    def fold_long_csv(self) -> str:
        """Long-format per-fold data (model, fold, metric, value) for plotting."""
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(("model", "fold", "metric", "value"))
        for rec in self.per_fold:
            for name, value in rec.get("fold_metrics", {}).items():
                w.writerow((rec["model"], rec["fold"], name, value))
        return buf.getvalue()


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _fold_seed(master: int, model_idx: int, fold_idx: int) -> int:
    ss = np.random.SeedSequence((int(master), int(model_idx), int(fold_idx)))
    return int(ss.generate_state(1)[0])


def _run_fold(g: Graph, model: ModelSpec, fold: np.ndarray, B: int,
              est_cfg: EstimatorConfig, samp_cfg: SamplerConfig,
              seed: int, warm_theta, exact_loo_marginals: bool) -> dict:
    """Fit-with-holdout, conditionally simulate, and summarize one fold."""
    pg = PartialGraph(g, fold)
    method = est_cfg.method
    if method == "auto":
        method = "mple" if model.is_dyadic_independent else "mcmle"
    t0 = time.perf_counter()
    if method == "mple":
        fit_res = mple(pg, model, replace(est_cfg, method="mple"))
    else:
        fit_res = mcmle(pg, model, replace(est_cfg, method="mcmle", seed=seed),
                        theta0=warm_theta)
    fit_time = time.perf_counter() - t0

    truth = g.dyad_states(fold)
    if exact_loo_marginals and len(fold) == 1 and model.is_dyadic_independent:
        p_edge = exact_marginal_change_score(g, fold[0], fit_res.theta, model)
        rng = np.random.default_rng(seed)
        draws = (rng.random((B, 1)) < p_edge).astype(np.uint8)
        sims_states = draws
        yhat = {tuple(map(int, fold[0])): marginal_estimate(draws[:, 0], B)}
    else:
        res = sample_conditional_raw(pg, fit_res.theta, model, B,
                                     replace(samp_cfg, seed=seed))
        sims_states = res.states
        yhat = {tuple(map(int, fold[k])): marginal_estimate(res.states[:, k], B)
                for k in range(len(fold))}

    conf = ConfusionMatrix()
    conf.add_draws(truth, sims_states)

    obs_c = {k: node_centrality(g, k) for k in (DEGREE, BETWEENNESS,
                                              EIGENVECTOR)}
    obs_z = {k: centralization(g, k) for k in (BETWEENNESS, DEGREE)}
    sqerr = {k: 0.0 for k in obs_c}
    zgap = {k: 0.0 for k in obs_z}
    fi, fj = fold[:, 0], fold[:, 1]
    adj = g.adj.copy()
    for b in range(B):
        st = sims_states[b].astype(bool)
        adj[fi, fj] = st
        adj[fj, fi] = st
        sim = g.replace_adjacency(adj)
        for k in obs_c:
            sqerr[k] += float(np.sum((node_centrality(sim, k) - obs_c[k]) ** 2))
        for k in obs_z:
            zgap[k] += (centralization(sim, k) - obs_z[k]) ** 2

    return {
        "theta": fit_res.theta,
        "coord_names": fit_res.coord_names,
        "diagnostics": fit_res.diagnostics,
        "fit_time": fit_time,
        "truth": {tuple(map(int, d)): int(s) for d, s in zip(fold, truth)},
        "yhat": yhat,
        "confusion": (conf.tp, conf.fp, conf.fn, conf.tn),
        "sqerr": sqerr,
        "zgap": zgap,
        "B": B,
    }


def run_hope(g: Graph, models, plan: FoldPlan, B: int,
             est_cfg: EstimatorConfig = None, samp_cfg: SamplerConfig = None,
             seed: int = 0, workers: int = 1, model_names=None,
             exact_loo_marginals: bool = False) -> HopeReport:
    """Run the three-step held-out evaluation for every model over the plan.

    Fold fits that fail (non-convergence, degeneracy) are excluded and
    counted in the provenance; the run errors out only if every fold of a
    model fails.
    """
    if B < 1:
        raise HarnessError("B must be >= 1")
    models = list(models)
    if model_names is None:
        model_names = [f"model_{k + 1}" for k in range(len(models))]
    est_cfg = est_cfg or EstimatorConfig(method="auto")
    samp_cfg = samp_cfg or SamplerConfig()
    t_start = time.time()

    # warm starts from the full-data pseudo-likelihood fit
    warm = []
    for m in models:
        try:
            warm.append(mple(PartialGraph(g), m).theta)
        except EstimationError:
            warm.append(None)

    jobs = []
    for mi, m in enumerate(models):
        for fi, fold in enumerate(plan.folds):
            if len(fold) == 0:
                continue
            jobs.append((mi, fi, g, m, fold, B, est_cfg, samp_cfg,
                         _fold_seed(seed, mi, fi), warm[mi],
                         exact_loo_marginals))

    results = {}
    failures = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for mi, fi, out in pool.map(_job_safe, jobs):
                if isinstance(out, str):
                    failures.append((mi, fi, out))
                else:
                    results[(mi, fi)] = out
    else:
        for job in jobs:
            mi, fi, out = _job_safe(job)
            if isinstance(out, str):
                failures.append((mi, fi, out))
            else:
                results[(mi, fi)] = out

    rows = []
    per_fold = []
    for mi, m in enumerate(models):
        fold_keys = sorted(k for k in results if k[0] == mi)
        if not fold_keys:
            raise HarnessError(
                f"every fold failed for {model_names[mi]}: "
                f"{[f for f in failures if f[0] == mi][:3]}")
        conf = ConfusionMatrix()
        y_true, y_hat = {}, {}
        sqerr = {k: 0.0 for k in (DEGREE, BETWEENNESS, EIGENVECTOR)}
        zgap = {k: 0.0 for k in (BETWEENNESS, DEGREE)}
        n_rows = 0
        for (_, fi) in fold_keys:
            r = results[(mi, fi)]
            tp, fp, fn, tn = r["confusion"]
            conf.tp += tp; conf.fp += fp; conf.fn += fn; conf.tn += tn
            for d, v in r["truth"].items():
                y_true[(fi, d)] = v
            for d, v in r["yhat"].items():
                y_hat[(fi, d)] = v
            for k in sqerr:
                sqerr[k] += r["sqerr"][k]
            for k in zgap:
                zgap[k] += r["zgap"][k]
            n_rows += r["B"]
            per_fold.append({
                "model": model_names[mi],
                "fold": fi,
                "theta": r["theta"],
                "coord_names": r["coord_names"],
                "diagnostics": r["diagnostics"],
                "fit_time": r["fit_time"],
                "yhat": {f"{d[0]}-{d[1]}": v for d, v in r["yhat"].items()},
                "fold_metrics": {
                    "fold_tsl": float(sum((r["yhat"][d] - r["truth"][d]) ** 2
                                          for d in r["truth"])),
                    "fit_time": r["fit_time"],
                },
            })
        acc = accuracy_from_confusion(conf)
        tsl = total_squared_loss(y_true, y_hat, strategy=plan.strategy)
        obs_c = {k: node_centrality(g, k) for k in sqerr}
        rel = {k: reliability_from_sums(obs_c[k], sqerr[k], n_rows)
               for k in sqerr}
        row = MetricRow(
            model=model_names[mi],
            strategy=plan.strategy,
            edge_acc=acc.edge_acc,
            null_acc=acc.null_acc,
            overall_acc=acc.overall_acc,
            tsl=tsl.scaled,
            tsl_raw=tsl.raw,
            rho_degree=rel[DEGREE].rho,
            rho_betweenness=rel[BETWEENNESS].rho,
            rho_eigen=rel[EIGENVECTOR].rho,
            mse_degree=rel[DEGREE].mse,
            mse_betweenness=rel[BETWEENNESS].mse,
            mse_eigen=rel[EIGENVECTOR].mse,
            rmse_betweenness_centralization=float(
                np.sqrt(zgap[BETWEENNESS] / n_rows)),
            rmse_degree_centralization=float(
                np.sqrt(zgap[DEGREE] / n_rows)),
        )
        row.validate()
        rows.append(row)

    provenance = {
        "seed": seed,
        "B": B,
        "strategy": plan.strategy,
        "M": plan.M,
        "plan_seed": plan.seed,
        "rng": RNG_NAME,
        "sampler": vars(samp_cfg.resolved(1)) | {"burn_in": samp_cfg.burn_in,
                                                 "thin": samp_cfg.thin},
        "estimator": {k: v for k, v in vars(est_cfg).items() if k != "sampler"},
        "workers_declared": workers,
        "exact_loo_marginals": exact_loo_marginals,
        "excluded_folds": [{"model": model_names[mi], "fold": fi, "error": err}
                           for mi, fi, err in failures],
        "started": t_start,
        "elapsed_s": time.time() - t_start,
        "warm_start": "full-data MPLE",
    }
    return HopeReport(rows=rows, per_fold=per_fold, provenance=provenance)


def _job_safe(args):
    mi, fi = args[0], args[1]
    try:
        return mi, fi, _run_fold(*args[2:])
    except EstimationError as exc:
        return mi, fi, f"{type(exc).__name__}: {exc}"


def runtime_model(cores: int, folds: int, fit_time: float,
                  partition_time: float = 0.0,
                  combine_time: float = 0.0) -> float:
    """Predicted wall time: partition + (fit * folds) / cores + combination."""
    if cores < 1:
        raise ValueError("cores must be >= 1")
    return partition_time + fit_time * folds / cores + combine_time
