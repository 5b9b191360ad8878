"""Acceptance gate: seven criteria, one pass/fail line each under ``pytest -v``.

Criteria 1-4 reproduce published case-study results on the lawyers'
collaboration network ("lazega") and the teenage friendship network
("teenage").  Those datasets are not redistributable and are not bundled, so
the corresponding tests skip with a notice when the data are absent; see
docs/DATA.md for how to install them.  Criteria 5-7 are dataset-independent
and always run.

Environment knobs:
  HOPERGM_DATA      dataset directory (default: data/)
  HOPERGM_ACCEPT_B  conditional draws for criterion 4 (default 500; values
                    below 500 check only the model-ranking claim)
"""

import os

import numpy as np
import pytest

from hopergm import (EstimatorConfig, Graph, ModelSpec, PartialGraph,
                     SamplerConfig, TermSpec, build_partition, centralization,
                     dataset_present, exact_enumeration,
                     exact_marginal_change_score, fit, load_dataset,
                     loglik_path_sampling, marginal_estimate, mcmle, mple,
                     n_dyads, run_hope, sample_conditional_raw,
                     sample_unconditional_raw, suff_stats)
from hopergm.estimation import BoundaryMLEError
from hopergm.graph import all_dyads

from conftest import brute_betweenness, random_graph

EDGES = ModelSpec([TermSpec("edges")])
EDGES_GWESP_05 = ModelSpec([TermSpec("edges"), TermSpec("gwesp", decay=0.5)])

_SKIP_NOTE = ("dataset {!r} not installed under data/ (or $HOPERGM_DATA); "
              "see docs/DATA.md -- criterion skipped, not passed")

needs_lazega = pytest.mark.skipif(not dataset_present("lazega"),
                                  reason=_SKIP_NOTE.format("lazega"))
needs_teenage = pytest.mark.skipif(not dataset_present("teenage"),
                                   reason=_SKIP_NOTE.format("teenage"))
needs_both = pytest.mark.skipif(
    not (dataset_present("lazega") and dataset_present("teenage")),
    reason=_SKIP_NOTE.format("lazega+teenage"))


# -- benchmark model sets ----------------------------------------------------

def lazega_models():
    e = TermSpec("edges")
    gw = TermSpec("gwesp", decay=0.75)
    cov = [TermSpec("nodecov", attr="seniority"),
           TermSpec("nodecov", attr="practice"),
           TermSpec("nodematch", attr="practice"),
           TermSpec("nodematch", attr="gender"),
           TermSpec("nodematch", attr="office")]
    diff = [TermSpec("nodecov", attr="seniority"),
            TermSpec("nodecov", attr="practice"),
            TermSpec("nodematch_diff", attr="practice", keep=(2,)),
            TermSpec("nodematch_diff", attr="gender"),
            TermSpec("nodematch_diff", attr="office", keep=(1, 2))]
    return [ModelSpec([e]),
            ModelSpec([e, gw]),
            ModelSpec([e] + cov),
            ModelSpec([e, gw] + cov),
            ModelSpec([e, gw] + diff)]


def teenage_models():
    e = TermSpec("edges")
    gw = TermSpec("gwesp", decay=float(np.log(2)))
    gwd = TermSpec("gwdegree", decay=0.8)
    drugs = TermSpec("nodematch_diff", attr="drugs_binary")
    smoke = TermSpec("nodematch_diff", attr="smoke")
    return [ModelSpec([e]),
            ModelSpec([e, gw, gwd]),
            ModelSpec([e, drugs]),
            ModelSpec([e, gw, gwd, drugs]),
            ModelSpec([e, gw, gwd, drugs, smoke])]


def _mcmle_cfg(seed=0, tol=0.05, n=4000):
    return EstimatorConfig(method="mcmle", grad_tol=tol, mc_samples=n,
                           final_mc_samples=4 * n, max_iter=100, seed=seed)


# -- criterion 1: exact analytic reproduction --------------------------------

@needs_both
def test_criterion_1_edge_model_exact_reproduction():
    lazega = load_dataset("lazega")
    res = mple(PartialGraph(lazega), EDGES)
    assert res.theta[0] == pytest.approx(-1.499, abs=0.001)
    assert res.aic == pytest.approx(600.8, abs=0.1)
    assert res.bic == pytest.approx(605.2, abs=0.1)

    teenage = load_dataset("teenage")
    res = mple(PartialGraph(teenage), EDGES)
    assert res.theta[0] == pytest.approx(-2.74, abs=0.01)
    assert res.aic == pytest.approx(560.8, abs=0.1)
    assert res.bic == pytest.approx(565.9, abs=0.1)


# -- criterion 2: dyadic-independence reproduction ---------------------------

@needs_both
def test_criterion_2_dyadic_independence_reproduction():
    lazega = load_dataset("lazega")
    m3 = lazega_models()[2]
    res = mple(PartialGraph(lazega), m3)
    expected = [-8.31, 0.04, 0.90, 0.88, 1.13, 1.65]
    np.testing.assert_allclose(res.theta, expected, atol=0.02)
    assert res.aic == pytest.approx(513.8, abs=0.3)
    assert res.bic == pytest.approx(540.5, abs=0.3)

    teenage = load_dataset("teenage")
    m3 = teenage_models()[2]
    res = mple(PartialGraph(teenage), m3)
    np.testing.assert_allclose(res.theta, [-4.01, 1.42, 3.09], atol=0.02)
    assert res.aic == pytest.approx(535.1, abs=0.3)
    assert res.bic == pytest.approx(550.4, abs=0.3)


# -- criterion 3: dependence-model reproduction (stochastic) -----------------

# (coefficients, standard errors, AIC) in our coordinate order
_LAZEGA_DEP = {
    1: ([-3.80, 1.05], [0.25, 0.12], 524.3),
    3: ([-7.37, 0.93, 0.02, 0.41, 0.76, 0.70, 1.15],
        [0.73, 0.15, 0.01, 0.12, 0.19, 0.26, 0.20], 472.0),
    4: ([-4.67, 0.95, 0.02, -0.37, 1.50, 0.48, 0.59, 1.00, 1.46],
        [0.78, 0.16, 0.01, 0.22, 0.39, 0.27, 1.35, 0.20, 0.24], 470.0),
}
_TEENAGE_DEP = {
    1: ([-6.12, 1.783, 2.246], [0.43, 0.18, 0.43], 453.6),
    3: ([-6.72, 1.71, 2.20, 0.82, 1.57],
        [0.55, 0.19, 0.45, 0.35, 0.35], 438.7),
    4: ([-6.75, 1.71, 2.21, 0.75, 1.81, 0.13, 0.93, -0.69],
        [0.54, 0.18, 0.45, 0.36, 0.40, 0.25, 0.75, 0.90], 443.7),
}


def _check_dependence_models(g, models, refs, seed0):
    for idx, (coefs, ses, aic) in refs.items():
        model = models[idx]
        res = fit(PartialGraph(g), model, _mcmle_cfg(seed=seed0 + idx),
                  compute_loglik=True, bridges=24, draws_per_bridge=2500)
        np.testing.assert_allclose(res.theta, coefs,
                                   atol=2 * np.asarray(ses) + 1e-9)
        assert res.aic == pytest.approx(aic, abs=2.0), f"model index {idx}"


@needs_both
def test_criterion_3_dependence_model_reproduction():
    _check_dependence_models(load_dataset("lazega"), lazega_models(),
                             _LAZEGA_DEP, seed0=31)
    _check_dependence_models(load_dataset("teenage"), teenage_models(),
                             _TEENAGE_DEP, seed0=61)


# -- criterion 4: held-out evaluation table reproduction ---------------------

def _hope_rows(g, models, B, seed, M):
    est = EstimatorConfig(method="auto", grad_tol=0.08, mc_samples=2500,
                          seed=seed)
    out = {}
    for strategy in ("loo", "lmo", "node"):
        plan = build_partition(g, strategy, seed=seed,
                               M=M if strategy == "lmo" else None)
        rep = run_hope(g, models, plan, B=B, est_cfg=est, seed=seed,
                       workers=int(os.environ.get("HOPERGM_WORKERS", "1")),
                       model_names=[f"m{k + 1}" for k in range(len(models))],
                       exact_loo_marginals=(strategy == "loo"))
        out[strategy] = rep.rows
    return out


def _best_or_tied(rows, model_name, attr, bigger_is_better):
    vals = {r.model: getattr(r, attr) for r in rows}
    best = max(vals.values()) if bigger_is_better else min(vals.values())
    return abs(vals[model_name] - best) < 1e-9


@needs_both
def test_criterion_4_hope_table_reproduction():
    B = int(os.environ.get("HOPERGM_ACCEPT_B", "500"))
    full = B >= 500

    lazega = load_dataset("lazega")
    rows_l = _hope_rows(lazega, lazega_models(), B=B, seed=17, M=35)
    if full:
        m1_loo = [r for r in rows_l["loo"] if r.model == "m1"][0]
        assert m1_loo.edge_acc == pytest.approx(0.192, abs=0.015)
        assert m1_loo.null_acc == pytest.approx(0.817, abs=0.01)
        assert m1_loo.overall_acc == pytest.approx(0.703, abs=0.01)
        assert m1_loo.tsl == pytest.approx(92.55, abs=3.0)

    teenage = load_dataset("teenage")
    rows_t = _hope_rows(teenage, teenage_models(), B=B, seed=19, M=49)
    if full:
        m1_loo = [r for r in rows_t["loo"] if r.model == "m1"][0]
        assert m1_loo.overall_acc == pytest.approx(0.878, abs=0.01)

    # headline model-selection claim: the covariates+dependence model (m4)
    # attains best-or-tied Overall ACC and TSL in >= 2 of 3 strategies
    for rows in (rows_l, rows_t):
        wins_acc = sum(_best_or_tied(rows[s], "m4", "overall_acc", True)
                       for s in rows)
        wins_tsl = sum(_best_or_tied(rows[s], "m4", "tsl", False)
                       for s in rows)
        assert wins_acc >= 2
        assert wins_tsl >= 2


# -- criterion 5: oracle equivalence on random small graphs ------------------

def test_criterion_5_oracle_equivalence():
    rng = np.random.default_rng(2024)
    n_checked = 0
    attempts = 0
    while n_checked < 50:
        attempts += 1
        assert attempts < 400, "too many boundary rejections"
        n = int(rng.integers(3, 5))
        g = random_graph(n, density=rng.uniform(0.2, 0.8),
                         seed=int(rng.integers(1 << 30)))
        theta_true = rng.uniform(-1.0, 1.0, size=2)
        ex = exact_enumeration(PartialGraph(g), EDGES_GWESP_05)

        # (a) sampler empirical pmf vs exact enumeration, TV < 0.02
        res = sample_unconditional_raw(g, theta_true, EDGES_GWESP_05, 100000,
                                       SamplerConfig(seed=int(rng.integers(1 << 30))))
        codes = (res.states.astype(np.int64)
                 @ (1 << np.arange(res.states.shape[1], dtype=np.int64)))
        freq = np.bincount(codes, minlength=len(ex.all_stats)) / len(codes)
        tv = 0.5 * float(np.abs(freq - ex.pmf(theta_true)).sum())
        assert tv < 0.02, f"TV {tv:.4f} at theta {theta_true}"

        # (b) MCMLE within 0.05 of the exact MLE (boundary graphs rejected)
        try:
            exact_mle = ex.mle()
        except BoundaryMLEError:
            continue
        approx = mcmle(PartialGraph(g), EDGES_GWESP_05,
                       EstimatorConfig(method="mcmle", grad_tol=0.03,
                                       mc_samples=8000,
                                       final_mc_samples=30000, max_iter=100,
                                       seed=int(rng.integers(1 << 30))))
        err = float(np.max(np.abs(approx.theta - exact_mle.theta)))
        assert err < 0.05, f"MCMLE off by {err:.4f} on {g!r}"

        # (c) path-sampled loglik within 0.05 of exact
        ll = loglik_path_sampling(exact_mle.theta, EDGES_GWESP_05,
                                  PartialGraph(g),
                                  EstimatorConfig(seed=int(rng.integers(1 << 30))))
        assert ll == pytest.approx(ex.loglik(exact_mle.theta), abs=0.05)
        n_checked += 1


# -- criterion 6: property suites --------------------------------------------

def test_criterion_6_property_suites():
    from hopergm import (betweenness_centrality, change_stats,
                         reliability_rho, toggle)

    # change-score consistency to 1e-10 on every term family, n <= 8
    full_model = ModelSpec([
        TermSpec("edges"), TermSpec("gwesp", decay=0.75),
        TermSpec("gwdegree", decay=0.8), TermSpec("nodematch", attr="group"),
        TermSpec("nodematch_diff", attr="group"),
        TermSpec("nodecov", attr="score"), TermSpec("edgecov", attr="dist")])
    for seed in range(5):
        g = random_graph(8, density=0.4, seed=seed, attrs=True, dyad_cov=True)
        for d in all_dyads(8):
            g_on = g if g.has_edge(*d) else toggle(g, d)
            expected = (suff_stats(g_on, full_model)
                        - suff_stats(toggle(g_on, d), full_model))
            np.testing.assert_allclose(change_stats(g, d, full_model),
                                       expected, atol=1e-10)

    # betweenness vs exhaustive geodesic oracle, n <= 7
    for seed in range(8):
        g = random_graph(7, density=0.35, seed=200 + seed)
        np.testing.assert_allclose(betweenness_centrality(g),
                                   brute_betweenness(g.adj), atol=1e-9)

    # reliability boundary identities
    obs = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
    assert reliability_rho(obs, np.tile(obs, (4, 1))).rho == pytest.approx(1.0)
    assert reliability_rho(obs, np.full_like(obs, obs.mean())).rho == \
        pytest.approx(0.0)

    # centralization extremes
    star = Graph(7, edges=[(0, k) for k in range(1, 7)])
    complete = Graph(7, adjacency=~np.eye(7, dtype=bool))
    for kind in ("degree", "betweenness"):
        assert centralization(star, kind) == pytest.approx(1.0)
        assert centralization(complete, kind) == pytest.approx(0.0)

    # conditional draws preserve every observed dyad on every draw
    g = random_graph(9, density=0.35, seed=77)
    free = all_dyads(9)[[0, 7, 19, 30]]
    pg = PartialGraph(g, free)
    res = sample_conditional_raw(pg, np.array([-0.3, 0.4]), EDGES_GWESP_05,
                                 60, SamplerConfig(seed=5))
    free_set = {tuple(d) for d in free}
    for sim in res.graphs():
        for i, j in all_dyads(9):
            if (i, j) not in free_set:
                assert sim.has_edge(i, j) == g.has_edge(i, j)

    # seed determinism across worker counts
    g = random_graph(7, density=0.4, seed=31)
    plan = build_partition(g, "lmo", seed=3, M=4)
    reps = [run_hope(g, [EDGES], plan, B=25,
                     est_cfg=EstimatorConfig(method="mple"), seed=11,
                     workers=w) for w in (1, 2)]
    assert reps[0].metrics_csv() == reps[1].metrics_csv()


# -- criterion 7: closed-form cross-checks -----------------------------------

def test_criterion_7_closed_form_cross_checks():
    # BIC - AIC = p (ln N_dyads - 2) exactly, shared loglik
    g = random_graph(10, density=0.4, seed=5, attrs=True)
    m = ModelSpec([TermSpec("edges"), TermSpec("nodematch", attr="group")])
    res = mple(PartialGraph(g), m)
    p, N = 2, n_dyads(10)
    assert res.bic - res.aic == pytest.approx(p * (np.log(N) - 2.0),
                                              abs=1e-10)

    # a Bernoulli(p) model predicting dyads it generated has overall
    # accuracy p^2 + (1-p)^2; at the lawyers' network density this is 0.7015
    p_edge = 115 / 630
    analytic = p_edge ** 2 + (1 - p_edge) ** 2
    assert analytic == pytest.approx(0.7015, abs=5e-4)
    rng = np.random.default_rng(9)
    truth = rng.random(200000) < p_edge
    pred = rng.random(200000) < p_edge
    mc = float(np.mean(truth == pred))
    assert mc == pytest.approx(analytic, abs=3 * np.sqrt(0.25 / 200000) + 2e-3)

    # leave-1-out: exact change-score marginal equals the simulated marginal
    # within 3 binomial standard errors (dyadic-independence model)
    g = random_graph(7, density=0.5, seed=8, attrs=True)
    m = ModelSpec([TermSpec("edges"), TermSpec("nodematch", attr="group")])
    theta = mple(PartialGraph(g), m).theta
    B = 500
    for k, dyad in enumerate(all_dyads(7)[[0, 5, 12, 20]]):
        exact_p = exact_marginal_change_score(g, dyad, theta, m)
        pg = PartialGraph(g, dyad[None, :])
        res = sample_conditional_raw(pg, theta, m, B,
                                     SamplerConfig(seed=100 + k))
        sim_p = marginal_estimate(res.states[:, 0], B)
        se = np.sqrt(exact_p * (1 - exact_p) / B)
        assert abs(sim_p - exact_p) < 3 * se + 1 / (B + 1), dyad
