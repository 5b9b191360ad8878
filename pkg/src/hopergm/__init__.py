"""hopergm: held-out predictive evaluation for exponential random graph models.

Fit ERGMs (pseudo-likelihood, Monte Carlo MLE, or exact enumeration on tiny
graphs), simulate from them conditionally on partially observed networks, and
score out-of-sample predictions at the dyad, node, and graph level.
"""

from .graph import (Graph, GraphDataError, PartialGraph, all_dyads,
                    descriptives, dyad_index, index_to_dyad, load_edgelist,
                    load_graph, load_node_attrs, load_dyad_covariate, n_dyads,
                    save_edgelist, toggle)
from .terms import (ModelSpec, ModelSpecError, TermSpec, change_stats,
                    model_from_json, suff_stats)
from .sampler import (SamplerConfig, SamplerError, SampleResult,
                      sample_conditional, sample_conditional_raw,
                      sample_unconditional_raw)
from .estimation import (BoundaryMLEError, EstimationError, EstimatorConfig,
                         ExactModel, FitResult, SeparationError,
                         exact_enumeration, fit, loglik_path_sampling, mcmle,
                         mple)
from .centrality import (betweenness_centrality, centrality, centralization,
                         degree_centrality, eigenvector_centrality)
from .metrics import (Accuracies, ConfusionMatrix, MetricRow, Reliability,
                      accuracy_from_confusion, exact_marginal_change_score,
                      marginal_estimate, reliability_rho, rmse_centralization,
                      total_squared_loss)
from .harness import (FoldPlan, HarnessError, HopeReport, build_partition,
                      run_hope, runtime_model)
from .datasets import (dataset_present, load_dataset, verify_dataset,
                       verify_graph)

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphDataError", "PartialGraph", "all_dyads", "descriptives",
    "dyad_index", "index_to_dyad", "load_edgelist", "load_graph",
    "load_node_attrs", "load_dyad_covariate", "n_dyads", "save_edgelist",
    "toggle",
    "ModelSpec", "ModelSpecError", "TermSpec", "change_stats",
    "model_from_json", "suff_stats",
    "SamplerConfig", "SamplerError", "SampleResult", "sample_conditional",
    "sample_conditional_raw", "sample_unconditional_raw",
    "BoundaryMLEError", "EstimationError", "EstimatorConfig", "ExactModel",
    "FitResult", "SeparationError", "exact_enumeration", "fit",
    "loglik_path_sampling", "mcmle", "mple",
    "betweenness_centrality", "centrality", "centralization",
    "degree_centrality", "eigenvector_centrality",
    "Accuracies", "ConfusionMatrix", "MetricRow", "Reliability",
    "accuracy_from_confusion", "exact_marginal_change_score",
    "marginal_estimate", "reliability_rho", "rmse_centralization",
    "total_squared_loss",
    "FoldPlan", "HarnessError", "HopeReport", "build_partition", "run_hope",
    "runtime_model",
    "dataset_present", "load_dataset", "verify_dataset", "verify_graph",
    "__version__",
]
