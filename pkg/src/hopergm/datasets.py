"""Case-study dataset loaders and fixture verification.

The two benchmark networks (the Lazega lawyers collaboration network and the
Glasgow Teenage Friends and Lifestyle friendship network) are not bundled for
licensing reasons; see docs/DATA.md for where to obtain them and the exact
file layout expected here.  ``verify_dataset`` checks a loaded graph against
the published descriptive statistics so users can confirm their copy matches
before trusting any reproduction run.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .graph import Graph, GraphDataError, descriptives, load_graph

DATA_ENV = "HOPERGM_DATA"

# published descriptive statistics of the two case-study networks
REFERENCE_DESCRIPTIVES = {
    "lazega": {
        "size": 36,
        "edges": 115,
        "density": 0.18,
        "mean_degree": 6.39,
        "sd_degree": 4.18,
        "skewness_degree": 0.29,
        "isolates": 2,
        "transitivity": 0.39,
    },
    "teenage": {
        "size": 50,
        "edges": 74,
        "density": 0.06,
        "mean_degree": 2.96,
        "sd_degree": 1.83,
        "skewness_degree": 0.65,
        "isolates": 3,
        "transitivity": 0.42,
    },
}

# rounding granularity of the published values, plus slack for the skewness
# estimator (the publication does not name which one it used)
_TOLERANCES = {
    "size": 0.0,
    "edges": 0.0,
    "density": 0.005,
    "mean_degree": 0.005,
    "sd_degree": 0.005,
    "skewness_degree": 0.05,
    "isolates": 0.0,
    "transitivity": 0.005,
}

_FILES = {
    "lazega": ("lazega.edges", "lazega_attrs.csv", 36),
    "teenage": ("teenage.edges", "teenage_attrs.csv", 50),
}


def data_dir(override=None) -> Path:
    return Path(override or os.environ.get(DATA_ENV, "data"))


def dataset_present(name: str, directory=None) -> bool:
    d = data_dir(directory)
    edges, attrs, _ = _FILES[name]
    return (d / edges).is_file() and (d / attrs).is_file()


def load_dataset(name: str, directory=None, index_base: int = 0) -> Graph:
    """Load a case-study network from the conventional file layout."""
    if name not in _FILES:
        raise GraphDataError(f"unknown dataset {name!r}; "
                             f"expected one of {sorted(_FILES)}")
    d = data_dir(directory)
    edges, attrs, n = _FILES[name]
    if not (d / edges).is_file():
        raise FileNotFoundError(
            f"dataset {name!r} not installed: {d / edges} missing; "
            "see docs/DATA.md for how to obtain and lay out the files")
    g = load_graph(d / edges, d / attrs if (d / attrs).is_file() else None,
                   n=n, index_base=index_base)
    if name == "teenage" and "drugs" in g.node_attrs and \
            "drugs_binary" not in g.node_attrs:
        attrs_new = dict(g.node_attrs)
        attrs_new["drugs_binary"] = np.where(g.node_attrs["drugs"] <= 2, 1.0, 2.0)
        g = Graph(g.n, adjacency=g.adj, node_attrs=attrs_new,
                  dyad_covariates=g.dyad_covariates)
    return g


def verify_dataset(name: str, directory=None, index_base: int = 0):
    """Compare a dataset's descriptives with the published reference values.

    Returns (ok, diff_rows) where diff_rows holds one (statistic, expected,
    actual, tolerance, ok) tuple per reference row.
    """
    g = load_dataset(name, directory, index_base=index_base)
    return verify_graph(g, name)


def verify_graph(g: Graph, name: str):
    ref = REFERENCE_DESCRIPTIVES[name]
    got = descriptives(g)
    rows = []
    ok_all = True
    for key, expected in ref.items():
        actual = got[key]
        tol = _TOLERANCES[key]
        ok = actual is not None and abs(actual - expected) <= tol + 1e-12
        ok_all &= ok
        rows.append((key, expected, actual, tol, ok))
    return ok_all, rows
