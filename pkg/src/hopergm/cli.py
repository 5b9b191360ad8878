"""Command-line entry points: fit, simulate, hope, verify-dataset, partition.

Every subcommand accepts either flags or ``--config file.json`` whose keys
mirror the flag names (flags win).  All output files embed the resolved run
configuration and master seed, so a run can be reproduced from its own
output.  Exit codes: 0 success, 1 usage error, 2 data error, 3 estimation
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import (REFERENCE_DESCRIPTIVES, dataset_present, load_dataset,
                       verify_dataset)
from .estimation import (EstimationError, EstimatorConfig, fit as fit_model,
                         mple)
from .graph import Graph, GraphDataError, PartialGraph, load_graph, save_edgelist, validate_dyads
from .harness import HarnessError, build_partition, run_hope
from .sampler import SamplerConfig, SamplerError, sample_conditional_raw, sample_unconditional_raw
from .terms import ModelSpecError, model_from_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ESTIMATION = 3

STRATEGIES = ("loo", "lmo", "node")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_model(spec: str):
    """Model from inline JSON or a JSON file path."""
    text = spec
    p = Path(spec)
    if not spec.lstrip().startswith("[") and p.is_file():
        text = p.read_text()
    elif spec == "edges":
        text = '[{"term": "edges"}]'
    try:
        return model_from_json(text)
    except ModelSpecError as exc:
        raise CliError(f"bad model spec: {exc}", EXIT_USAGE) from exc


def _load_graph_arg(args) -> Graph:
    name = args.dataset
    if name in REFERENCE_DESCRIPTIVES:
        if not dataset_present(name, args.data):
            raise CliError(
                f"dataset {name!r} not installed under "
                f"{args.data or 'data/ (or $HOPERGM_DATA)'}; see docs/DATA.md",
                EXIT_DATA)
        try:
            return load_dataset(name, args.data, index_base=args.index_base)
        except GraphDataError as exc:
            raise CliError(str(exc), EXIT_DATA) from exc
    if args.n is None:
        raise CliError("--n is required when loading from an edgelist file",
                       EXIT_USAGE)
    try:
        return load_graph(name, args.attrs, n=args.n,
                          index_base=args.index_base)
    except (OSError, GraphDataError) as exc:
        raise CliError(f"cannot load graph: {exc}", EXIT_DATA) from exc


def _run_config(args) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items()
            if k not in skip and not callable(v)}


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, default=_np_default) + "\n")


def _np_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer, np.floating)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o)}")


# -- subcommands -------------------------------------------------------------

def cmd_fit(args) -> int:
    g = _load_graph_arg(args)
    model = _load_model(args.model)
    method = args.method
    if method == "auto":
        method = "mple" if model.is_dyadic_independent else "mcmle"
    cfg = EstimatorConfig(method=method, seed=args.seed,
                          mc_samples=args.mc_samples)
    try:
        res = fit_model(PartialGraph(g), model, cfg, compute_loglik=True)
    except EstimationError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    print(f"{'term':<28}{'estimate':>12}{'std. err.':>12}")
    for k, name in enumerate(res.coord_names):
        se = f"{res.std_err[k]:.3f}" if res.std_err is not None else "--"
        print(f"{name:<28}{res.theta[k]:>12.4f}{se:>12}")
    print(f"loglik {res.loglik:.2f}   AIC {res.aic:.1f}   BIC {res.bic:.1f}")
    if args.out:
        out = Path(args.out)
        _write_json(out / "fit.json",
                    {"run_config": _run_config(args), "fit": res.to_dict()})
        print(f"wrote {out / 'fit.json'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _load_graph_arg(args)
    model = _load_model(args.model)
    if args.theta is not None:
        theta = np.asarray(json.loads(args.theta), dtype=float)
    elif args.fit is not None:
        coeffs = json.loads(Path(args.fit).read_text())["fit"]["coefficients"]
        theta = np.array(list(coeffs.values()))
    else:
        raise CliError("simulate needs --theta or --fit", EXIT_USAGE)
    cfg = SamplerConfig(seed=args.seed)
    try:
        if args.free is not None:
            free = validate_dyads(
                np.loadtxt(args.free, dtype=int, ndmin=2), g.n)
            if len(free) == 0:
                raise CliError("conditional simulation with an empty free "
                               "set is a no-op", EXIT_USAGE)
            res = sample_conditional_raw(PartialGraph(g, free), theta, model,
                                         args.draws, cfg)
        else:
            res = sample_unconditional_raw(g, theta, model, args.draws, cfg)
    except (SamplerError, ModelSpecError) as exc:
        print(f"sampler error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out or "simulate_out")
    out.mkdir(parents=True, exist_ok=True)
    for b in range(args.draws):
        save_edgelist(res.graph(b), out / f"draw_{b:05d}.edges",
                      index_base=args.index_base)
    _write_json(out / "stats.json", {
        "run_config": _run_config(args),
        "stat_names": model.coordinate_names(g),
        "stats": res.stats,
    })
    print(f"wrote {args.draws} edgelists and stats.json to {out}")
    return EXIT_OK


def cmd_hope(args) -> int:
    g = _load_graph_arg(args)
    models = [_load_model(m) for m in args.model]
    strategies = args.strategy or ["lmo"]
    est_cfg = EstimatorConfig(method=args.method, seed=args.seed,
                              mc_samples=args.mc_samples)
    samp_cfg = SamplerConfig()
    out = Path(args.out or "hope_out")
    out.mkdir(parents=True, exist_ok=True)
    all_rows = []
    reports = {}
    for strat in strategies:
        plan = build_partition(g, strat, seed=args.seed, M=args.folds)
        try:
            rep = run_hope(g, models, plan, B=args.draws, est_cfg=est_cfg,
                           samp_cfg=samp_cfg, seed=args.seed,
                           workers=args.workers,
                           model_names=[f"model_{k + 1}"
                                        for k in range(len(models))])
        except (EstimationError, HarnessError) as exc:
            print(f"hope run failed for strategy {strat}: {exc}",
                  file=sys.stderr)
            return EXIT_ESTIMATION
        reports[strat] = rep
        all_rows.extend(rep.rows)
        if rep.provenance["excluded_folds"]:
            print(f"warning: {len(rep.provenance['excluded_folds'])} fold(s) "
                  f"excluded under strategy {strat}", file=sys.stderr)
    from .metrics import MetricRow
    lines = [",".join(("schema_version", "1")),
             ",".join(MetricRow.CSV_FIELDS)]
    for r in all_rows:
        lines.append(",".join(str(getattr(r, f)) for f in MetricRow.CSV_FIELDS))
    (out / "metrics.csv").write_text("\n".join(lines) + "\n")
    _write_json(out / "report.json", {
        "run_config": _run_config(args),
        "reports": {s: rep.to_dict() for s, rep in reports.items()},
    })
    long_rows = ["model,fold,strategy,metric,value"]
    for s, rep in reports.items():
        for rec in rep.per_fold:
            for name, value in rec["fold_metrics"].items():
                long_rows.append(f"{rec['model']},{rec['fold']},{s},{name},{value}")
    (out / "fold_metrics.csv").write_text("\n".join(long_rows) + "\n")
    print(f"wrote metrics.csv, report.json, fold_metrics.csv to {out}")
    for r in all_rows:
        print(f"{r.model:<10}{r.strategy:<6}"
              f"overall_acc={r.overall_acc:.3f} tsl={r.tsl:.2f}")
    return EXIT_OK


def cmd_verify_dataset(args) -> int:
    name = args.dataset
    if name not in REFERENCE_DESCRIPTIVES:
        raise CliError(f"unknown dataset {name!r}; expected one of "
                       f"{sorted(REFERENCE_DESCRIPTIVES)}", EXIT_USAGE)
    if not dataset_present(name, args.data):
        print(f"dataset {name!r} not installed under "
              f"{args.data or 'data/ (or $HOPERGM_DATA)'}; see docs/DATA.md",
              file=sys.stderr)
        return EXIT_DATA
    ok, rows = verify_dataset(name, args.data, index_base=args.index_base)
    print(f"{'statistic':<20}{'expected':>10}{'actual':>10}{'tol':>8}  ok")
    for key, expected, actual, tol, row_ok in rows:
        shown = "n/a" if actual is None else f"{actual:.4f}"
        print(f"{key:<20}{expected:>10}{shown:>10}{tol:>8}  "
              f"{'yes' if row_ok else 'NO'}")
    if not ok:
        print("verification FAILED", file=sys.stderr)
        return EXIT_DATA
    print("verification passed")
    return EXIT_OK


def cmd_partition(args) -> int:
    g = _load_graph_arg(args)
    plan = build_partition(g, args.strategy_one, seed=args.seed, M=args.folds)
    payload = {
        "run_config": _run_config(args),
        "strategy": plan.strategy,
        "M": plan.M,
        "folds": [f.tolist() for f in plan.folds],
    }
    if args.out:
        _write_json(Path(args.out) / "partition.json", payload)
        print(f"wrote {Path(args.out) / 'partition.json'}")
    else:
        print(json.dumps(payload, default=_np_default))
    return EXIT_OK


# -- argument plumbing -------------------------------------------------------

def _add_common(sp, dataset=True):
    if dataset:
        sp.add_argument("dataset",
                        help="dataset name (lazega, teenage) or edgelist path")
        sp.add_argument("--data", default=None,
                        help="dataset directory (default: $HOPERGM_DATA or data/)")
        sp.add_argument("--n", type=int, default=None,
                        help="node count (required for edgelist files)")
        sp.add_argument("--attrs", default=None, help="node attribute CSV")
    sp.add_argument("--index-base", type=int, choices=(0, 1), default=0,
                    dest="index_base")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--config", default=None,
                    help="JSON config file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hopergm",
        description="Held-out predictive evaluation for ERGMs")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    fp = sub.add_parser("fit", help="fit a model to a fully observed network")
    _add_common(fp)
    fp.add_argument("--model", required=True,
                    help="model JSON (inline, a file path, or 'edges')")
    fp.add_argument("--method", choices=("auto", "mple", "mcmle", "exact"),
                    default="auto")
    fp.add_argument("--mc-samples", type=int, default=2500, dest="mc_samples")
    fp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("simulate", help="draw graphs from a fitted model")
    _add_common(sp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--theta", default=None,
                    help="coefficient vector as inline JSON")
    sp.add_argument("--fit", default=None, help="fit.json from a prior run")
    sp.add_argument("--draws", "-B", type=int, default=100)
    sp.add_argument("--free", default=None,
                    help="file of dyads to resample (conditional simulation)")
    sp.set_defaults(func=cmd_simulate)

    hp = sub.add_parser("hope", help="held-out predictive evaluation")
    _add_common(hp)
    hp.add_argument("--model", action="append", required=True,
                    help="model JSON; repeat for several competing models")
    hp.add_argument("--strategy", action="append", choices=STRATEGIES,
                    help="held-out strategy; repeat for several (default lmo)")
    hp.add_argument("--folds", "-M", type=int, default=None,
                    help="fold count for lmo (default n-1)")
    hp.add_argument("--draws", "-B", type=int, default=500)
    hp.add_argument("--workers", type=int, default=1)
    hp.add_argument("--method", choices=("auto", "mple", "mcmle"),
                    default="auto")
    hp.add_argument("--mc-samples", type=int, default=2500, dest="mc_samples")
    hp.set_defaults(func=cmd_hope)

    vp = sub.add_parser("verify-dataset",
                        help="check a dataset against published descriptives")
    vp.add_argument("dataset")
    vp.add_argument("--data", default=None)
    vp.add_argument("--index-base", type=int, choices=(0, 1), default=0,
                    dest="index_base")
    vp.add_argument("--config", default=None)
    vp.set_defaults(func=cmd_verify_dataset)

    pp = sub.add_parser("partition", help="emit a fold plan")
    _add_common(pp)
    pp.add_argument("--strategy", choices=STRATEGIES, default="lmo",
                    dest="strategy_one")
    pp.add_argument("--folds", "-M", type=int, default=None)
    pp.set_defaults(func=cmd_partition)
    return ap


def _apply_config(args: argparse.Namespace, argv) -> None:
    """Fill in defaults from --config JSON; explicit flags keep priority."""
    if not getattr(args, "config", None):
        return
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_USAGE) from exc
    given = {a.lstrip("-").split("=")[0].replace("-", "_")
             for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and attr not in given:
            setattr(args, attr, value)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        _apply_config(args, argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GraphDataError,) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    sys.exit(main())
