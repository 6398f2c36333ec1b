"""Command-line entry point.

Subcommands: ``gen-data``, ``train``, ``recommend``, ``brute-force``,
``evaluate``. Every run writes its artifacts into ``--out-dir`` together
with a manifest recording the flags, seeds, and catalog hash, so any
reported number can be regenerated. All randomness is seeded through
explicit flags with documented defaults; exit codes are 0 on success, 1 on
data or runtime errors, 2 on usage errors. ``COTUNE_THREADS`` caps the
number of threads used for tree fitting.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Sequence

from . import __version__
from .configspace import (
    Catalog,
    CatalogError,
    default_catalog,
    default_catalog_path,
    load_catalog,
)
from .cost import PriceError, load_prices, validate_prices
from .dataset import WORKLOADS, DatasetError, load_csv, save_csv
from .oracle import (
    MODE_OFAT,
    MODE_RANDOM,
    OracleError,
    OracleSpec,
    SyntheticOracle,
    load_oracle_spec,
)
from .pipeline import (
    PipelineError,
    evaluate,
    exact_optimum,
    recommend,
    recommend_all,
    train_offline,
)
from .rrs import RRSParams, SearchError
from .surrogate import ForestHyper, SurrogateError, load_forest, save_forest

_RUNTIME_ERRORS = (
    CatalogError,
    DatasetError,
    SurrogateError,
    SearchError,
    PriceError,
    OracleError,
    PipelineError,
    OSError,
    json.JSONDecodeError,
)


def _write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_catalog(value: str) -> tuple[Catalog, str]:
    path = default_catalog_path() if value == "default" else value
    catalog = default_catalog() if value == "default" else load_catalog(path)
    return catalog, _sha256_file(path)


def _resolve_oracle_spec(value: str) -> OracleSpec:
    return OracleSpec() if value == "default" else load_oracle_spec(value)


def _resolve_platforms(value: str, catalog: Catalog) -> tuple[str, ...]:
    if value == "all":
        return catalog.platform_names
    names = tuple(p.strip() for p in value.split(",") if p.strip())
    for name in names:
        try:
            catalog.platform(name)
        except KeyError:
            raise CatalogError(
                f"unknown platform {name!r}, catalog has {', '.join(catalog.platform_names)}"
            ) from None
    return names


def _out_dir(args: argparse.Namespace) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _write_manifest(args: argparse.Namespace, out_dir: str, catalog_hash: str) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    _write_json(
        {"tool": "cotune", "version": __version__, "flags": flags,
         "catalog_sha256": catalog_hash},
        os.path.join(out_dir, "manifest.json"),
    )


def _load_models(models_dir: str) -> dict:
    models = {}
    for name in sorted(os.listdir(models_dir)):
        if name.startswith("model_") and name.endswith(".json"):
            model = load_forest(os.path.join(models_dir, name))
            models[model.platform] = model
    if not models:
        raise PipelineError(f"no model_*.json files in {models_dir!r}")
    return models


def _rrs_params(args: argparse.Namespace) -> RRSParams:
    return RRSParams(eval_budget=args.budget, seed=args.seed)


def _prices(args: argparse.Namespace, catalog: Catalog) -> dict[str, float]:
    prices = load_prices(args.prices) if args.prices else catalog.prices()
    validate_prices(prices, catalog.flavors)
    return prices


def cmd_gen_data(args: argparse.Namespace) -> int:
    catalog, cat_hash = _resolve_catalog(args.catalog)
    spec = _resolve_oracle_spec(args.oracle_spec)
    platforms = _resolve_platforms(args.platforms, catalog)
    oracle = SyntheticOracle(spec, catalog)
    data = oracle.dataset(mode=args.mode, platforms=platforms, k=args.k, seed=args.seed)
    out = _out_dir(args)
    csv_path = os.path.join(out, "dataset.csv")
    save_csv(data, csv_path)
    _write_json(
        {
            "mode": args.mode,
            "platforms": list(platforms),
            "rows": len(data),
            "seed": args.seed,
            "oracle_spec": spec.to_dict(),
            "catalog_sha256": cat_hash,
        },
        os.path.join(out, "provenance.json"),
    )
    _write_manifest(args, out, cat_hash)
    print(f"wrote {len(data)} rows to {csv_path}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    catalog, cat_hash = _resolve_catalog(args.catalog)
    data = load_csv(args.data, catalog)
    hyper = ForestHyper(
        n_trees=args.trees,
        max_depth=args.max_depth,
        min_samples_leaf=args.min_samples_leaf,
        features_per_split=args.features_per_split,
    )
    models, report = train_offline(
        data, catalog, hyper=hyper, seed=args.seed, train_fraction=args.train_fraction
    )
    out = _out_dir(args)
    for platform, model in models.items():
        save_forest(model, os.path.join(out, f"model_{platform}.json"))
    _write_json(report.to_dict(), os.path.join(out, "training_report.json"))
    _write_manifest(args, out, cat_hash)
    for row in report.platforms:
        print(
            f"{row.platform}: forest R2 {row.forest_validation_r2:.4f}, "
            f"linear R2 {row.linear_validation_r2:.4f} "
            f"({row.n_train} train / {row.n_validation} validation)"
        )
    for platform in report.absent_platforms:
        print(f"{platform}: no data, model not trained")
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    catalog, cat_hash = _resolve_catalog(args.catalog)
    models = _load_models(args.models)
    rec = recommend(
        args.platform, args.workload, models, catalog,
        rrs_params=_rrs_params(args), prices=_prices(args, catalog),
    )
    out = _out_dir(args)
    stem = f"{args.platform}_{args.workload}"
    _write_json(rec.to_dict(catalog), os.path.join(out, f"recommendation_{stem}.json"))
    rec.trace.to_csv(os.path.join(out, f"trace_{stem}.csv"))
    _write_manifest(args, out, cat_hash)
    print(
        f"{args.platform}/{args.workload}: cloud {rec.cloud}, "
        f"predicted {rec.predicted_time_s:.1f} s, cost ${rec.predicted_cost:.4f}"
    )
    return 0


def cmd_brute_force(args: argparse.Namespace) -> int:
    catalog, cat_hash = _resolve_catalog(args.catalog)
    models = _load_models(args.models)
    workloads = [args.workload] if args.workload else list(WORKLOADS)
    prices = _prices(args, catalog)
    entries = []
    for workload in workloads:
        rec = exact_optimum(args.platform, workload, models, catalog, prices)
        entries.append(rec.to_dict(catalog))
        print(
            f"{args.platform}/{workload}: exact optimum cloud {rec.cloud}, "
            f"predicted {rec.predicted_time_s:.1f} s"
        )
    out = _out_dir(args)
    _write_json(
        {"platform": args.platform, "optima": entries},
        os.path.join(out, f"exact_optimum_{args.platform}.json"),
    )
    _write_manifest(args, out, cat_hash)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    catalog, cat_hash = _resolve_catalog(args.catalog)
    models = _load_models(args.models)
    prices = _prices(args, catalog)
    recs = recommend_all(models, catalog, rrs_params=_rrs_params(args), prices=prices)
    if args.truth_data:
        truth = load_csv(args.truth_data, catalog)
    else:
        truth = SyntheticOracle(_resolve_oracle_spec(args.oracle_spec), catalog)
    report = evaluate(recs, truth, catalog, prices)
    out = _out_dir(args)
    for rec in recs:
        stem = f"{rec.platform}_{rec.workload}"
        _write_json(rec.to_dict(catalog), os.path.join(out, f"recommendation_{stem}.json"))
    _write_json(report.to_dict(), os.path.join(out, "evaluation_report.json"))
    report.to_csv(os.path.join(out, "evaluation_rows.csv"))
    _write_manifest(args, out, cat_hash)
    print(
        f"mean time reduction {report.mean_time_reduction:.1%}, "
        f"mean cost reduction {report.mean_cost_reduction:.1%}, "
        f"mean prediction error {report.mean_relative_prediction_error:.1%}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotune",
        description="Joint cloud and data-platform configuration tuning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--catalog", default="default",
                       help="catalog JSON path, or 'default' for the bundled one")
        p.add_argument("--out-dir", required=True, help="directory for run artifacts")

    p = sub.add_parser("gen-data", help="generate a synthetic benchmark dataset")
    p.add_argument("--oracle-spec", required=True,
                   help="oracle spec JSON path, or 'default'")
    p.add_argument("--mode", choices=[MODE_OFAT, MODE_RANDOM], default=MODE_OFAT)
    p.add_argument("--platforms", "--platform", dest="platforms", default="all",
                   help="comma-separated platform names, or 'all'")
    p.add_argument("--k", type=int, default=100,
                   help=f"sample count for --mode {MODE_RANDOM}")
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="fit per-platform performance models")
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--min-samples-leaf", type=int, default=2)
    p.add_argument("--features-per-split", type=int, default=None)
    p.add_argument("--train-fraction", type=float, default=0.7)
    add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recommend", help="recommend a joint configuration")
    p.add_argument("--platform", required=True)
    p.add_argument("--workload", required=True, choices=list(WORKLOADS))
    p.add_argument("--models", required=True, help="directory with model_*.json files")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prices", default=None, help="price table JSON (flavor -> $/h)")
    add_common(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("brute-force", help="exact predicted optimum by enumeration")
    p.add_argument("--platform", required=True)
    p.add_argument("--workload", default=None, choices=list(WORKLOADS))
    p.add_argument("--models", required=True)
    p.add_argument("--prices", default=None)
    add_common(p)
    p.set_defaults(func=cmd_brute_force)

    p = sub.add_parser("evaluate", help="default-vs-tuned evaluation report")
    p.add_argument("--models", required=True)
    p.add_argument("--oracle-spec", default=None,
                   help="oracle spec JSON path or 'default' (ground truth)")
    p.add_argument("--truth-data", default=None,
                   help="measured dataset CSV used as ground truth instead")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prices", default=None)
    add_common(p)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "evaluate" and not (args.oracle_spec or args.truth_data):
        parser.error("evaluate needs --oracle-spec or --truth-data")
    try:
        return args.func(args)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
