"""End-to-end orchestration.

Offline phase: fit one forest per platform present in the training data and
score it (plus the linear baseline) on a held-out validation split. Online
phase: given (platform, workload), search the joint space for the
configuration with the lowest predicted execution time and report it with
its dollar cost. Evaluation compares each recommendation against the
per-cloud default-parameter baselines under a ground-truth source (the
synthetic oracle, or a measured dataset that covers the required rows).
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .configspace import Catalog, JointConfig, JointSpace, decode
from .cost import cost_of, validate_prices
from .dataset import WORKLOADS, Dataset, split
from .oracle import SyntheticOracle
from .rrs import RRSParams, SearchTrace, brute_force_min, rrs_minimize
from .surrogate import (
    ForestHyper,
    ForestModel,
    evaluate as model_r2,
    featurize_dataset,
    fit_forest,
    fit_linear,
    forest_to_dict,
    predict,
)

MIN_PLATFORM_SAMPLES = 10


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class PlatformReport:
    platform: str
    n_samples: int
    n_train: int
    n_validation: int
    forest_train_r2: float
    forest_validation_r2: float
    linear_validation_r2: float
    forest_mean_relative_error: float


@dataclass(frozen=True)
class TrainingReport:
    platforms: tuple[PlatformReport, ...]
    absent_platforms: tuple[str, ...]
    seed: int
    train_fraction: float

    def for_platform(self, platform: str) -> PlatformReport:
        for row in self.platforms:
            if row.platform == platform:
                return row
        raise KeyError(platform)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "absent_platforms": list(self.absent_platforms),
            "platforms": {
                r.platform: {
                    "n_samples": r.n_samples,
                    "n_train": r.n_train,
                    "n_validation": r.n_validation,
                    "forest_train_r2": r.forest_train_r2,
                    "forest_validation_r2": r.forest_validation_r2,
                    "linear_validation_r2": r.linear_validation_r2,
                    "forest_mean_relative_error": r.forest_mean_relative_error,
                }
                for r in self.platforms
            },
        }


def model_fingerprint(model: ForestModel) -> str:
    blob = json.dumps(forest_to_dict(model), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def train_offline(
    data: Dataset,
    catalog: Catalog,
    hyper: ForestHyper | None = None,
    seed: int = 0,
    train_fraction: float = 0.7,
    min_platform_samples: int = MIN_PLATFORM_SAMPLES,
) -> tuple[dict[str, ForestModel], TrainingReport]:
    """Fit one forest per platform present in ``data``.

    Each platform's samples are split train/validation; the report carries
    forest and linear-baseline validation scores and flags catalog platforms
    with no data at all. A platform with fewer than ``min_platform_samples``
    rows is an error rather than a silently bad model.
    """
    data.require_nonempty()
    present = [p for p in catalog.platform_names if p in data.platforms]
    absent = tuple(p for p in catalog.platform_names if p not in data.platforms)
    if not present:
        raise PipelineError(
            f"no catalog platform in dataset (found {sorted(data.platforms)})"
        )

    models: dict[str, ForestModel] = {}
    reports = []
    for platform in present:
        subset = data.for_platform(platform)
        if len(subset) < min_platform_samples:
            raise PipelineError(
                f"{platform}: {len(subset)} samples, need at least {min_platform_samples}"
            )
        space = catalog.space(platform)
        train, validation = split(subset, train_fraction, seed)
        forest = fit_forest(train, space, hyper, seed)
        forest.validation_r2 = model_r2(forest, validation, space)
        linear = fit_linear(train, space)
        X_val, y_val = featurize_dataset(space, validation)
        rel_err = float(np.mean(np.abs(forest.predict_matrix(X_val) - y_val) / y_val))
        models[platform] = forest
        reports.append(
            PlatformReport(
                platform=platform,
                n_samples=len(subset),
                n_train=len(train),
                n_validation=len(validation),
                forest_train_r2=float(forest.train_r2),
                forest_validation_r2=float(forest.validation_r2),
                linear_validation_r2=float(model_r2(linear, validation, space)),
                forest_mean_relative_error=rel_err,
            )
        )
    report = TrainingReport(
        platforms=tuple(reports),
        absent_platforms=absent,
        seed=seed,
        train_fraction=train_fraction,
    )
    return models, report


@dataclass
class Recommendation:
    """Tuned joint configuration for one (platform, workload) request."""

    platform: str
    workload: str
    cloud: str
    assignment: tuple[int, ...]
    labels: tuple[str, ...]
    predicted_time_s: float
    predicted_cost: float
    model_version: str
    evaluations: int
    trace: SearchTrace | None = field(default=None, repr=False)

    @property
    def config(self) -> JointConfig:
        return JointConfig(self.cloud, self.assignment)

    def to_dict(self, catalog: Catalog) -> dict:
        space = catalog.space(self.platform)
        params = [
            {"id": p.id, "name": p.name, "label": lab, "value": p.domain[idx]}
            for p, idx, lab in zip(
                space.platform.parameters, self.assignment, self.labels
            )
        ]
        return {
            "platform": self.platform,
            "workload": self.workload,
            "cloud": self.cloud,
            "parameters": params,
            "predicted_time_s": self.predicted_time_s,
            "predicted_cost": self.predicted_cost,
            "model_version": self.model_version,
            "evaluations": self.evaluations,
        }


def _make_recommendation(
    model: ForestModel,
    space: JointSpace,
    workload: str,
    config: JointConfig,
    prices: Mapping[str, float],
    trace: SearchTrace | None,
) -> Recommendation:
    predicted = predict(model, space, config, workload)
    cloud = space.cloud(config.cloud)
    return Recommendation(
        platform=model.platform,
        workload=workload,
        cloud=config.cloud,
        assignment=config.assignment,
        labels=space.assignment_labels(config.assignment),
        predicted_time_s=predicted,
        predicted_cost=cost_of(cloud, predicted, prices),
        model_version=model_fingerprint(model),
        evaluations=len(trace) if trace is not None else 0,
        trace=trace,
    )


def recommend(
    platform: str,
    workload: str,
    models: Mapping[str, ForestModel],
    catalog: Catalog,
    rrs_params: RRSParams | None = None,
    prices: Mapping[str, float] | None = None,
) -> Recommendation:
    """Search the joint space for the lowest predicted execution time.

    The reported predicted time is exactly ``predict`` on the returned
    configuration: the search objective and the report share one code path.
    """
    if platform not in models:
        raise PipelineError(f"no trained model for platform {platform!r}")
    params = rrs_params or RRSParams()
    model = models[platform]
    space = catalog.space(platform)
    prices = prices if prices is not None else catalog.prices()
    validate_prices(prices, catalog.flavors)
    if params.eval_budget < params.explore_samples:
        raise PipelineError(
            f"eval_budget {params.eval_budget} is below one explore round "
            f"({params.explore_samples} samples)"
        )

    def objective(point: np.ndarray) -> float:
        return predict(model, space, decode(point, space), workload)

    best_point, _, trace = rrs_minimize(objective, space.dim, params)
    config = decode(best_point, space)
    return _make_recommendation(model, space, workload, config, prices, trace)


def exact_optimum(
    platform: str,
    workload: str,
    models: Mapping[str, ForestModel],
    catalog: Catalog,
    prices: Mapping[str, float] | None = None,
) -> Recommendation:
    """Enumerate the whole joint space for the exact predicted optimum."""
    if platform not in models:
        raise PipelineError(f"no trained model for platform {platform!r}")
    model = models[platform]
    space = catalog.space(platform)
    prices = prices if prices is not None else catalog.prices()
    validate_prices(prices, catalog.flavors)
    config, _ = brute_force_min(
        lambda c: predict(model, space, c, workload), space
    )
    return _make_recommendation(model, space, workload, config, prices, None)


class DatasetTruth:
    """Ground truth backed by measured rows; raises when a needed
    (platform, workload, configuration) was never measured."""

    def __init__(self, data: Dataset):
        self._times = {
            (s.platform, s.workload, s.cloud, s.assignment): s.exec_time
            for s in data.samples
        }

    def time(self, platform: str, workload: str, config: JointConfig) -> float:
        key = (platform, workload, config.cloud, config.assignment)
        if key not in self._times:
            raise PipelineError(
                f"truth source has no measurement for {platform}/{workload} "
                f"{config.cloud} {config.assignment}"
            )
        return self._times[key]


@dataclass(frozen=True)
class EvaluationRow:
    platform: str
    workload: str
    baseline_cloud: str
    default_time_s: float
    default_cost: float
    tuned_time_s: float
    tuned_cost: float
    time_reduction: float
    cost_reduction: float


@dataclass(frozen=True)
class PredictionCheck:
    platform: str
    workload: str
    predicted_time_s: float
    actual_time_s: float
    relative_error: float


@dataclass(frozen=True)
class EvaluationReport:
    """Default-vs-tuned comparison across all per-cloud baselines.

    Reductions are (default - tuned) / default, so positive means the tuned
    configuration is better.
    """

    rows: tuple[EvaluationRow, ...]
    checks: tuple[PredictionCheck, ...]
    mean_time_reduction: float
    mean_cost_reduction: float
    per_platform_time_reduction: Mapping[str, float]
    per_platform_cost_reduction: Mapping[str, float]
    mean_relative_prediction_error: float

    def to_dict(self) -> dict:
        return {
            "mean_time_reduction": self.mean_time_reduction,
            "mean_cost_reduction": self.mean_cost_reduction,
            "per_platform_time_reduction": dict(self.per_platform_time_reduction),
            "per_platform_cost_reduction": dict(self.per_platform_cost_reduction),
            "mean_relative_prediction_error": self.mean_relative_prediction_error,
            "prediction_checks": [
                {
                    "platform": c.platform,
                    "workload": c.workload,
                    "predicted_time_s": c.predicted_time_s,
                    "actual_time_s": c.actual_time_s,
                    "relative_error": c.relative_error,
                }
                for c in self.checks
            ],
            "rows": [
                {
                    "platform": r.platform,
                    "workload": r.workload,
                    "baseline_cloud": r.baseline_cloud,
                    "default_time_s": r.default_time_s,
                    "default_cost": r.default_cost,
                    "tuned_time_s": r.tuned_time_s,
                    "tuned_cost": r.tuned_cost,
                    "time_reduction": r.time_reduction,
                    "cost_reduction": r.cost_reduction,
                }
                for r in self.rows
            ],
        }

    def to_csv(self, path: str) -> None:
        header = [
            "platform", "workload", "baseline_cloud", "default_time_s",
            "default_cost", "tuned_time_s", "tuned_cost",
            "time_reduction", "cost_reduction",
        ]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in self.rows:
                writer.writerow([
                    r.platform, r.workload, r.baseline_cloud,
                    repr(r.default_time_s), repr(r.default_cost),
                    repr(r.tuned_time_s), repr(r.tuned_cost),
                    repr(r.time_reduction), repr(r.cost_reduction),
                ])


def evaluate(
    recommendations: Sequence[Recommendation],
    truth: SyntheticOracle | DatasetTruth | Dataset,
    catalog: Catalog,
    prices: Mapping[str, float] | None = None,
) -> EvaluationReport:
    """Score recommendations against ground truth.

    For each recommendation and each of the catalog's cloud configs, the
    baseline is that cloud with every parameter at its default; the tuned
    side is the recommendation's true time and cost.
    """
    if not recommendations:
        raise PipelineError("no recommendations to evaluate")
    if isinstance(truth, Dataset):
        truth = DatasetTruth(truth)
    prices = prices if prices is not None else catalog.prices()
    validate_prices(prices, catalog.flavors)

    rows = []
    checks = []
    for rec in recommendations:
        space = catalog.space(rec.platform)
        tuned_time = truth.time(rec.platform, rec.workload, rec.config)
        tuned_cost = cost_of(space.cloud(rec.cloud), tuned_time, prices)
        checks.append(
            PredictionCheck(
                platform=rec.platform,
                workload=rec.workload,
                predicted_time_s=rec.predicted_time_s,
                actual_time_s=tuned_time,
                relative_error=abs(tuned_time - rec.predicted_time_s) / tuned_time,
            )
        )
        for cloud in space.clouds:
            default_time = truth.time(
                rec.platform, rec.workload, space.default_config(cloud.id)
            )
            default_cost = cost_of(cloud, default_time, prices)
            rows.append(
                EvaluationRow(
                    platform=rec.platform,
                    workload=rec.workload,
                    baseline_cloud=cloud.id,
                    default_time_s=default_time,
                    default_cost=default_cost,
                    tuned_time_s=tuned_time,
                    tuned_cost=tuned_cost,
                    time_reduction=(default_time - tuned_time) / default_time,
                    cost_reduction=(default_cost - tuned_cost) / default_cost,
                )
            )

    platforms = sorted(set(r.platform for r in rows))
    mean_over = lambda rs, attr: float(np.mean([getattr(r, attr) for r in rs]))
    return EvaluationReport(
        rows=tuple(rows),
        checks=tuple(checks),
        mean_time_reduction=mean_over(rows, "time_reduction"),
        mean_cost_reduction=mean_over(rows, "cost_reduction"),
        per_platform_time_reduction={
            p: mean_over([r for r in rows if r.platform == p], "time_reduction")
            for p in platforms
        },
        per_platform_cost_reduction={
            p: mean_over([r for r in rows if r.platform == p], "cost_reduction")
            for p in platforms
        },
        mean_relative_prediction_error=float(
            np.mean([c.relative_error for c in checks])
        ),
    )


def recommend_all(
    models: Mapping[str, ForestModel],
    catalog: Catalog,
    rrs_params: RRSParams | None = None,
    prices: Mapping[str, float] | None = None,
    workloads: Sequence[str] = WORKLOADS,
) -> list[Recommendation]:
    """One recommendation per (trained platform, workload), with per-pair
    seeds derived from the base seed so runs stay reproducible."""
    params = rrs_params or RRSParams()
    recs = []
    for i, platform in enumerate(p for p in catalog.platform_names if p in models):
        for j, workload in enumerate(workloads):
            pair_params = replace(params, seed=params.seed + 1000 * i + j)
            recs.append(
                recommend(platform, workload, models, catalog, pair_params, prices)
            )
    return recs
