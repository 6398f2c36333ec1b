"""Execution-time surrogate models.

The primary model is a bagged forest of CART regression trees written here
from scratch; a least-squares linear model serves as the accuracy baseline.
Both map a feature vector derived from (workload, cloud layout, parameter
assignment) to predicted execution time in seconds.

Feature vector layout, in order:

* one-hot workload over the canonical workload list (3 entries),
* cloud-derived features: num_nodes, homogeneous flag (0/1), max node
  vcpus, min node vcpus,
* one ordinal entry per platform parameter (its domain index).

Tree fitting is deterministic: tree t draws its bootstrap resample and all
node-level feature subsets from an RNG spawned from (seed, t), so a forest
is identical whether trees are grown serially or in parallel. Set the
``COTUNE_THREADS`` environment variable to grow trees concurrently.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .configspace import JointConfig, JointSpace
from .dataset import WORKLOADS, Dataset, r2_score

MIN_PREDICTED_SECONDS = 1e-3

_FOREST_FORMAT = "cotune-forest"
_FOREST_VERSION = 1

_CLOUD_FEATURES = ("num_nodes", "homogeneous", "max_vcpus", "min_vcpus")


class SurrogateError(ValueError):
    pass


def feature_names(space: JointSpace) -> tuple[str, ...]:
    names = [f"workload={w}" for w in WORKLOADS]
    names.extend(_CLOUD_FEATURES)
    names.extend(p.id for p in space.platform.parameters)
    return tuple(names)


def featurize(space: JointSpace, workload: str, config: JointConfig) -> np.ndarray:
    """Feature vector for one (workload, joint configuration) pair."""
    space.validate_config(config)
    if workload not in WORKLOADS:
        raise SurrogateError(f"unknown workload {workload!r}, expected one of {WORKLOADS}")
    cloud = space.cloud(config.cloud)
    present = [space.flavors[f] for f, n in cloud.counts.items() if n > 0]
    vec = np.empty(len(WORKLOADS) + len(_CLOUD_FEATURES) + len(config.assignment))
    for i, w in enumerate(WORKLOADS):
        vec[i] = 1.0 if w == workload else 0.0
    base = len(WORKLOADS)
    vec[base + 0] = float(cloud.num_nodes)
    vec[base + 1] = 1.0 if cloud.is_homogeneous else 0.0
    vec[base + 2] = float(max(fl.vcpus for fl in present))
    vec[base + 3] = float(min(fl.vcpus for fl in present))
    vec[base + 4 :] = config.assignment
    return vec


def featurize_dataset(space: JointSpace, data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    data.require_nonempty()
    X = np.vstack([featurize(space, s.workload, s.config) for s in data.samples])
    y = np.array([s.exec_time for s in data.samples])
    return X, y


@dataclass(frozen=True)
class ForestHyper:
    """Forest hyperparameters. ``features_per_split=None`` means ceil(d/3)."""

    n_trees: int = 100
    max_depth: int | None = 12
    min_samples_leaf: int = 2
    features_per_split: int | None = None
    bootstrap: bool = True

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise SurrogateError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 1:
            raise SurrogateError(f"max_depth must be >= 1 or None, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise SurrogateError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise SurrogateError(
                f"features_per_split must be >= 1 or None, got {self.features_per_split}"
            )

    def resolved_features_per_split(self, n_features: int) -> int:
        k = self.features_per_split or math.ceil(n_features / 3)
        return min(k, n_features)


@dataclass
class RegressionTree:
    """One CART tree as flat arrays; node 0 is the root, feature -1 marks a
    leaf whose prediction is ``value``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


def _best_split(
    X: np.ndarray, y: np.ndarray, rows: np.ndarray, feats: np.ndarray, min_leaf: int
) -> tuple[float, int, float] | None:
    """Lowest weighted-SSE split over the candidate features.

    Ties break to the lowest feature index, then the lowest threshold.
    """
    n = rows.size
    yy = y[rows]
    best: tuple[float, int, float] | None = None
    for f in np.sort(feats):
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs_s = xs[order]
        ys_s = yy[order]
        boundary = xs_s[:-1] != xs_s[1:]
        if not boundary.any():
            continue
        n_left = np.arange(1, n)
        n_right = n - n_left
        valid = boundary & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        csum = np.cumsum(ys_s)
        csq = np.cumsum(ys_s * ys_s)
        sse_left = csq[:-1] - csum[:-1] ** 2 / n_left
        sse_right = (csq[-1] - csq[:-1]) - (csum[-1] - csum[:-1]) ** 2 / n_right
        score = np.where(valid, sse_left + sse_right, np.inf)
        pos = int(np.argmin(score))
        if best is None or score[pos] < best[0]:
            thr = (xs_s[pos] + xs_s[pos + 1]) / 2.0
            best = (float(score[pos]), int(f), float(thr))
    return best


def _grow_tree(
    X: np.ndarray, y: np.ndarray, hyper: ForestHyper, rng: np.random.Generator
) -> RegressionTree:
    n, d = X.shape
    k = hyper.resolved_features_per_split(d)
    if hyper.bootstrap:
        sample = rng.integers(0, n, size=n)
        X, y = X[sample], y[sample]

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    # Stack entries: (row indices, depth, parent node, attach side). Right
    # child pushed first so nodes are numbered in preorder.
    stack: list[tuple[np.ndarray, int, int, str]] = [(np.arange(n), 0, -1, "")]
    while stack:
        rows, depth, parent, side = stack.pop()
        node = new_node()
        if parent >= 0:
            (left if side == "L" else right)[parent] = node
        yy = y[rows]
        value[node] = float(yy.mean())
        if (
            rows.size < 2 * hyper.min_samples_leaf
            or (hyper.max_depth is not None and depth >= hyper.max_depth)
            or yy.max() == yy.min()
        ):
            continue
        feats = rng.choice(d, size=k, replace=False)
        split = _best_split(X, y, rows, feats, hyper.min_samples_leaf)
        if split is None:
            continue
        _, f, thr = split
        go_left = X[rows, f] <= thr
        feature[node] = f
        threshold[node] = thr
        stack.append((rows[~go_left], depth + 1, node, "R"))
        stack.append((rows[go_left], depth + 1, node, "L"))

    return RegressionTree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value),
    )


class _PackedForest:
    """All trees of a forest concatenated into flat arrays so a whole batch
    of rows can be pushed through every tree with vectorized index chasing."""

    def __init__(self, trees: Sequence[RegressionTree]):
        offsets = np.cumsum([0] + [t.n_nodes for t in trees[:-1]])
        self.roots = offsets.astype(np.int64)
        self.feature = np.concatenate([t.feature for t in trees]).astype(np.int64)
        shift = np.concatenate(
            [np.full(t.n_nodes, off, dtype=np.int64) for t, off in zip(trees, offsets)]
        )
        child = lambda arr: np.where(arr >= 0, arr + shift, -1)
        self.left = child(np.concatenate([t.left for t in trees]).astype(np.int64))
        self.right = child(np.concatenate([t.right for t in trees]).astype(np.int64))
        self.threshold = np.concatenate([t.threshold for t in trees])
        self.value = np.concatenate([t.value for t in trees])
        self.n_trees = len(trees)

    def tree_values(self, X: np.ndarray) -> np.ndarray:
        """Per-tree predictions, shape (n_rows, n_trees)."""
        n = X.shape[0]
        idx = np.broadcast_to(self.roots, (n, self.n_trees)).copy()
        row = np.arange(n)[:, None]
        while True:
            f = self.feature[idx]
            internal = f >= 0
            if not internal.any():
                break
            xv = X[np.broadcast_to(row, f.shape), np.where(internal, f, 0)]
            nxt = np.where(xv <= self.threshold[idx], self.left[idx], self.right[idx])
            idx = np.where(internal, nxt, idx)
        return self.value[idx]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.sum(self.tree_values(X), axis=1) / self.n_trees


@dataclass
class ForestModel:
    """Trained forest plus the metadata needed to reuse and serialize it."""

    platform: str
    feature_order: tuple[str, ...]
    trees: tuple[RegressionTree, ...]
    hyper: ForestHyper
    seed: int
    train_r2: float | None = None
    validation_r2: float | None = None
    _packed: _PackedForest | None = field(default=None, repr=False, compare=False)

    def packed(self) -> _PackedForest:
        if self._packed is None:
            self._packed = _PackedForest(self.trees)
        return self._packed

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return np.maximum(self.packed().predict(np.asarray(X, dtype=float)), MIN_PREDICTED_SECONDS)


@dataclass
class LinearModel:
    """Least-squares baseline over the same feature vector."""

    platform: str
    feature_order: tuple[str, ...]
    weights: np.ndarray
    intercept: float

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        raw = np.asarray(X, dtype=float) @ self.weights + self.intercept
        return np.maximum(raw, MIN_PREDICTED_SECONDS)


def _check_single_platform(train: Dataset, space: JointSpace) -> None:
    train.require_nonempty()
    platforms = set(s.platform for s in train.samples)
    expected = space.platform.platform
    if platforms != {expected}:
        raise SurrogateError(
            f"training data must contain only platform {expected!r}, got {sorted(platforms)}"
        )


def fit_forest(
    train: Dataset, space: JointSpace, hyper: ForestHyper | None = None, seed: int = 0
) -> ForestModel:
    """Grow a bagged CART forest on the training samples.

    Each tree fits a bootstrap resample (with replacement, original size);
    each split minimizes weighted child SSE over a random feature subset.
    Fully deterministic given ``seed``.
    """
    hyper = hyper or ForestHyper()
    _check_single_platform(train, space)
    X, y = featurize_dataset(space, train)
    tree_seeds = np.random.SeedSequence(seed).spawn(hyper.n_trees)

    def grow(t: int) -> RegressionTree:
        return _grow_tree(X, y, hyper, np.random.default_rng(tree_seeds[t]))

    threads = int(os.environ.get("COTUNE_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = tuple(pool.map(grow, range(hyper.n_trees)))
    else:
        trees = tuple(grow(t) for t in range(hyper.n_trees))

    model = ForestModel(
        platform=space.platform.platform,
        feature_order=feature_names(space),
        trees=trees,
        hyper=hyper,
        seed=seed,
    )
    model.train_r2 = evaluate(model, train, space)
    return model


def fit_linear(train: Dataset, space: JointSpace) -> LinearModel:
    """Least squares via normal equations with a 1e-8 ridge jitter.

    The jitter regularizes exactly collinear designs (the workload one-hots
    always sum to the intercept column). When there are fewer samples than
    features the fit falls back to the minimum-norm solution.
    """
    _check_single_platform(train, space)
    X, y = featurize_dataset(space, train)
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    n, d = Xa.shape
    if n < d:
        coef, *_ = np.linalg.lstsq(Xa, y, rcond=None)
    else:
        gram = Xa.T @ Xa + 1e-8 * np.eye(d)
        try:
            coef = np.linalg.solve(gram, Xa.T @ y)
        except np.linalg.LinAlgError:
            coef, *_ = np.linalg.lstsq(Xa, y, rcond=None)
    return LinearModel(
        platform=space.platform.platform,
        feature_order=feature_names(space),
        weights=coef[:-1],
        intercept=float(coef[-1]),
    )


def predict(
    model: ForestModel | LinearModel, space: JointSpace, config: JointConfig, workload: str
) -> float:
    """Predicted execution time in seconds, floored at 1e-3 s."""
    if model.platform != space.platform.platform:
        raise SurrogateError(
            f"model is for {model.platform!r}, space is for {space.platform.platform!r}"
        )
    x = featurize(space, workload, config)
    return float(model.predict_matrix(x[None, :])[0])


def evaluate(model: ForestModel | LinearModel, data: Dataset, space: JointSpace) -> float:
    """R2 of the model's predictions on a labelled dataset."""
    X, y = featurize_dataset(space, data)
    return r2_score(model.predict_matrix(X), y)


def forest_to_dict(model: ForestModel) -> dict:
    return {
        "format": _FOREST_FORMAT,
        "version": _FOREST_VERSION,
        "platform": model.platform,
        "seed": model.seed,
        "hyper": {
            "n_trees": model.hyper.n_trees,
            "max_depth": model.hyper.max_depth,
            "min_samples_leaf": model.hyper.min_samples_leaf,
            "features_per_split": model.hyper.features_per_split,
            "bootstrap": model.hyper.bootstrap,
        },
        "feature_order": list(model.feature_order),
        "train_r2": model.train_r2,
        "validation_r2": model.validation_r2,
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
            }
            for t in model.trees
        ],
    }


def forest_from_dict(raw: dict) -> ForestModel:
    if raw.get("format") != _FOREST_FORMAT or raw.get("version") != _FOREST_VERSION:
        raise SurrogateError(
            f"not a {_FOREST_FORMAT} v{_FOREST_VERSION} document: "
            f"{raw.get('format')!r} v{raw.get('version')!r}"
        )
    trees = tuple(
        RegressionTree(
            feature=np.array(t["feature"], dtype=np.int32),
            threshold=np.array(t["threshold"], dtype=float),
            left=np.array(t["left"], dtype=np.int32),
            right=np.array(t["right"], dtype=np.int32),
            value=np.array(t["value"], dtype=float),
        )
        for t in raw["trees"]
    )
    return ForestModel(
        platform=raw["platform"],
        feature_order=tuple(raw["feature_order"]),
        trees=trees,
        hyper=ForestHyper(**raw["hyper"]),
        seed=raw["seed"],
        train_r2=raw.get("train_r2"),
        validation_r2=raw.get("validation_r2"),
    )


def save_forest(model: ForestModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(forest_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_forest(path: str) -> ForestModel:
    with open(path, encoding="utf-8") as fh:
        return forest_from_dict(json.load(fh))
