"""Benchmark-run records: CSV ingestion, train/validation split, R2 score.

CSV schema (UTF-8, header required)::

    platform,workload,cloud,assignment,exec_time_s

``assignment`` is the semicolon-joined letter labels of the parameter values
in the platform's canonical parameter order (e.g. ``A;B;A`` means parameter 1
at its default, parameter 2 at its first modified value, ...).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .configspace import Catalog, JointConfig, value_label

WORKLOADS = ("Sort", "WordCount", "KMeans")

CSV_HEADER = ("platform", "workload", "cloud", "assignment", "exec_time_s")


class DatasetError(ValueError):
    """Bad dataset content; carries the 1-based CSV line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TrainingSample:
    """One benchmark run: configuration plus measured execution time."""

    platform: str
    workload: str
    cloud: str
    assignment: tuple[int, ...]
    exec_time: float

    def __post_init__(self) -> None:
        if not self.exec_time > 0:
            raise DatasetError(f"exec_time must be > 0, got {self.exec_time}")

    @property
    def config(self) -> JointConfig:
        return JointConfig(self.cloud, self.assignment)


@dataclass(frozen=True)
class Dataset:
    samples: tuple[TrainingSample, ...]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def platforms(self) -> tuple[str, ...]:
        seen: list[str] = []
        for s in self.samples:
            if s.platform not in seen:
                seen.append(s.platform)
        return tuple(seen)

    def for_platform(self, platform: str) -> "Dataset":
        return Dataset(
            tuple(s for s in self.samples if s.platform == platform),
            provenance=self.provenance,
        )

    def require_nonempty(self) -> None:
        if not self.samples:
            raise DatasetError("dataset is empty")


def load_csv(path: str, catalog: Catalog) -> Dataset:
    """Read a dataset CSV, validating every row against the catalog.

    Errors report the offending 1-based line number.
    """
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file, expected a header row") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise DatasetError(
                f"bad header {header!r}, expected {','.join(CSV_HEADER)}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise DatasetError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", lineno)
            platform, workload, cloud, labels, time_text = (f.strip() for f in row)
            try:
                spec = catalog.platform(platform)
            except KeyError:
                raise DatasetError(f"unknown platform {platform!r}", lineno) from None
            space = catalog.space(spec.platform)
            try:
                space.cloud_index(cloud)
                assignment = space.assignment_from_labels(labels.split(";"))
            except (KeyError, ValueError) as exc:
                raise DatasetError(str(exc), lineno) from None
            try:
                exec_time = float(time_text)
            except ValueError:
                raise DatasetError(f"exec_time_s is not a number: {time_text!r}", lineno) from None
            try:
                samples.append(
                    TrainingSample(platform, workload, cloud, assignment, exec_time)
                )
            except DatasetError as exc:
                raise DatasetError(str(exc), lineno) from None
    return Dataset(tuple(samples), provenance=path)


def save_csv(data: Dataset, path: str) -> None:
    """Write a dataset in the documented CSV schema (deterministic bytes)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s in data.samples:
            labels = ";".join(value_label(i) for i in s.assignment)
            writer.writerow([s.platform, s.workload, s.cloud, labels, repr(s.exec_time)])


def split(data: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic uniform split into (train, validation).

    Train size is train_fraction * n rounded half-up. The two parts are a
    disjoint, exhaustive partition and preserve the original sample order.
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    data.require_nonempty()
    n = len(data)
    n_train = int(math.floor(train_fraction * n + 0.5))
    if n_train < 1 or n - n_train < 1:
        raise DatasetError(
            f"cannot split {n} samples at fraction {train_fraction}: "
            "both parts need at least one sample"
        )
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    valid_idx = np.sort(perm[n_train:])
    pick = lambda idx: Dataset(
        tuple(data.samples[i] for i in idx), provenance=data.provenance
    )
    return pick(train_idx), pick(valid_idx)


def r2_score(predicted: Sequence[float] | Iterable[float], actual: Sequence[float]) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot.

    When the actual values are constant (SS_tot = 0) the score is 1.0 for a
    perfect fit and -inf otherwise, so that a degenerate target never
    reports a spuriously good score.
    """
    pred = np.asarray(list(predicted), dtype=float)
    act = np.asarray(list(actual), dtype=float)
    if pred.shape != act.shape or pred.ndim != 1 or pred.size == 0:
        raise ValueError(
            f"predicted and actual must be equal-length nonempty vectors, "
            f"got shapes {pred.shape} and {act.shape}"
        )
    ss_res = float(np.sum((act - pred) ** 2))
    ss_tot = float(np.sum((act - act.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else float("-inf")
    return 1.0 - ss_res / ss_tot
