"""Recursive random search over the unit hypercube, plus an exhaustive
enumerator that serves as an exactness oracle on small joint spaces.

The minimizer alternates two regimes:

* **Explore** - uniform samples over the whole cube. A running threshold
  tracks the ``explore_fraction`` quantile of every explore-phase value seen
  so far; once the first round of ``explore_samples`` draws is complete, any
  explore sample that beats the threshold starts an exploit descent there.
* **Exploit** - an axis-aligned box (initial side ``explore_fraction **
  (1/dim)``, so it covers that fraction of the cube's volume) is centered on
  the incumbent and sampled uniformly, clipped to the cube. A sample that
  improves the incumbent immediately re-centers the box ("move"); a full
  round of ``samples_per_round`` failures shrinks every side by ``shrink``.
  The descent ends when the side drops below ``min_box_side``, and
  exploration resumes until the evaluation budget is spent.

The number of first-round explore samples follows the confidence bound
n = ceil(ln(1 - confidence) / ln(1 - explore_fraction)): with probability
``confidence`` at least one of n uniform draws lands in the best
``explore_fraction`` fraction of the space.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .configspace import JointConfig, JointSpace, iter_configs, space_size

BRUTE_FORCE_CAP = 10**6


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class RRSParams:
    """Search controls.

    ``exploit_fraction`` is accepted for compatibility with the classical
    parameterization of the algorithm but the geometric ``shrink`` rule used
    here does not consult it. ``samples_per_round=None`` means "use the
    explore round size n". ``min_box_side`` is a fraction of the unit
    interval; exploitation stops once the box side falls below it.
    """

    confidence: float = 0.99
    explore_fraction: float = 0.1
    exploit_fraction: float = 0.01
    shrink: float = 0.5
    samples_per_round: int | None = None
    min_box_side: float = 1e-4
    eval_budget: int = 2000
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.confidence < 1:
            raise SearchError(f"confidence must be in (0, 1), got {self.confidence}")
        if not 0 < self.exploit_fraction <= self.explore_fraction < 1:
            raise SearchError(
                "need 0 < exploit_fraction <= explore_fraction < 1, got "
                f"{self.exploit_fraction} and {self.explore_fraction}"
            )
        if not 0 < self.shrink < 1:
            raise SearchError(f"shrink must be in (0, 1), got {self.shrink}")
        if self.samples_per_round is not None and self.samples_per_round < 1:
            raise SearchError("samples_per_round must be >= 1 or None")
        if not 0 < self.min_box_side < 1:
            raise SearchError(f"min_box_side must be in (0, 1), got {self.min_box_side}")
        if self.eval_budget < 1:
            raise SearchError(f"eval_budget must be >= 1, got {self.eval_budget}")

    @property
    def explore_samples(self) -> int:
        return math.ceil(math.log(1 - self.confidence) / math.log(1 - self.explore_fraction))


PHASE_EXPLORE = "explore"
PHASE_REALIGN = "exploit-realign"
PHASE_SHRINK = "exploit-shrink"


@dataclass
class SearchTrace:
    """Every objective evaluation in order, with its phase tag and the
    best-so-far curve. ``completed_first_round`` is False when the budget ran
    out before the first explore round finished (the result is then the best
    of a partial sample)."""

    points: list[np.ndarray] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    phases: list[str] = field(default_factory=list)
    best_curve: list[float] = field(default_factory=list)
    completed_first_round: bool = False

    def __len__(self) -> int:
        return len(self.values)

    def record(self, point: np.ndarray, value: float, phase: str) -> None:
        self.points.append(point.copy())
        self.values.append(value)
        self.phases.append(phase)
        prev = self.best_curve[-1] if self.best_curve else math.inf
        self.best_curve.append(min(prev, value))

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["eval_index", "phase", "objective", "best_so_far"])
            for i, (phase, val, best) in enumerate(
                zip(self.phases, self.values, self.best_curve)
            ):
                writer.writerow([i, phase, repr(val), repr(best)])


class _RunningQuantile:
    """Exact quantile of a growing sample, kept sorted for O(log n) insert."""

    def __init__(self, fraction: float):
        self.fraction = fraction
        self._sorted: list[float] = []

    def add(self, value: float) -> None:
        bisect.insort(self._sorted, value)

    def __len__(self) -> int:
        return len(self._sorted)

    def value(self) -> float:
        vals = self._sorted
        pos = self.fraction * (len(vals) - 1)
        lo = int(math.floor(pos))
        hi = min(lo + 1, len(vals) - 1)
        return vals[lo] + (vals[hi] - vals[lo]) * (pos - lo)


def rrs_minimize(
    objective: Callable[[np.ndarray], float],
    dim: int,
    params: RRSParams | None = None,
) -> tuple[np.ndarray, float, SearchTrace]:
    """Minimize ``objective`` over [0, 1)^dim within ``params.eval_budget``
    evaluations. Returns (best point, best value, trace)."""
    params = params or RRSParams()
    if dim < 1:
        raise SearchError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(params.seed)
    n = params.explore_samples
    per_round = params.samples_per_round or n
    trace = SearchTrace()
    threshold = _RunningQuantile(params.explore_fraction)

    best_x = np.full(dim, 0.5)
    best_y = math.inf

    def spent() -> bool:
        return len(trace) >= params.eval_budget

    def evaluate(x: np.ndarray, phase: str) -> float:
        nonlocal best_x, best_y
        y = float(objective(x))
        trace.record(x, y, phase)
        if y < best_y:
            best_x, best_y = x.copy(), y
        return y

    def exploit(center: np.ndarray, incumbent: float) -> None:
        side = params.explore_fraction ** (1.0 / dim)
        cx, cy = center.copy(), incumbent
        tag = PHASE_REALIGN
        while not spent() and side >= params.min_box_side:
            improved = False
            for _ in range(per_round):
                if spent():
                    return
                lo = np.maximum(cx - side / 2.0, 0.0)
                hi = np.minimum(cx + side / 2.0, 1.0)
                x = lo + rng.random(dim) * (hi - lo)
                y = evaluate(x, tag)
                if y < cy:
                    cx, cy = x.copy(), y
                    improved = True
                    break
            if improved:
                tag = PHASE_REALIGN
            else:
                side *= params.shrink
                tag = PHASE_SHRINK

    while not spent():
        x = rng.random(dim)
        y = evaluate(x, PHASE_EXPLORE)
        threshold.add(y)
        if len(threshold) >= n and y < threshold.value() and not spent():
            exploit(x, y)

    if len(threshold) >= n:
        trace.completed_first_round = True
    return best_x, best_y, trace


def brute_force_min(
    objective: Callable[[JointConfig], float],
    space: JointSpace,
    cap: int = BRUTE_FORCE_CAP,
) -> tuple[JointConfig, float]:
    """Exact minimum of ``objective`` over every joint configuration.

    Ties break deterministically to the lowest cloud index, then the
    lexicographically smallest assignment (the enumeration order). Refuses
    spaces larger than ``cap`` configurations.
    """
    total = space_size(space)
    if total > cap:
        raise SearchError(
            f"space has {total} configurations, above the enumeration cap {cap}"
        )
    best_config: JointConfig | None = None
    best_value = math.inf
    for config in iter_configs(space):
        value = float(objective(config))
        if value < best_value:
            best_config, best_value = config, value
    assert best_config is not None
    return best_config, best_value
