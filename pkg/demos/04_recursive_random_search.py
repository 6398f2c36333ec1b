"""The recursive random search minimizer, on its own and against the
exhaustive enumerator.

First a continuous benchmark (5-D sphere), then the real use: minimizing a
trained surrogate over the Flink joint space, where full enumeration is
still affordable and serves as the exactness oracle.

Run:  python demos/04_recursive_random_search.py
"""

import numpy as np

from cotune import OracleSpec, RRSParams, SyntheticOracle, default_catalog
from cotune.configspace import decode
from cotune.pipeline import train_offline
from cotune.rrs import brute_force_min, rrs_minimize
from cotune.surrogate import predict

params = RRSParams(eval_budget=2000, seed=0)
print(f"explore round size n = {params.explore_samples} "
      f"(confidence {params.confidence}, top fraction {params.explore_fraction})")

print("\n=== 5-D sphere, minimum 0 at the cube center ===")
sphere = lambda x: float(np.sum((x - 0.5) ** 2))
best_point, best_value, trace = rrs_minimize(sphere, 5, params)
print(f"best value {best_value:.2e} after {len(trace)} evaluations")
phases = {p: trace.phases.count(p) for p in ("explore", "exploit-realign", "exploit-shrink")}
print(f"phase mix: {phases}")
trace.to_csv("/tmp/sphere_trace.csv")
print("convergence trace written to /tmp/sphere_trace.csv "
      "(eval_index, phase, objective, best_so_far)")

print("\n=== Flink joint space under a trained surrogate ===")
catalog = default_catalog()
oracle = SyntheticOracle(OracleSpec(), catalog)
models, _ = train_offline(oracle.dataset(platforms=["Flink"]), catalog, seed=0)
model = models["Flink"]
space = catalog.space("Flink")

exact_config, exact_value = brute_force_min(
    lambda c: predict(model, space, c, "Sort"), space
)
print(f"enumerated optimum over {53460:,} configs: {exact_value:.2f} s at {exact_config.cloud}")

hits = 0
for seed in range(10):
    _, found, _ = rrs_minimize(
        lambda pt: predict(model, space, decode(pt, space), "Sort"),
        space.dim,
        RRSParams(eval_budget=2000, seed=seed),
    )
    gap = found / exact_value - 1.0
    hits += gap <= 0.05
    print(f"  seed {seed}: best {found:6.2f} s  (+{gap:.2%} vs exact)")
print(f"within 5% of the exact optimum in {hits}/10 seeds at 3.7% of the space evaluated")
