"""The whole loop: generate benchmark data, train surrogates, recommend a
joint configuration per (platform, workload), and score the result against
per-cloud default baselines.

Run:  python demos/05_full_pipeline.py
"""

from cotune import OracleSpec, RRSParams, SyntheticOracle, default_catalog
from cotune.pipeline import evaluate, recommend_all, train_offline

catalog = default_catalog()
oracle = SyntheticOracle(OracleSpec(), catalog)

print("offline phase: sweep -> surrogate models")
data = oracle.dataset()
models, report = train_offline(data, catalog, seed=0)
for row in report.platforms:
    print(f"  {row.platform:7s} forest R2 {row.forest_validation_r2:.3f} "
          f"(linear baseline {row.linear_validation_r2:.3f})")

print("\nonline phase: one recommendation per (platform, workload)")
recommendations = recommend_all(models, catalog, RRSParams(eval_budget=2000, seed=0))
for rec in recommendations:
    labels = ";".join(rec.labels)
    print(f"  {rec.platform:7s} {rec.workload:10s} -> {rec.cloud:4s} {labels:33s} "
          f"predicted {rec.predicted_time_s:7.1f} s  ${rec.predicted_cost:.4f}")

print("\nscoring against the per-cloud default baselines (ground truth)")
result = evaluate(recommendations, oracle, catalog)
print(f"  mean execution-time reduction: {result.mean_time_reduction:7.1%}")
print(f"  mean cost reduction:           {result.mean_cost_reduction:7.1%}")
for platform, value in result.per_platform_time_reduction.items():
    print(f"    {platform:7s} time {value:6.1%}   "
          f"cost {result.per_platform_cost_reduction[platform]:6.1%}")
print(f"  mean |predicted - true| / true: {result.mean_relative_prediction_error:.1%}")

clouds = {}
for rec in recommendations:
    clouds.setdefault(rec.platform, []).append(rec.cloud)
print("\nrecommended clouds per platform (workload order Sort, WordCount, KMeans):")
for platform, ids in clouds.items():
    note = "varies by workload" if len(set(ids)) > 1 else "same for all workloads"
    print(f"  {platform:7s} {ids} - {note}")
