"""The synthetic ground-truth surface used for desk-scale experiments.

Shows the structure the surface bakes in: per-workload base times, the
~10% heterogeneous-cluster penalty, opposite node-count preferences for
Hadoop and Flink, and the cloud-by-parameter interaction that moves the
best parameter values when the cluster layout changes.

Run:  python demos/02_synthetic_ground_truth.py
"""

import numpy as np

from cotune import OracleSpec, SyntheticOracle, WORKLOADS, default_catalog
from cotune.configspace import iter_configs

catalog = default_catalog()
oracle = SyntheticOracle(OracleSpec(), catalog)

print("=== Mean execution time over the one-factor-at-a-time grid ===")
data = oracle.dataset()
print(f"rows: {len(data)} (660 Hadoop + 660 Spark + 561 Flink)")
for platform in catalog.platform_names:
    means = []
    for workload in WORKLOADS:
        times = [s.exec_time for s in data.samples
                 if s.platform == platform and s.workload == workload]
        means.append(f"{workload} {np.mean(times):6.1f} s")
    print(f"  {platform:7s} " + " | ".join(means))

print("\n=== Cluster-shape effects (default parameters, all workloads) ===")
for platform in ("Hadoop", "Flink"):
    space = catalog.space(platform)
    by_nodes = {}
    het, hom = [], []
    for cloud in catalog.clouds:
        for workload in WORKLOADS:
            t = oracle.time(platform, workload, space.default_config(cloud.id))
            by_nodes.setdefault(cloud.num_nodes, []).append(t)
            (hom if cloud.is_homogeneous else het).append(t)
    trend = " -> ".join(f"{n}n {np.mean(ts):.0f}s" for n, ts in sorted(by_nodes.items()))
    print(f"  {platform:7s} node-count trend: {trend}")
    print(f"  {platform:7s} heterogeneous/homogeneous mean ratio: "
          f"{np.mean(het) / np.mean(hom):.3f}")

print("\n=== Interaction: the best Flink settings depend on the cloud ===")
space = catalog.space("Flink")
best = {}
for config in iter_configs(space):
    t = oracle.time("Flink", "Sort", config)
    if config.cloud not in best or t < best[config.cloud][1]:
        best[config.cloud] = (config.assignment, t)
for cloud_id, (assignment, t) in best.items():
    labels = ";".join(space.assignment_labels(assignment))
    print(f"  {cloud_id:4s} best assignment {labels}  ({t:.1f} s)")
distinct = len({a for a, _ in best.values()})
print(f"  distinct optimal assignments across 11 clouds: {distinct}")
