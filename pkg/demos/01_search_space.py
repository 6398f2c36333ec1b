"""The joint search space: platform parameter menus, cloud layouts, and the
unit-hypercube encoding the optimizer searches over.

Run:  python demos/01_search_space.py
"""

import numpy as np

from cotune import decode, default_catalog, encode, space_size, validate_cloud
from cotune.configspace import sample_config

catalog = default_catalog()

print("=== Platform parameter menus ===")
for platform in catalog.platforms:
    print(f"\n{platform.platform}: {len(platform.parameters)} tunable parameters "
          f"({platform.ofat_grid_size} one-factor-at-a-time rows per cloud/workload)")
    for param in platform.parameters[:4]:
        print(f"  {param.id:4s} {param.name:46s} {list(param.domain)}")
    if len(platform.parameters) > 4:
        print(f"  ... and {len(platform.parameters) - 4} more")

print("\n=== Cloud layouts (all resource-equal: 10 vCPUs / 200 GB / 20 GB) ===")
for cloud in catalog.clouds:
    totals = cloud.totals(catalog.flavors)
    kind = "homogeneous" if cloud.is_homogeneous else "heterogeneous"
    parts = " + ".join(f"{n}x {f}" for f, n in cloud.counts.items())
    ok = "ok" if not validate_cloud(cloud, catalog.flavors, catalog.totals) else "VIOLATION"
    print(f"  {cloud.id:4s} {parts:40s} {cloud.num_nodes} nodes, {kind:13s} "
          f"[{totals.vcpus} vCPU, {totals.disk_gb:.0f} GB disk, {totals.ram_gb:.0f} GB RAM] {ok}")

print("\n=== Joint space sizes (cloud choice x parameter product) ===")
for name in catalog.platform_names:
    print(f"  {name:7s} {space_size(catalog.space(name)):>10,} configurations")

print("\n=== Unit-hypercube encoding ===")
space = catalog.space("Flink")
rng = np.random.default_rng(0)
config = sample_config(space, rng)
point = encode(config, space)
print(f"  config : cloud {config.cloud}, assignment {config.assignment}")
print(f"  encoded: {[round(c, 4) for c in point.coords]}")
print(f"  decoded: {decode(point, space)}")
print(f"  round-trips exactly: {decode(point, space) == config}")
