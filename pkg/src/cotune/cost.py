"""Dollar cost of running a workload on a cloud configuration.

Cost is prorated per second against hourly node prices; there is no
rounding up to whole billing hours. The bundled default price table is
synthetic and intentionally simple: every flavor costs $0.02 per vCPU-hour,
which preserves cost ordering by resource size and makes all resource-equal
cluster layouts cost the same per hour. Any price table can be supplied as
JSON mapping flavor name to hourly price.
"""

from __future__ import annotations

import json
from typing import Mapping

from .configspace import CloudConfig, NodeFlavor


class PriceError(ValueError):
    pass


def validate_prices(prices: Mapping[str, float], flavors: Mapping[str, NodeFlavor]) -> None:
    """Every catalog flavor priced, no negative prices."""
    missing = sorted(set(flavors) - set(prices))
    if missing:
        raise PriceError(f"flavors without a price: {', '.join(missing)}")
    negative = sorted(name for name, p in prices.items() if p < 0)
    if negative:
        raise PriceError(f"negative price for: {', '.join(negative)}")


def cost_of(cloud: CloudConfig, exec_time_s: float, prices: Mapping[str, float]) -> float:
    """(exec_time / 3600) * sum over flavors of count * hourly price."""
    if not exec_time_s > 0:
        raise PriceError(f"exec_time_s must be > 0, got {exec_time_s}")
    hourly = 0.0
    for flavor, count in cloud.counts.items():
        if flavor not in prices:
            raise PriceError(f"no price for flavor {flavor!r}")
        hourly += count * prices[flavor]
    return exec_time_s / 3600.0 * hourly


def load_prices(path: str) -> dict[str, float]:
    """Read a {flavor: hourly price} JSON file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise PriceError(f"{path}: expected a JSON object of flavor -> price")
    return {str(k): float(v) for k, v in raw.items()}


def vcpu_proportional_prices(
    flavors: Mapping[str, NodeFlavor], rate_per_vcpu_hour: float = 0.02
) -> dict[str, float]:
    return {name: fl.vcpus * rate_per_vcpu_hour for name, fl in flavors.items()}
