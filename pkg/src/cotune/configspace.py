"""Joint search space of cloud layouts and platform parameters.

The space has two halves: a small catalog of cloud configurations (multisets
of node flavors whose total vCPU/disk/RAM match a fixed budget) and, per data
platform, an ordered list of tunable parameters with finite value menus.
Parameter values are opaque strings; position 0 in each menu is the default
and positions are labelled "A", "B", "C", ... for serialization.

The optimizer works on the continuous unit hypercube, so this module also
provides the bijective bin-center encoding between discrete joint
configurations and points in [0, 1)^d (one coordinate for the cloud choice
plus one per parameter).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Mapping, Sequence

import numpy as np

PLATFORM_NAMES = ("Hadoop", "Spark", "Flink")

_LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class CatalogError(ValueError):
    """Malformed catalog file or a constraint violation inside it."""


def value_label(index: int) -> str:
    """Letter label for a domain position (0 -> "A", 1 -> "B", ...)."""
    if not 0 <= index < len(_LABELS):
        raise ValueError(f"no letter label for domain index {index}")
    return _LABELS[index]


def label_index(label: str) -> int:
    """Inverse of :func:`value_label`."""
    pos = _LABELS.find(label.strip().upper())
    if pos < 0:
        raise ValueError(f"not a value label: {label!r}")
    return pos


@dataclass(frozen=True)
class ParameterSpec:
    """One tunable platform parameter with its ordered value menu."""

    id: str
    name: str
    domain: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.domain:
            raise CatalogError(f"parameter {self.id}: empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise CatalogError(f"parameter {self.id}: duplicate domain values")

    @property
    def default(self) -> str:
        return self.domain[0]

    @property
    def size(self) -> int:
        return len(self.domain)


@dataclass(frozen=True)
class PlatformSpec:
    """A data platform and its ordered tunable parameters."""

    platform: str
    parameters: tuple[ParameterSpec, ...]

    def __post_init__(self) -> None:
        ids = [p.id for p in self.parameters]
        if len(set(ids)) != len(ids):
            raise CatalogError(f"{self.platform}: duplicate parameter ids")

    @property
    def ofat_grid_size(self) -> int:
        """Rows per (cloud, workload) cell in a one-factor-at-a-time sweep:
        the default row plus one row per modified parameter value."""
        return 1 + sum(p.size - 1 for p in self.parameters)

    def parameter(self, param_id: str) -> ParameterSpec:
        for p in self.parameters:
            if p.id == param_id:
                return p
        raise KeyError(param_id)


@dataclass(frozen=True)
class NodeFlavor:
    """A virtual-machine flavor with its resources and hourly price."""

    name: str
    vcpus: int
    disk_gb: float
    ram_gb: float
    hourly_price: float

    def __post_init__(self) -> None:
        if self.vcpus < 1:
            raise CatalogError(f"flavor {self.name}: vcpus must be >= 1")
        if self.disk_gb <= 0 or self.ram_gb <= 0:
            raise CatalogError(f"flavor {self.name}: disk and ram must be > 0")
        if self.hourly_price < 0:
            raise CatalogError(f"flavor {self.name}: negative hourly price")


@dataclass(frozen=True)
class ResourceTotals:
    vcpus: int
    disk_gb: float
    ram_gb: float


@dataclass(frozen=True)
class CloudConfig:
    """A cluster layout: node count per flavor name."""

    id: str
    counts: Mapping[str, int]

    def __post_init__(self) -> None:
        if not any(c > 0 for c in self.counts.values()):
            raise CatalogError(f"cloud {self.id}: at least one node required")
        if any(c < 0 for c in self.counts.values()):
            raise CatalogError(f"cloud {self.id}: negative node count")

    @property
    def num_nodes(self) -> int:
        return sum(self.counts.values())

    @property
    def is_homogeneous(self) -> bool:
        return sum(1 for c in self.counts.values() if c > 0) == 1

    def totals(self, flavors: Mapping[str, NodeFlavor]) -> ResourceTotals:
        for name in self.counts:
            if name not in flavors:
                raise CatalogError(f"cloud {self.id}: unknown flavor {name!r}")
        return ResourceTotals(
            vcpus=sum(n * flavors[f].vcpus for f, n in self.counts.items()),
            disk_gb=sum(n * flavors[f].disk_gb for f, n in self.counts.items()),
            ram_gb=sum(n * flavors[f].ram_gb for f, n in self.counts.items()),
        )


@dataclass(frozen=True)
class JointConfig:
    """A cloud choice plus one domain index per platform parameter."""

    cloud: str
    assignment: tuple[int, ...]


@dataclass(frozen=True)
class UnitPoint:
    """A point in the unit hypercube; coordinate 0 is the cloud dimension."""

    coords: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class JointSpace:
    """Everything needed to enumerate, validate, and encode joint configs
    for one platform."""

    platform: PlatformSpec
    clouds: tuple[CloudConfig, ...]
    flavors: Mapping[str, NodeFlavor]

    @property
    def dim(self) -> int:
        return 1 + len(self.platform.parameters)

    @property
    def cloud_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.clouds)

    def cloud_index(self, cloud_id: str) -> int:
        try:
            return self.cloud_ids.index(cloud_id)
        except ValueError:
            raise KeyError(f"unknown cloud config {cloud_id!r}") from None

    def cloud(self, cloud_id: str) -> CloudConfig:
        return self.clouds[self.cloud_index(cloud_id)]

    def validate_config(self, config: JointConfig) -> None:
        self.cloud_index(config.cloud)
        params = self.platform.parameters
        if len(config.assignment) != len(params):
            raise ValueError(
                f"assignment has {len(config.assignment)} entries, "
                f"{self.platform.platform} defines {len(params)} parameters"
            )
        for param, idx in zip(params, config.assignment):
            if not 0 <= idx < param.size:
                raise ValueError(
                    f"parameter {param.id}: index {idx} outside domain of size {param.size}"
                )

    def default_config(self, cloud_id: str) -> JointConfig:
        self.cloud_index(cloud_id)
        return JointConfig(cloud_id, (0,) * len(self.platform.parameters))

    def assignment_labels(self, assignment: Sequence[int]) -> tuple[str, ...]:
        return tuple(value_label(i) for i in assignment)

    def assignment_values(self, assignment: Sequence[int]) -> tuple[str, ...]:
        return tuple(
            p.domain[i] for p, i in zip(self.platform.parameters, assignment)
        )

    def assignment_from_labels(self, labels: Sequence[str]) -> tuple[int, ...]:
        params = self.platform.parameters
        if len(labels) != len(params):
            raise ValueError(
                f"expected {len(params)} labels for {self.platform.platform}, "
                f"got {len(labels)}"
            )
        assignment = []
        for param, lab in zip(params, labels):
            idx = label_index(lab)
            if idx >= param.size:
                raise ValueError(
                    f"parameter {param.id}: label {lab!r} outside domain of size {param.size}"
                )
            assignment.append(idx)
        return tuple(assignment)


@dataclass(frozen=True)
class Catalog:
    """Parsed catalog: platforms, flavors, cloud layouts, and the resource
    budget every cloud layout must meet."""

    platforms: tuple[PlatformSpec, ...]
    flavors: Mapping[str, NodeFlavor]
    clouds: tuple[CloudConfig, ...]
    totals: ResourceTotals

    def platform(self, name: str) -> PlatformSpec:
        for p in self.platforms:
            if p.platform == name:
                return p
        raise KeyError(f"unknown platform {name!r}")

    @property
    def platform_names(self) -> tuple[str, ...]:
        return tuple(p.platform for p in self.platforms)

    def space(self, platform: str) -> JointSpace:
        return JointSpace(self.platform(platform), self.clouds, self.flavors)

    def prices(self) -> dict[str, float]:
        return {name: fl.hourly_price for name, fl in self.flavors.items()}


def validate_cloud(
    config: CloudConfig,
    flavors: Mapping[str, NodeFlavor],
    totals: ResourceTotals,
) -> list[str]:
    """Check a cloud layout against the resource budget.

    Returns a list of violation messages; an empty list means the layout is
    valid. Referencing a flavor missing from the table raises CatalogError.
    """
    actual = config.totals(flavors)
    violations = []
    for attr, unit in (("vcpus", "vCPUs"), ("disk_gb", "GB disk"), ("ram_gb", "GB RAM")):
        have = getattr(actual, attr)
        want = getattr(totals, attr)
        if have != want:
            violations.append(f"cloud {config.id}: {have} {unit} != required {want}")
    return violations


def _parse_catalog(raw: dict) -> Catalog:
    try:
        platforms = tuple(
            PlatformSpec(
                platform=p["name"],
                parameters=tuple(
                    ParameterSpec(q["id"], q["name"], tuple(q["domain"]))
                    for q in p["parameters"]
                ),
            )
            for p in raw["platforms"]
        )
        flavors = {
            f["name"]: NodeFlavor(
                f["name"], int(f["vcpus"]), float(f["disk_gb"]),
                float(f["ram_gb"]), float(f["hourly_price"]),
            )
            for f in raw["flavors"]
        }
        clouds = tuple(
            CloudConfig(c["id"], {k: int(v) for k, v in c["counts"].items()})
            for c in raw["clouds"]
        )
        t = raw["totals"]
        totals = ResourceTotals(int(t["vcpus"]), float(t["disk_gb"]), float(t["ram_gb"]))
    except (KeyError, TypeError) as exc:
        raise CatalogError(f"catalog field missing or malformed: {exc}") from exc

    violations = []
    for cloud in clouds:
        violations.extend(validate_cloud(cloud, flavors, totals))
    if violations:
        raise CatalogError("; ".join(violations))
    return Catalog(platforms, flavors, clouds, totals)


def load_catalog(path: str) -> Catalog:
    """Load and validate a catalog JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{path}: not valid JSON ({exc})") from exc
    return _parse_catalog(raw)


def default_catalog() -> Catalog:
    """The catalog bundled with the package."""
    text = resources.files("cotune.data").joinpath("default_catalog.json").read_text()
    return _parse_catalog(json.loads(text))


def default_catalog_path() -> str:
    return str(resources.files("cotune.data").joinpath("default_catalog.json"))


def encode(config: JointConfig, space: JointSpace) -> UnitPoint:
    """Map a joint configuration to bin centers in the unit hypercube.

    Coordinate 0 is (k + 0.5) / K for cloud index k among the K catalog
    clouds; coordinate i >= 1 is the bin center of parameter i's domain
    index. Injective, and every output lies strictly inside [0, 1)^d.
    """
    space.validate_config(config)
    coords = [(space.cloud_index(config.cloud) + 0.5) / len(space.clouds)]
    for param, idx in zip(space.platform.parameters, config.assignment):
        coords.append((idx + 0.5) / param.size)
    return UnitPoint(tuple(coords))


def decode(point: UnitPoint | Sequence[float], space: JointSpace) -> JointConfig:
    """Map any point of the unit hypercube back to a joint configuration.

    Each coordinate maps to floor(coord * K) clamped into [0, K-1], so the
    function is total: every point decodes, including boundary values that
    floating-point sampling may produce.
    """
    coords = point.coords if isinstance(point, UnitPoint) else tuple(point)
    if len(coords) != space.dim:
        raise ValueError(f"point has {len(coords)} coords, space needs {space.dim}")

    def bin_of(coord: float, k: int) -> int:
        return min(max(int(math.floor(coord * k)), 0), k - 1)

    cloud = space.clouds[bin_of(coords[0], len(space.clouds))].id
    assignment = tuple(
        bin_of(c, p.size) for c, p in zip(coords[1:], space.platform.parameters)
    )
    return JointConfig(cloud, assignment)


def space_size(space: JointSpace) -> int:
    """Number of joint configurations: K_cloud * prod(|domain_i|)."""
    return len(space.clouds) * math.prod(p.size for p in space.platform.parameters)


def iter_configs(space: JointSpace) -> Iterator[JointConfig]:
    """All joint configurations in canonical order: cloud index ascending,
    then assignment in lexicographic order."""
    ranges = [range(p.size) for p in space.platform.parameters]
    for cloud in space.clouds:
        for assignment in itertools.product(*ranges):
            yield JointConfig(cloud.id, assignment)


def sample_config(space: JointSpace, rng: np.random.Generator) -> JointConfig:
    """One uniform draw from the joint space."""
    cloud = space.clouds[int(rng.integers(len(space.clouds)))].id
    assignment = tuple(
        int(rng.integers(p.size)) for p in space.platform.parameters
    )
    return JointConfig(cloud, assignment)
