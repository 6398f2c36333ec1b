from __future__ import annotations

import time

import pytest

from cotune.configspace import (
    Catalog,
    CloudConfig,
    JointSpace,
    NodeFlavor,
    ParameterSpec,
    PlatformSpec,
    default_catalog,
)
from cotune.oracle import OracleSpec, SyntheticOracle
from cotune.pipeline import train_offline


@pytest.fixture(scope="session")
def catalog() -> Catalog:
    return default_catalog()


@pytest.fixture(scope="session")
def oracle(catalog) -> SyntheticOracle:
    return SyntheticOracle(OracleSpec(), catalog)


@pytest.fixture(scope="session")
def ofat_data(oracle):
    return oracle.dataset()


@pytest.fixture(scope="session")
def trained(ofat_data, catalog):
    """Full offline phase on the default synthetic dataset, with its wall
    time so the acceptance suite can assert the runtime bound."""
    t0 = time.perf_counter()
    models, report = train_offline(ofat_data, catalog, seed=0)
    elapsed = time.perf_counter() - t0
    return models, report, elapsed


@pytest.fixture(scope="session")
def flink_models(oracle, catalog):
    data = oracle.dataset(platforms=["Flink"])
    models, report = train_offline(data, catalog, seed=0)
    return models, report


def make_tiny_space(
    domains: tuple[int, ...] = (5,),
    n_clouds: int = 2,
    platform: str = "TestPlat",
) -> JointSpace:
    """Small hand-built space for synthetic model tests: ``domains`` gives
    each parameter's menu size."""
    flavors = {
        "small": NodeFlavor("small", 2, 20.0, 4.0, 0.04),
        "big": NodeFlavor("big", 4, 40.0, 8.0, 0.08),
    }
    layouts = [{"small": 2}, {"small": 1, "big": 1}, {"big": 2}, {"small": 3}]
    clouds = tuple(
        CloudConfig(f"C{i}", layouts[i % len(layouts)]) for i in range(n_clouds)
    )
    params = tuple(
        ParameterSpec(f"P{i + 1}", f"test.param{i + 1}", tuple(f"v{j}" for j in range(k)))
        for i, k in enumerate(domains)
    )
    return JointSpace(PlatformSpec(platform, params), clouds, flavors)
