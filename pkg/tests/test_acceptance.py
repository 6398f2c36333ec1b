"""Acceptance gate.

One test per criterion, each asserting its stated tolerance and runtime
bound and printing a single pass/fail line (visible with ``pytest -s`` or
on failure). Paper-scale effect magnitudes require a real cluster, so the
checks are property-based against the bundled synthetic ground truth.
"""

from __future__ import annotations

import time
from contextlib import contextmanager

import numpy as np
import pytest

from cotune.cli import main as cli_main
from cotune.configspace import decode, encode, iter_configs, sample_config, validate_cloud
from cotune.cost import cost_of, vcpu_proportional_prices
from cotune.configspace import CloudConfig
from cotune.oracle import OracleSpec, SyntheticOracle
from cotune.pipeline import evaluate, recommend_all
from cotune.rrs import RRSParams, brute_force_min, rrs_minimize
from cotune.surrogate import predict


@contextmanager
def criterion(num: int, title: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {num} FAIL - {title}")
        raise
    print(f"[acceptance] criterion {num} PASS - {title}")


# Reference parameter tables: id -> (dotted name, value menu with the
# default first). The bundled catalog must reproduce these exactly.
HADOOP_TABLE = {
    "H1": ("output.fileoutputformat.compress", ("FALSE", "TRUE")),
    "H2": ("output.fileoutputformat.compress.type", ("RECORD", "BLOCK")),
    "H3": ("output.fileoutputformat.compress.codec", ("Default", "Gzip", "Bzip2", "Lz4")),
    "H4": ("output.compress", ("TRUE", "FALSE")),
    "H5": ("map.output.compress.codec", ("Default", "Gzip", "Bzip2", "Lz4")),
    "H6": ("tasktracker.map.tasks.maximum", ("2", "1", "4")),
    "H7": ("tasktracker.reduce.tasks.maximum", ("2", "1", "4")),
    "H8": ("child.java.opts", ("-Xmx200m", "-Xmx1639m")),
    "H9": ("map.speculative", ("TRUE", "FALSE")),
    "H10": ("reduce.speculative", ("TRUE", "FALSE")),
    "H11": ("task.io.sort.mb", ("100", "1150")),
    "H12": ("task.io.sort.factor", ("10", "100")),
    "H13": ("map.sort.spill.percent", ("0.8", "0.3")),
}
SPARK_TABLE = {
    "S1": ("io.compression.coded", ("Iz4", "Izf", "Snappy")),
    "S2": ("serializer", ("Java Serializer", "Kryo Serializer")),
    "S3": ("io.compression.Iz4.blockSize", ("32k", "16k", "64k")),
    "S4": ("shuffle.spill.compress", ("TRUE", "FALSE")),
    "S5": ("reducer.maxSizeInFlight", ("48m", "24m", "72m")),
    "S6": ("shuffle.file.buffer", ("32k", "16k", "48k")),
    "S7": ("shuffle.compress", ("TRUE", "FALSE")),
    "S8": ("broadcast.blockSize", ("4m", "2m", "8m")),
    "S9": ("locality.wait", ("3s", "1s", "5s")),
    "S10": ("memory.fraction", ("0.6", "0.4", "0.8")),
    "S11": ("memory.storageFraction", ("0.5", "0.3", "0.7")),
}
FLINK_TABLE = {
    "F1": ("memory.managed.fraction", ("0.4", "0.2", "0.3", "0.5", "0.6")),
    "F2": ("memory.jvm-overhead.fraction", ("0.1", "0.05", "0.2")),
    "F3": ("memory.network.fraction", ("0.1", "0.05", "0.2")),
    "F4": ("network.blocking-shuffle.compression.enabled", ("FALSE", "TRUE")),
    "F5": ("network.memory.buffers-per-channel", ("2", "4", "6")),
    "F6": ("network.netty.server.numThreads", ("-1", "1", "2")),
    "F7": ("network.netty.clinet.num-threads", ("-1", "1", "2")),
    "F8": ("execution.checkpointing.snapshot-compression", ("FALSE", "TRUE")),
}


def test_criterion_1_catalog_fidelity(catalog):
    with criterion(1, "catalog fidelity and sweep row counts"):
        t0 = time.perf_counter()
        for name, table in (
            ("Hadoop", HADOOP_TABLE), ("Spark", SPARK_TABLE), ("Flink", FLINK_TABLE)
        ):
            spec = catalog.platform(name)
            assert [p.id for p in spec.parameters] == list(table)
            for param in spec.parameters:
                full_name, domain = table[param.id]
                assert param.name == full_name, param.id
                assert param.domain == domain, param.id
        assert {p.platform: len(p.parameters) for p in catalog.platforms} == {
            "Hadoop": 13, "Spark": 11, "Flink": 8,
        }

        assert len(catalog.clouds) == 11
        for cloud in catalog.clouds:
            assert validate_cloud(cloud, catalog.flavors, catalog.totals) == []
            totals = cloud.totals(catalog.flavors)
            assert (totals.vcpus, totals.disk_gb, totals.ram_gb) == (10, 200.0, 20.0)

        oracle = SyntheticOracle(OracleSpec(), catalog)
        data = oracle.dataset()
        assert len(data) == 1881 == 11 * 20 * 3 + 11 * 20 * 3 + 11 * 17 * 3
        assert time.perf_counter() - t0 < 5.0


def test_criterion_2_encoding_soundness(catalog):
    with criterion(2, "decode(encode(x)) identity over the joint spaces"):
        t0 = time.perf_counter()
        flink = catalog.space("Flink")
        checked = 0
        for config in iter_configs(flink):
            assert decode(encode(config, flink), flink) == config
            checked += 1
        assert checked == 53_460

        rng = np.random.default_rng(2024)
        for name in ("Hadoop", "Spark"):
            space = catalog.space(name)
            for _ in range(10_000):
                config = sample_config(space, rng)
                assert decode(encode(config, space), space) == config
        assert time.perf_counter() - t0 < 30.0


def test_criterion_3_surrogate_quality(trained):
    with criterion(3, "forest validation R2 >= 0.8 and above the linear baseline"):
        _, report, elapsed = trained
        for platform in ("Hadoop", "Spark", "Flink"):
            row = report.for_platform(platform)
            assert row.forest_validation_r2 >= 0.8, platform
            assert row.forest_validation_r2 > row.linear_validation_r2, platform
        assert elapsed < 120.0


def test_criterion_4_prediction_error(trained):
    with criterion(4, "mean relative prediction error <= 20% on validation"):
        _, report, _ = trained
        for platform in ("Hadoop", "Spark", "Flink"):
            assert report.for_platform(platform).forest_mean_relative_error <= 0.20


def test_criterion_5_optimizer_exactness_proxy(trained, catalog):
    with criterion(5, "search lands within 5% of the enumerated optimum"):
        t0 = time.perf_counter()
        models, _, _ = trained
        model = models["Flink"]
        space = catalog.space("Flink")
        workload = "Sort"

        _, exact_value = brute_force_min(
            lambda c: predict(model, space, c, workload), space
        )

        hits = 0
        for seed in range(20):
            best_point, best_value, trace = rrs_minimize(
                lambda pt: predict(model, space, decode(pt, space), workload),
                space.dim,
                RRSParams(eval_budget=2000, seed=seed),
            )
            curve = trace.best_curve
            assert all(b <= a for a, b in zip(curve, curve[1:]))
            if best_value <= exact_value * 1.05:
                hits += 1
        assert hits >= 18, f"{hits}/20 seeds within 5%"
        assert time.perf_counter() - t0 < 300.0


def test_criterion_6_search_benchmark_sanity():
    with criterion(6, "5-D sphere benchmark and explore-round closed form"):
        t0 = time.perf_counter()
        assert RRSParams(confidence=0.99, explore_fraction=0.1).explore_samples == 44

        def sphere(x: np.ndarray) -> float:
            return float(np.sum((x - 0.5) ** 2))

        hits = 0
        for seed in range(20):
            _, best, _ = rrs_minimize(sphere, 5, RRSParams(eval_budget=2000, seed=seed))
            if best <= 1e-3:
                hits += 1
        assert hits >= 19, f"{hits}/20 seeds at 1e-3"
        assert time.perf_counter() - t0 < 30.0


def test_criterion_7_end_to_end_direction_of_effect(trained, oracle, catalog):
    with criterion(7, "tuned beats per-cloud defaults in time and cost"):
        t0 = time.perf_counter()
        models, _, _ = trained
        recs = recommend_all(models, catalog, RRSParams(eval_budget=2000, seed=0))
        assert len(recs) == 9
        report = evaluate(recs, oracle, catalog)

        assert report.mean_time_reduction > 0.0
        assert report.mean_cost_reduction > 0.0
        for platform in ("Hadoop", "Spark", "Flink"):
            assert report.per_platform_time_reduction[platform] > 0.0, platform
            assert report.per_platform_cost_reduction[platform] > 0.0, platform

        clouds_by_platform: dict[str, set[str]] = {}
        for rec in recs:
            clouds_by_platform.setdefault(rec.platform, set()).add(rec.cloud)
        assert any(len(clouds) >= 2 for clouds in clouds_by_platform.values())
        assert time.perf_counter() - t0 < 300.0


def test_criterion_8_determinism(tmp_path):
    with criterion(8, "re-runs with fixed seeds are byte-identical"):
        t0 = time.perf_counter()
        import hashlib

        def digest(path) -> str:
            return hashlib.sha256(open(path, "rb").read()).hexdigest()

        def run(*argv: str) -> None:
            assert cli_main(list(argv)) == 0

        hashes = []
        for tag in ("a", "b"):
            base = tmp_path / tag
            run("gen-data", "--oracle-spec", "default", "--platforms", "Flink",
                "--seed", "0", "--out-dir", str(base / "data"))
            run("train", "--data", str(base / "data" / "dataset.csv"),
                "--seed", "7", "--out-dir", str(base / "models"))
            run("recommend", "--platform", "Flink", "--workload", "Sort",
                "--budget", "1000", "--seed", "1",
                "--models", str(base / "models"), "--out-dir", str(base / "rec"))
            run("evaluate", "--models", str(base / "models"),
                "--oracle-spec", "default", "--budget", "1000", "--seed", "1",
                "--out-dir", str(base / "eval"))
            hashes.append(
                (
                    digest(base / "data" / "dataset.csv"),
                    digest(base / "models" / "model_Flink.json"),
                    digest(base / "models" / "training_report.json"),
                    digest(base / "rec" / "recommendation_Flink_Sort.json"),
                    digest(base / "eval" / "evaluation_report.json"),
                    digest(base / "eval" / "evaluation_rows.csv"),
                )
            )
        assert hashes[0] == hashes[1]
        assert time.perf_counter() - t0 < 60.0


def test_criterion_9_cost_model_arithmetic(catalog):
    with criterion(9, "cost linearity, zero prices, resource-equal parity"):
        t0 = time.perf_counter()
        cloud = CloudConfig("X", {"a": 2, "b": 1})
        prices = {"a": 0.10, "b": 0.30}
        assert cost_of(cloud, 1800.0, prices) == pytest.approx(0.25)
        assert cost_of(cloud, 3600.0, prices) == pytest.approx(2 * cost_of(cloud, 1800.0, prices))
        assert cost_of(cloud, 7200.0, {"a": 0.0, "b": 0.0}) == 0.0

        flat = vcpu_proportional_prices(catalog.flavors)
        costs = {round(cost_of(c, 1234.0, flat), 12) for c in catalog.clouds}
        assert len(costs) == 1
        assert time.perf_counter() - t0 < 1.0
