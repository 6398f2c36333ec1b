from __future__ import annotations

import hashlib
import json
import os

import pytest

from cotune.cli import main
from cotune.oracle import OracleSpec, save_oracle_spec


def _run(*argv: str) -> int:
    return main(list(argv))


def _file_hash(path) -> str:
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


@pytest.fixture(scope="module")
def flink_run(tmp_path_factory):
    """gen-data + train for Flink only; shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli_flink")
    data_dir = root / "data"
    models_dir = root / "models"
    assert _run(
        "gen-data", "--oracle-spec", "default", "--platforms", "Flink",
        "--out-dir", str(data_dir),
    ) == 0
    assert _run(
        "train", "--data", str(data_dir / "dataset.csv"),
        "--seed", "7", "--out-dir", str(models_dir),
    ) == 0
    return root, data_dir, models_dir


def test_gen_data_ofat_all_platforms(tmp_path):
    out = tmp_path / "run"
    assert _run(
        "gen-data", "--oracle-spec", "default", "--mode", "ofat",
        "--platforms", "all", "--out-dir", str(out),
    ) == 0
    lines = (out / "dataset.csv").read_text().splitlines()
    assert len(lines) == 1 + 1881
    provenance = json.loads((out / "provenance.json").read_text())
    assert provenance["rows"] == 1881
    assert (out / "manifest.json").exists()


def test_gen_data_random_k(tmp_path):
    out = tmp_path / "run"
    assert _run(
        "gen-data", "--oracle-spec", "default", "--mode", "random-k",
        "--k", "100", "--platform", "Flink", "--out-dir", str(out),
    ) == 0
    lines = (out / "dataset.csv").read_text().splitlines()
    assert len(lines) == 1 + 100


def test_missing_oracle_spec_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as err:
        _run("gen-data", "--mode", "ofat", "--out-dir", str(tmp_path / "x"))
    assert err.value.code == 2


def test_unknown_platform_is_runtime_error(tmp_path, capsys):
    code = _run(
        "gen-data", "--oracle-spec", "default", "--platforms", "Storm",
        "--out-dir", str(tmp_path / "x"),
    )
    assert code == 1
    assert "Storm" in capsys.readouterr().err


def test_train_outputs_and_determinism(flink_run, tmp_path):
    _, data_dir, models_dir = flink_run
    model_path = models_dir / "model_Flink.json"
    assert model_path.exists()
    report = json.loads((models_dir / "training_report.json").read_text())
    assert "Flink" in report["platforms"]
    assert report["platforms"]["Flink"]["forest_validation_r2"] > 0.8
    assert set(report["absent_platforms"]) == {"Hadoop", "Spark"}

    again = tmp_path / "models2"
    assert _run(
        "train", "--data", str(data_dir / "dataset.csv"),
        "--seed", "7", "--out-dir", str(again),
    ) == 0
    assert _file_hash(model_path) == _file_hash(again / "model_Flink.json")


def test_corrupt_csv_exits_1_with_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text(
        "platform,workload,cloud,assignment,exec_time_s\n"
        "Flink,Sort,C0,A;A;A;A;A;A;A;A,12\n"
        "Flink,Sort,C0,A;A;A;A;A;A;A;A,banana\n"
    )
    code = _run("train", "--data", str(bad), "--out-dir", str(tmp_path / "m"))
    assert code == 1
    assert "line 3" in capsys.readouterr().err


def test_recommend_output_shape(flink_run, tmp_path):
    _, _, models_dir = flink_run
    out = tmp_path / "rec"
    assert _run(
        "recommend", "--platform", "Flink", "--workload", "Sort",
        "--budget", "2000", "--seed", "0",
        "--models", str(models_dir), "--out-dir", str(out),
    ) == 0
    doc = json.loads((out / "recommendation_Flink_Sort.json").read_text())
    assert len(doc["parameters"]) == 8
    assert doc["cloud"].startswith("C")
    assert doc["predicted_time_s"] > 0
    assert doc["predicted_cost"] > 0
    trace = (out / "trace_Flink_Sort.csv").read_text().splitlines()
    assert trace[0] == "eval_index,phase,objective,best_so_far"
    assert len(trace) == 1 + 2000


def test_recommend_deterministic(flink_run, tmp_path):
    _, _, models_dir = flink_run
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert _run(
            "recommend", "--platform", "Flink", "--workload", "KMeans",
            "--budget", "500", "--seed", "3",
            "--models", str(models_dir), "--out-dir", str(out),
        ) == 0
        outs.append(out)
    assert _file_hash(outs[0] / "recommendation_Flink_KMeans.json") == _file_hash(
        outs[1] / "recommendation_Flink_KMeans.json"
    )
    assert _file_hash(outs[0] / "trace_Flink_KMeans.csv") == _file_hash(
        outs[1] / "trace_Flink_KMeans.csv"
    )


def test_brute_force_and_recommend_agree(flink_run, tmp_path):
    _, _, models_dir = flink_run
    bf_out = tmp_path / "bf"
    assert _run(
        "brute-force", "--platform", "Flink", "--workload", "Sort",
        "--models", str(models_dir), "--out-dir", str(bf_out),
    ) == 0
    exact = json.loads((bf_out / "exact_optimum_Flink.json").read_text())
    exact_time = exact["optima"][0]["predicted_time_s"]

    rec_out = tmp_path / "rec"
    assert _run(
        "recommend", "--platform", "Flink", "--workload", "Sort",
        "--budget", "2000", "--seed", "0",
        "--models", str(models_dir), "--out-dir", str(rec_out),
    ) == 0
    rec = json.loads((rec_out / "recommendation_Flink_Sort.json").read_text())
    assert rec["predicted_time_s"] <= exact_time * 1.05


def test_evaluate_noise_free_nonnegative_reduction(tmp_path):
    spec_path = tmp_path / "noise_free.json"
    save_oracle_spec(OracleSpec(noise_std=0.0), str(spec_path))
    data_dir = tmp_path / "data"
    models_dir = tmp_path / "models"
    eval_dir = tmp_path / "eval"
    assert _run(
        "gen-data", "--oracle-spec", str(spec_path), "--platforms", "Flink",
        "--out-dir", str(data_dir),
    ) == 0
    assert _run(
        "train", "--data", str(data_dir / "dataset.csv"), "--out-dir", str(models_dir),
    ) == 0
    assert _run(
        "evaluate", "--models", str(models_dir), "--oracle-spec", str(spec_path),
        "--budget", "2000", "--out-dir", str(eval_dir),
    ) == 0
    report = json.loads((eval_dir / "evaluation_report.json").read_text())
    assert report["mean_time_reduction"] >= 0.0
    assert os.path.exists(eval_dir / "evaluation_rows.csv")


def test_evaluate_requires_truth_source(flink_run, tmp_path):
    _, _, models_dir = flink_run
    with pytest.raises(SystemExit) as err:
        _run("evaluate", "--models", str(models_dir), "--out-dir", str(tmp_path / "e"))
    assert err.value.code == 2


def test_models_dir_without_models(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code = _run(
        "recommend", "--platform", "Flink", "--workload", "Sort",
        "--models", str(empty), "--out-dir", str(tmp_path / "out"),
    )
    assert code == 1
    assert "model_" in capsys.readouterr().err
