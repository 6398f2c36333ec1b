from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotune.dataset import (
    CSV_HEADER,
    Dataset,
    DatasetError,
    TrainingSample,
    load_csv,
    r2_score,
    save_csv,
    split,
)

HEADER_LINE = ",".join(CSV_HEADER)


def _write(tmp_path, *rows: str):
    path = tmp_path / "data.csv"
    path.write_text("\n".join([HEADER_LINE, *rows]) + "\n")
    return str(path)


def test_load_csv_example_row(tmp_path, catalog):
    path = _write(tmp_path, "Hadoop,Sort,C0,A;B;C;A;B;C;B;B;B;B;B;B;B,70")
    data = load_csv(path, catalog)
    assert len(data) == 1
    sample = data.samples[0]
    assert sample.exec_time == 70.0
    assert sample.platform == "Hadoop"
    assert sample.cloud == "C0"
    assert sample.assignment == (0, 1, 2, 0, 1, 2, 1, 1, 1, 1, 1, 1, 1)


def test_load_csv_negative_time_reports_line(tmp_path, catalog):
    path = _write(
        tmp_path,
        "Hadoop,Sort,C0,A;A;A;A;A;A;A;A;A;A;A;A;A,70",
        "Hadoop,Sort,C0,A;A;A;A;A;A;A;A;A;A;A;A;A,-5",
    )
    with pytest.raises(DatasetError, match="line 3"):
        load_csv(path, catalog)


def test_load_csv_unknown_platform(tmp_path, catalog):
    path = _write(tmp_path, "Storm,Sort,C0,A,70")
    with pytest.raises(DatasetError, match="line 2.*Storm"):
        load_csv(path, catalog)


def test_load_csv_unknown_cloud(tmp_path, catalog):
    path = _write(tmp_path, "Flink,Sort,C42,A;A;A;A;A;A;A;A,70")
    with pytest.raises(DatasetError, match="line 2.*C42"):
        load_csv(path, catalog)


def test_load_csv_label_outside_domain(tmp_path, catalog):
    path = _write(tmp_path, "Flink,Sort,C0,F;A;A;A;A;A;A;A,70")
    with pytest.raises(DatasetError, match="line 2.*F1"):
        load_csv(path, catalog)


def test_load_csv_requires_header(tmp_path, catalog):
    path = tmp_path / "data.csv"
    path.write_text("Hadoop,Sort,C0,A;A;A;A;A;A;A;A;A;A;A;A;A,70\n")
    with pytest.raises(DatasetError, match="header"):
        load_csv(str(path), catalog)


def test_flink_ofat_csv_round_trip(tmp_path, oracle, catalog):
    data = oracle.dataset(platforms=["Flink"])
    assert len(data) == 11 * 17 * 3 == 561
    path = tmp_path / "flink.csv"
    save_csv(data, str(path))
    reloaded = load_csv(str(path), catalog)
    assert len(reloaded) == 561
    assert reloaded.samples == data.samples


def test_split_paper_scale_counts(ofat_data):
    assert len(ofat_data) == 1881
    train, validation = split(ofat_data, 0.7, seed=0)
    assert len(train) == 1317
    assert len(validation) == 564


def test_split_same_seed_identical(ofat_data):
    a = split(ofat_data, 0.7, seed=123)
    b = split(ofat_data, 0.7, seed=123)
    assert a[0].samples == b[0].samples
    assert a[1].samples == b[1].samples


def test_split_even(oracle):
    data = Dataset(oracle.dataset(platforms=["Flink"]).samples[:10])
    train, validation = split(data, 0.5, seed=1)
    assert len(train) == 5 and len(validation) == 5


def test_split_is_partition(ofat_data):
    train, validation = split(ofat_data, 0.7, seed=7)
    merged = sorted(train.samples + validation.samples, key=repr)
    assert merged == sorted(ofat_data.samples, key=repr)
    assert not set(train.samples) & set(validation.samples)


def test_split_too_small(oracle):
    data = Dataset(oracle.dataset(platforms=["Flink"]).samples[:1])
    with pytest.raises(DatasetError, match="at least one sample"):
        split(data, 0.7, seed=0)


def test_split_fraction_bounds(ofat_data):
    with pytest.raises(ValueError):
        split(ofat_data, 0.0, seed=0)
    with pytest.raises(ValueError):
        split(ofat_data, 1.0, seed=0)


def test_sample_rejects_nonpositive_time():
    with pytest.raises(DatasetError):
        TrainingSample("Hadoop", "Sort", "C0", (0,), 0.0)


def test_r2_perfect_fit():
    assert r2_score([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0


def test_r2_constant_mean_prediction():
    actual = [2.0, 4.0, 6.0]
    assert r2_score([4.0, 4.0, 4.0], actual) == pytest.approx(0.0)


def test_r2_hand_example():
    # SS_res = 1, SS_tot = 2 computed by hand.
    assert r2_score([1.0, 2.0, 4.0], [1.0, 2.0, 3.0]) == pytest.approx(0.5)


def test_r2_joint_permutation_invariance():
    rng = np.random.default_rng(0)
    pred = rng.random(50)
    act = rng.random(50)
    base = r2_score(pred, act)
    perm = rng.permutation(50)
    assert r2_score(pred[perm], act[perm]) == pytest.approx(base, rel=1e-12)


def test_r2_constant_actual_sentinel():
    assert r2_score([5.0, 5.0], [5.0, 5.0]) == 1.0
    assert r2_score([5.0, 6.0], [5.0, 5.0]) == float("-inf")


def test_r2_length_mismatch():
    with pytest.raises(ValueError):
        r2_score([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        r2_score([], [])


@settings(deadline=None, max_examples=50)
@given(
    st.lists(
        st.tuples(
            st.floats(-1e6, 1e6, allow_nan=False),
            st.floats(-1e6, 1e6, allow_nan=False),
        ),
        min_size=1,
        max_size=40,
    )
)
def test_r2_never_exceeds_one(pairs):
    pred = [p for p, _ in pairs]
    act = [a for _, a in pairs]
    assert r2_score(pred, act) <= 1.0
