"""Ingestion, config handling, and dataset invariants."""

from __future__ import annotations

import json

import numpy as np
import pytest

from survent import (
    ColumnConfig,
    ConfigError,
    Dataset,
    MissingValueError,
    ParseError,
    ingest_csv,
)


@pytest.fixture
def tiny_csv(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("id,y,delta,v1\na,1.5,1,0.2\nb,2.0,0,0.4\nc,0.5,1,0.9\n")
    return path


CONFIG = {"time": "y", "status": "delta", "features": ["v1"], "id": "id"}


def test_ingest_basic(tiny_csv):
    ds = ingest_csv(tiny_csv, CONFIG)
    assert ds.n == 3 and ds.n_u == 2 and ds.n_c == 1
    assert ds.ids == ("a", "b", "c")
    assert ds.feature_names == ("v1",)
    np.testing.assert_allclose(ds.y, [1.5, 2.0, 0.5])


def test_ingest_missing_column(tiny_csv):
    with pytest.raises(ConfigError, match="status2"):
        ingest_csv(tiny_csv, {**CONFIG, "status": "status2"})


def test_ingest_non_numeric_reports_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,delta\n1.0,1\noops,0\n")
    with pytest.raises(ParseError) as err:
        ingest_csv(path, {"time": "y", "status": "delta", "features": []})
    assert err.value.row == 2


def test_ingest_missing_values_lists_rows(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("y,delta,v\n1.0,1,2\n2.0,,3\n3.0,1,\n")
    with pytest.raises(MissingValueError) as err:
        ingest_csv(path, {"time": "y", "status": "delta", "features": ["v"]})
    assert err.value.rows == [2, 3]


def test_ingest_bad_status_value(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("y,delta\n1.0,2\n")
    with pytest.raises(ParseError):
        ingest_csv(path, {"time": "y", "status": "delta", "features": []})


def test_config_from_json_file(tmp_path, tiny_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({**CONFIG, "bins": {"v1": [0, 0.5, 1.0]}}))
    ds = ingest_csv(tiny_csv, cfg)
    assert ds.n == 3
    parsed = ColumnConfig.from_json(cfg)
    assert parsed.bins["v1"] == [0.0, 0.5, 1.0]
    assert parsed.to_dict()["features"] == ["v1"]


def test_config_rejects_unknown_version():
    with pytest.raises(ConfigError):
        ColumnConfig.from_dict({**CONFIG, "version": 99})


def test_roundtrip_reingest_identical(tmp_path, tiny_csv):
    ds = ingest_csv(tiny_csv, CONFIG)
    out = tmp_path / "echo.csv"
    ds.to_csv(out)
    again = ingest_csv(out, {"time": "time", "status": "status",
                             "features": ["v1"], "id": "id"})
    np.testing.assert_array_equal(ds.y, again.y)
    np.testing.assert_array_equal(ds.delta, again.delta)
    np.testing.assert_array_equal(ds.X, again.X)
    assert ds.ids == again.ids


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(y=[1.0, -2.0], delta=[1, 0])
    with pytest.raises(ValueError):
        Dataset(y=[1.0, np.inf], delta=[1, 0])
    with pytest.raises(ValueError):
        Dataset(y=[1.0], delta=[2])
    with pytest.raises(ValueError):
        Dataset(y=[1.0, 2.0], delta=[1, 0], X=[[1.0], [2.0]],
                feature_names=["a", "a"])
    with pytest.raises(ValueError, match="unique"):
        Dataset(y=[1.0, 2.0], delta=[1, 0], ids=["x", "x"])


def test_counts_identity():
    ds = Dataset(y=[1, 2, 3, 4], delta=[1, 0, 0, 1])
    assert ds.n == ds.n_u + ds.n_c == 4
    assert ds.n_u == int(ds.delta.sum())


def test_promotion_records_metadata():
    ds = Dataset(y=[1.0, 5.0, 3.0], delta=[1, 0, 1])
    promoted = ds.promote_largest_censored()
    assert promoted.delta.tolist() == [1, 1, 1]
    assert promoted.meta["promoted_index"] == (1,)
    assert promoted.original_delta().tolist() == [1, 0, 1]
    # idempotent, and a no-op when the trailing point is an event
    assert promoted.promote_largest_censored() is promoted
    assert ds.subset([0, 1]).meta.get("promoted_index") is None


def test_promotion_with_tied_max():
    # event and censoring tied at the max: the censoring sorts last
    ds = Dataset(y=[1.0, 2.0, 2.0], delta=[1, 1, 0])
    promoted = ds.promote_largest_censored()
    assert promoted.delta.tolist() == [1, 1, 1]


def test_promotion_cascades_through_tied_censored_block():
    # two censored records tied at the max: promoting one re-sorts it ahead
    # of the other, which must then be promoted too
    ds = Dataset(y=[1.0, 5.0, 5.0], delta=[1, 0, 0])
    promoted = ds.promote_largest_censored()
    assert promoted.delta.tolist() == [1, 1, 1]
    assert set(promoted.meta["promoted_index"]) == {1, 2}
    assert promoted.original_delta().tolist() == [1, 0, 0]


def test_records_view():
    ds = Dataset(y=[1.0], delta=[1], X=[[0.5, 0.7]], ids=["z"])
    rec = ds.records[0]
    assert rec.id == "z" and rec.y == 1.0 and rec.covariates == (0.5, 0.7)
