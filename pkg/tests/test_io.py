import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgc import io
from kgc.connectome import SignificanceMask, SubjectFeatureTable


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips(v):
    assert float(io.fmt(v)) == v


def test_matrix_csv_round_trip(tmp_path, rng):
    m = rng.normal(size=(4, 4)) * 1e-7
    p = io.write_matrix_csv(tmp_path / "m.csv", m)
    np.testing.assert_array_equal(io.read_matrix(p), m)


def test_read_matrix_json_and_errors(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"values": [[0, 1], [2, 0]]}))
    assert io.read_matrix(tmp_path / "m.json").tolist() == [[0, 1], [2, 0]]
    (tmp_path / "r.csv").write_text("1,2,3\n4,5,6\n")
    with pytest.raises(ValueError, match="square"):
        io.read_matrix(tmp_path / "r.csv")


def test_mask_and_features_round_trip(tmp_path):
    mask = SignificanceMask(np.array([[0, 1], [0, 0]]))
    paths = io.write_mask(tmp_path / "m.csv", mask)
    assert [p.name for p in paths] == ["m.csv", "m.json"]
    assert io.read_mask(paths[0]).mask.tolist() == [[0, 1], [0, 0]]
    t = SubjectFeatureTable(np.array([[0.5, 1.0], [2.0, 3.0]]), np.array([1, 0]),
                            [(0, 1, "EC"), (0, 1, "FC")])
    io.write_features(tmp_path / "f.csv", t)
    np.testing.assert_array_equal(io.read_features(tmp_path / "f.csv"), t.features)
    assert io.read_labels(tmp_path / "f.labels.csv").tolist() == [1, 0]
    assert io.read_index(tmp_path / "f.index.json") == t.feature_index


def test_manifest(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    out = io.write_json(tmp_path / "a.json", {"x": np.float64(1.5), "y": np.arange(2)})
    m = io.RunManifest("test", {"k": 1}, 7)
    m.add_outputs([out], tmp_path)
    doc = json.loads(m.write(tmp_path).read_text())
    assert doc["timestamp"] == "1970-01-01T00:00:00+00:00"
    assert doc["outputs"]["a.json"] == io.sha256(out)
    assert json.loads(out.read_text()) == {"x": 1.5, "y": [0, 1]}
