import numpy as np
import pytest

from kgc.tsio import (TimeSeriesError, TimeSeriesMatrix, build_lagged_design, load_csv,
                      standardize)


def test_load_csv_with_header(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("x,y\n1,2\n3,4\n5,6\n")
    ts = load_csv(f)
    assert ts.names() == ["x", "y"]
    assert ts.T == 3 and ts.d == 2
    np.testing.assert_array_equal(ts.data, [[1, 2], [3, 4], [5, 6]])


def test_load_csv_headerless_sniffed(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("1,2\n3,4\n")
    ts = load_csv(f)
    assert ts.channel_names is None
    assert ts.names() == ["0", "1"]


@pytest.mark.parametrize("body, where", [
    ("a,b\n1,2\n3,x\n", "line 3, column 2"),
    ("a,b\n1,2\n3\n", "line 3 has 1 columns"),
    ("a,b\n1,nan\n3,4\n", "non-finite"),
])
def test_load_csv_reports_location(tmp_path, body, where):
    f = tmp_path / "bad.csv"
    f.write_text(body)
    with pytest.raises(TimeSeriesError, match=where):
        load_csv(f)


def test_load_csv_errors(tmp_path):
    with pytest.raises(TimeSeriesError):
        load_csv(tmp_path / "missing.csv")
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(TimeSeriesError, match="empty"):
        load_csv(tmp_path / "e.csv")
    (tmp_path / "one.csv").write_text("a\n1\n")
    with pytest.raises(TimeSeriesError, match="at least 2"):
        load_csv(tmp_path / "one.csv")


def test_matrix_is_read_only_and_validated():
    ts = TimeSeriesMatrix(np.arange(6.0).reshape(3, 2))
    with pytest.raises(ValueError):
        ts.data[0, 0] = 1.0
    with pytest.raises(TimeSeriesError):
        TimeSeriesMatrix(np.ones((1, 2)))
    with pytest.raises(TimeSeriesError):
        TimeSeriesMatrix(np.ones((3, 2)), ["a"])
    with pytest.raises(TimeSeriesError, match="row 1, column 0"):
        TimeSeriesMatrix([[0.0, 1.0], [np.inf, 1.0]])


def test_standardize_sample_sd(rng):
    x = rng.normal(3.0, 2.0, size=(50, 3))
    x[:, 2] = 7.0
    z = standardize(TimeSeriesMatrix(x)).data
    np.testing.assert_allclose(z[:, :2].mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(z[:, :2].std(axis=0, ddof=1), 1, atol=1e-12)
    assert np.all(z[:, 2] == 0)


def test_lagged_design_layout():
    x = np.arange(20.0).reshape(10, 2)
    x[:, 1] *= 10
    des = build_lagged_design(TimeSeriesMatrix(x), target=0, sources=(0, 1), p=2)
    # independent construction by explicit loops
    rows = []
    for t in range(2, 10):
        rows.append([x[t - 1, 0], x[t - 1, 1], x[t - 2, 0], x[t - 2, 1]])
    np.testing.assert_array_equal(des.X, rows)
    np.testing.assert_array_equal(des.y, x[2:, 0])
    assert des.source_channels == (0, 1)


def test_lagged_design_bad_lag():
    ts = TimeSeriesMatrix(np.zeros((5, 2)))
    with pytest.raises(TimeSeriesError):
        build_lagged_design(ts, 0, (0,), 5)
    with pytest.raises(TimeSeriesError):
        build_lagged_design(ts, 0, (3,), 1)
