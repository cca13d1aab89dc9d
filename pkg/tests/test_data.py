from pathlib import Path

import numpy as np
import pytest

from evboot.data import Dataset, MissingValueError, load_csv

FIXTURES = Path(__file__).parent / "fixtures"


def test_load_fixture_shapes_and_names():
    data = load_csv(FIXTURES / "case4_n100.csv", "y")
    assert data.n == 100
    assert data.d == 3
    assert data.column_names == ("x1", "x2", "x3")
    assert data.response_name == "y"
    assert np.isfinite(data.y).all()


def test_response_column_can_be_interior():
    data = load_csv(FIXTURES / "case4_n100.csv", "x2")
    assert data.column_names == ("y", "x1", "x3")
    assert data.d == 3


def test_missing_cell_names_column_and_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,2.0\n3.0,\n")
    with pytest.raises(MissingValueError, match=r"3.*'x1'"):
        load_csv(path, "y")


def test_non_numeric_cell_is_an_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,x1\n1.0,oops\n")
    with pytest.raises(MissingValueError, match="oops"):
        load_csv(path, "y")


def test_unknown_response_column(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("y,x1\n1.0,2.0\n")
    with pytest.raises(KeyError, match="z"):
        load_csv(path, "z")


def test_empty_file_and_header_only(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="header"):
        load_csv(empty, "y")
    header_only = tmp_path / "h.csv"
    header_only.write_text("y,x1\n")
    with pytest.raises(ValueError, match="no data rows"):
        load_csv(header_only, "y")


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(y=np.ones((2, 2)), x=np.ones((2, 1)), column_names=("a",))
    with pytest.raises(ValueError):
        Dataset(y=np.ones(3), x=np.ones((2, 1)), column_names=("a",))
    with pytest.raises(ValueError):
        Dataset(y=np.ones(2), x=np.ones((2, 2)), column_names=("a",))
    with pytest.raises(MissingValueError):
        Dataset(y=np.array([1.0, np.nan]), x=np.ones((2, 1)), column_names=("a",))


def test_take_preserves_metadata():
    data = Dataset(y=np.arange(4.0), x=np.arange(8.0).reshape(4, 2), column_names=("a", "b"))
    sub = data.take(np.array([2, 0, 2]))
    assert sub.n == 3
    assert sub.column_names == ("a", "b")
    np.testing.assert_array_equal(sub.y, [2.0, 0.0, 2.0])


def test_covariate_index():
    data = Dataset(y=np.ones(2), x=np.ones((2, 2)), column_names=("a", "b"))
    assert data.covariate_index("b") == 1
    with pytest.raises(KeyError):
        data.covariate_index("c")
