import numpy as np
import pytest

from ksdiff import (
    DataValidationError,
    Dataset,
    Sample1D,
    dataset_from_array,
    load_dataset_csv,
    save_dataset_csv,
    standardize,
)


class TestSample1D:
    def test_rejects_empty(self):
        with pytest.raises(DataValidationError, match="empty sample"):
            Sample1D(np.array([]))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(DataValidationError, match="non-finite"):
            Sample1D(np.array([1.0, bad, 2.0]))

    def test_duplicates_allowed(self):
        assert len(Sample1D(np.array([1.0, 1.0, 2.0]))) == 3

    def test_sorted_flag_checked(self):
        with pytest.raises(DataValidationError, match="sorted"):
            Sample1D(np.array([2.0, 1.0]), is_sorted=True)
        s = Sample1D(np.array([1.0, 2.0]), is_sorted=True)
        assert np.array_equal(s.sorted_values, [1.0, 2.0])

    def test_immutable(self):
        s = Sample1D(np.array([3.0, 1.0]))
        with pytest.raises(ValueError):
            s.values[0] = 0.0


class TestDataset:
    def test_rejects_non_finite_with_location(self):
        arr = np.ones((3, 2))
        arr[2, 1] = np.nan
        with pytest.raises(DataValidationError, match="row 2, column 1"):
            dataset_from_array(arr)

    def test_rejects_duplicate_names(self):
        with pytest.raises(DataValidationError, match="duplicate"):
            Dataset(("a", "a"), np.ones((2, 2)))

    def test_rejects_name_count_mismatch(self):
        with pytest.raises(DataValidationError):
            Dataset(("a",), np.ones((2, 2)))

    def test_column_is_sample(self):
        ds = dataset_from_array([[1.0, 2.0], [3.0, 4.0]])
        col = ds.column(1)
        assert isinstance(col, Sample1D)
        assert np.array_equal(col.values, [2.0, 4.0])
        with pytest.raises(DataValidationError):
            ds.column(2)


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = dataset_from_array(rng.normal(size=(20, 4)) * 1e-7)
        path = tmp_path / "ds.csv"
        save_dataset_csv(ds, path)
        back = load_dataset_csv(path)
        assert back.names == ds.names
        assert np.array_equal(back.values, ds.values)

    def test_parse_error_has_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,2.0\n1.0,oops\n")
        with pytest.raises(DataValidationError, match="line 3"):
            load_dataset_csv(path)

    def test_nan_rejected_with_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0,nan\n")
        with pytest.raises(DataValidationError, match="line 2"):
            load_dataset_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1.0\n")
        with pytest.raises(DataValidationError, match="expected 2 values"):
            load_dataset_csv(path)


def test_standardize_zero_mean_unit_variance():
    rng = np.random.default_rng(1)
    ds = dataset_from_array(rng.normal(loc=3.0, scale=2.5, size=(500, 3)))
    out = standardize(ds)
    assert np.allclose(out.values.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(out.values.std(axis=0), 1.0, atol=1e-12)


def test_standardize_rejects_constant_column():
    ds = dataset_from_array(np.column_stack([np.ones(5), np.arange(5.0)]))
    with pytest.raises(DataValidationError, match="x1"):
        standardize(ds)
