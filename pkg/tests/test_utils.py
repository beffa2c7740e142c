"""
Author: Louis Goodnews
Date: 2025-09-15
"""

from datetime import timedelta

import numpy as np
import pytest

from dilationmra.core.exceptions import SerializationError
from dilationmra.core.oracle import OracleUtils
from dilationmra.core.signal_model import Grid, ModelParams, SignalModelUtils
from dilationmra.utils.utils import DataConversionUtils, FileUtils


class TestDataConversionUtils:
    """CSV cell conversions."""

    def test_float_round_trip(self):
        value = 0.1 + 0.2

        assert DataConversionUtils.str_to_float(
            value=DataConversionUtils.float_to_str(value=value)
        ) == value

    def test_missing_float(self):
        assert DataConversionUtils.float_to_str(value=None) == ""
        assert DataConversionUtils.str_to_float(value="") is None
        assert DataConversionUtils.str_to_float(value="abc") is None

    def test_duration(self):
        assert DataConversionUtils.seconds_to_str(value=1.5) == "PT1.5S"
        assert DataConversionUtils.str_to_timedelta(value="PT1.5S") == timedelta(seconds=1.5)

    def test_invalid_duration(self):
        assert DataConversionUtils.str_to_timedelta(value="soon") is None


class TestFileUtils:
    """The CSV formats and their sidecar headers."""

    def test_bispectrum(self, grid: Grid, tmp_path):
        field = OracleUtils.exact_bispectrum(signal_id="f1", grid=grid)
        path = tmp_path / "bispectrum.csv"

        FileUtils.write_bispectrum(field=field, path=path, sigma=0.5)

        restored = FileUtils.read_bispectrum(path=path)

        assert restored.grid == grid
        np.testing.assert_array_equal(restored.mask, field.mask)
        np.testing.assert_array_equal(restored.values, field.values)
        assert FileUtils.read_toml(path=path.with_suffix(".toml"))["sigma"] == 0.5

    def test_signal(self, grid: Grid, noiseless_params: ModelParams, tmp_path):
        signal = SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)
        path = tmp_path / "signal.csv"

        FileUtils.write_signal(signal=signal, path=path)

        np.testing.assert_array_equal(FileUtils.read_signal(path=path).values, signal.values)

    def test_observations(self, grid: Grid, f1_params: ModelParams, tmp_path):
        batch = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=3, seed=5)
        path = tmp_path / "observations.csv"

        FileUtils.write_observations(batch=batch, path=path)

        restored = FileUtils.read_observations(path=path)

        np.testing.assert_array_equal(restored.values, batch.values)
        np.testing.assert_array_equal(restored.t, batch.t)
        np.testing.assert_array_equal(restored.tau, batch.tau)

    def test_power_rows(self, grid: Grid, tmp_path):
        path = tmp_path / "power.csv"

        FileUtils.write_vector(
            path=path, grid=grid, columns=("omega", "power"), values=np.ones(grid.n_omega)
        )

        with pytest.raises(SerializationError):
            FileUtils.read_vector(path=path, columns=("x", "value"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SerializationError):
            FileUtils.read_csv(path=tmp_path / "missing.csv")

    def test_header_mismatch(self, tmp_path):
        path = FileUtils.write_csv(path=tmp_path / "data.csv", header=("a", "b"), rows=[("1", "2")])

        with pytest.raises(SerializationError):
            FileUtils.read_csv(path=path, header=("a", "c"))

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("N = = 3\n", encoding="utf-8")

        with pytest.raises(SerializationError):
            FileUtils.read_toml(path=path)

    def test_missing_grid_keys(self, tmp_path):
        path = FileUtils.write_csv(path=tmp_path / "data.csv", header=("x", "value"), rows=[])
        FileUtils.write_sidecar(path=path, values={"N": 8})

        with pytest.raises(SerializationError):
            FileUtils.read_grid(path=path)
