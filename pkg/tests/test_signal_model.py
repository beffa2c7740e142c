"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import math

import numpy as np
import pytest

from dilationmra.core.constants import ETA_MAX, SIGNAL_IDS
from dilationmra.core.exceptions import (
    DilationMRAError,
    GridError,
    InvalidEtaError,
    InvalidParameterError,
    LatentOutOfWindowError,
)
from dilationmra.core.invert import InvertUtils
from dilationmra.core.signal_model import (
    Grid,
    LatentDraw,
    ModelParams,
    Signal,
    SignalModelUtils,
    dilation_constants,
)
from dilationmra.core.spectra import SpectraUtils


def _energy(values: np.ndarray, grid: Grid) -> float:
    return float(grid.dx * np.sum(np.asarray(values) ** 2))


class TestMakeGrid:
    """Sampling grid construction and its invariants."""

    def test_standard_grid(self):
        grid = SignalModelUtils.make_grid(N=32, ell=4)

        assert grid.dx == 1.0 / 16.0
        assert grid.d_omega == pytest.approx(math.pi / 32.0)
        assert grid.omega[0] == pytest.approx(-16.0 * math.pi)
        assert grid.omega[-1] == pytest.approx(16.0 * math.pi)
        assert grid.n_x == 513

    def test_smallest_example(self):
        grid = SignalModelUtils.make_grid(N=2, ell=1)

        np.testing.assert_array_equal(grid.x, [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_extent_and_symmetry(self, grid: Grid):
        assert grid.dx * (grid.n_x - 1) == pytest.approx(grid.N)
        assert np.count_nonzero(grid.omega == 0.0) == 1
        assert grid.omega[grid.center] == 0.0
        np.testing.assert_allclose(grid.omega, -grid.omega[::-1], atol=1e-12)

    @pytest.mark.parametrize(
        ("N", "ell"),
        [(3, 2), (0, 2), (8, 0), (1, 1)],
    )
    def test_rejects_invalid_parameters(self, N: int, ell: int):
        with pytest.raises(GridError):
            SignalModelUtils.make_grid(N=N, ell=ell)


class TestModelParams:
    """Derived constants and parameter validation."""

    def test_constants_at_largest_eta(self):
        (
            C0,
            C1,
            C2,
        ) = dilation_constants(eta=ETA_MAX)

        assert C0 == pytest.approx(1.0 / 3.0)
        assert C1 == pytest.approx(1.0)
        assert C2 == pytest.approx(2.0 / 3.0)

    def test_constants_without_dilation(self):
        assert dilation_constants(eta=0.0) == (1.0, 0.0, 1.0)

    def test_constants_follow_eta(self, f1_params: ModelParams):
        assert (f1_params.C0, f1_params.C1, f1_params.C2) == dilation_constants(eta=ETA_MAX)

    def test_rejects_large_eta(self):
        with pytest.raises(InvalidEtaError):
            ModelParams(signal_id="f1", amplitude=1.0, sigma=0.0, eta=0.5)

    def test_rejects_unknown_signal(self):
        with pytest.raises(ValueError):
            ModelParams(signal_id="f9", amplitude=1.0, sigma=0.0, eta=0.1)

    @pytest.mark.parametrize(
        "field, kwargs",
        [
            ("signal_id", {"signal_id": "f9"}),
            ("amplitude", {"amplitude": 0.0}),
            ("sigma", {"sigma": -1.0}),
        ],
    )
    def test_invalid_parameter_is_a_package_error(self, field: str, kwargs: dict):
        values = {"signal_id": "f1", "amplitude": 1.0, "sigma": 0.0, "eta": 0.1, **kwargs}

        with pytest.raises(InvalidParameterError) as info:
            ModelParams(**values)

        assert isinstance(info.value, DilationMRAError)
        assert info.value.name == field


class TestEvalSignal:
    """Closed-form test signals."""

    @pytest.mark.parametrize("signal_id", ["f1", "f2", "f3", "f4"])
    def test_value_at_origin(self, signal_id: str):
        assert float(SignalModelUtils.eval_signal(signal_id=signal_id, amplitude=2.5, x=0.0)) == (
            pytest.approx(2.5)
        )

    def test_windowed_cosine_vanishes_outside(self):
        assert float(SignalModelUtils.eval_signal(signal_id="f4", amplitude=1.0, x=1.0)) == 0.0

    def test_sinc_convention(self):
        value = SignalModelUtils.eval_signal(signal_id="f3", amplitude=1.0, x=0.3)

        assert float(value) == pytest.approx(math.sin(1.2) / 1.2)


class TestCalibrateAmplitude:
    """Amplitudes giving the hidden signal unit energy."""

    @pytest.mark.parametrize("signal_id", SIGNAL_IDS)
    def test_unit_energy(self, grid: Grid, signal_id: str):
        params = SignalModelUtils.make_params(signal_id=signal_id, grid=grid, sigma=0.0, eta=0.0)

        hidden = SignalModelUtils.sample_hidden(params=params, grid=grid)

        assert _energy(hidden.values, grid) == pytest.approx(1.0, abs=1e-6)

    def test_sinc_amplitude(self, default_grid: Grid):
        amplitude = SignalModelUtils.calibrate_amplitude(signal_id="f3", grid=default_grid)

        assert amplitude == pytest.approx(math.sqrt(4.0 / math.pi), rel=1e-2)

    def test_windowed_cosine_amplitude(self, default_grid: Grid):
        amplitude = SignalModelUtils.calibrate_amplitude(signal_id="f4", grid=default_grid)

        # integral of cos^2(6x) over (-pi/4, pi/4) is pi/4
        assert amplitude**2 * math.pi / 4.0 == pytest.approx(1.0, rel=1e-2)


class TestSynthesizeObservation:
    """Single observations under fixed latents."""

    def test_identity_latent(self, grid: Grid, noiseless_params: ModelParams, rng):
        observation = SignalModelUtils.synthesize_observation(
            params=noiseless_params,
            grid=grid,
            latent=LatentDraw(t=0.0, tau=0.0),
            rng=rng,
        )

        hidden = SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)

        np.testing.assert_array_equal(observation.values, hidden.values)

    @pytest.mark.parametrize("tau", [-0.5, -0.25, 0.0, 0.25, 0.5])
    @pytest.mark.parametrize("signal_id", ["f1", "f2"])
    def test_energy_scales_with_dilation(self, grid: Grid, rng, signal_id: str, tau: float):
        params = SignalModelUtils.make_params(
            signal_id=signal_id, grid=grid, sigma=0.0, eta=ETA_MAX
        )

        observation = SignalModelUtils.synthesize_observation(
            params=params,
            grid=grid,
            latent=LatentDraw(t=0.0, tau=tau),
            rng=rng,
        )

        assert _energy(observation.values, grid) == pytest.approx(1.0 - tau, abs=1e-4)

    @pytest.mark.parametrize("signal_id", ["f3", "f4"])
    def test_energy_scales_for_rough_signals(self, default_grid: Grid, rng, signal_id: str):
        params = SignalModelUtils.make_params(
            signal_id=signal_id, grid=default_grid, sigma=0.0, eta=ETA_MAX
        )

        observation = SignalModelUtils.synthesize_observation(
            params=params,
            grid=default_grid,
            latent=LatentDraw(t=0.0, tau=0.5),
            rng=rng,
        )

        assert _energy(observation.values, default_grid) == pytest.approx(0.5, rel=1e-2)

    def test_translation_is_aligned_away(self, grid: Grid, noiseless_params: ModelParams, rng):
        observation = SignalModelUtils.synthesize_observation(
            params=noiseless_params,
            grid=grid,
            latent=LatentDraw(t=0.5, tau=0.0),
            rng=rng,
        )

        hidden = SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)

        assert InvertUtils.aligned_relative_error(reference=hidden, estimate=observation) < 1e-6

    def test_rejects_latent_leaving_window(self, grid: Grid, noiseless_params: ModelParams, rng):
        with pytest.raises(LatentOutOfWindowError):
            SignalModelUtils.synthesize_observation(
                params=noiseless_params,
                grid=grid,
                latent=LatentDraw(t=1.5, tau=-0.5),
                rng=rng,
            )

    def test_signal_shape_is_checked(self, grid: Grid):
        with pytest.raises(ValueError):
            Signal(values=np.zeros(grid.n_x - 1), grid=grid)


class TestSynthesizeBatch:
    """Batches, streaming and the determinism contract."""

    def test_same_seed_is_bit_identical(self, grid: Grid, f1_params: ModelParams):
        first = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=16, seed=7)
        second = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=16, seed=7)

        np.testing.assert_array_equal(first.values, second.values)
        np.testing.assert_array_equal(first.tau, second.tau)

    def test_streaming_matches_batch(self, grid: Grid, f1_params: ModelParams):
        batch = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=23, seed=3)

        chunks = list(
            SignalModelUtils.stream_batches(
                params=f1_params, grid=grid, M=23, seed=3, chunk_size=5
            )
        )

        assert [chunk.start for chunk in chunks] == [0, 5, 10, 15, 20]
        np.testing.assert_array_equal(
            np.concatenate([chunk.values for chunk in chunks]), batch.values
        )

    def test_degenerate_latents_differ_by_translation(self, grid: Grid):
        params = SignalModelUtils.make_params(signal_id="f1", grid=grid, sigma=0.0, eta=0.0)

        batch = SignalModelUtils.synthesize_batch(params=params, grid=grid, M=5, seed=11)

        np.testing.assert_array_equal(batch.tau, 0.0)

        first = Signal(values=batch.values[0], grid=grid)

        for row in batch.values[1:]:
            assert InvertUtils.aligned_relative_error(
                reference=first, estimate=Signal(values=row, grid=grid)
            ) < 1e-6

    def test_latent_windows(self, grid: Grid, f1_params: ModelParams):
        batch = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=10_000, seed=5)

        assert np.all(np.abs(batch.tau) <= f1_params.half_width)
        assert np.all(np.abs(batch.t) <= grid.N / 8.0)
        assert abs(float(np.mean(batch.tau))) < 4.0 * ETA_MAX / 100.0

    def test_rejects_empty_batch(self, grid: Grid, f1_params: ModelParams):
        with pytest.raises(ValueError):
            SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=0, seed=0)


class TestNoise:
    """Discrete white noise with variance sigma^2 / dx per node."""

    @pytest.fixture(scope="class")
    def noise_spectra(self, grid: Grid) -> np.ndarray:
        noisy = SignalModelUtils.make_params(signal_id="f1", grid=grid, sigma=1.0, eta=0.1)
        clean = SignalModelUtils.make_params(signal_id="f1", grid=grid, sigma=0.0, eta=0.1)

        # Latents come first in each observation's stream, so the difference is pure noise
        difference = (
            SignalModelUtils.synthesize_batch(params=noisy, grid=grid, M=10_000, seed=21).values
            - SignalModelUtils.synthesize_batch(params=clean, grid=grid, M=10_000, seed=21).values
        )

        return SpectraUtils.dft_values(values=difference, grid=grid)

    def test_diagonal_is_sigma_squared_n(self, grid: Grid, noise_spectra: np.ndarray):
        for k in (grid.center, grid.center + 5, grid.center + 40):
            power = np.abs(noise_spectra[:, k]) ** 2
            standard_error = power.std(ddof=1) / math.sqrt(power.size)

            assert abs(power.mean() - grid.N) < 4.0 * standard_error

    def test_even_offsets_are_uncorrelated(self, grid: Grid, noise_spectra: np.ndarray):
        for k in (grid.center + 1, grid.center + 9):
            products = noise_spectra[:, k] * np.conj(noise_spectra[:, k + 2])

            for part in (products.real, products.imag):
                standard_error = part.std(ddof=1) / math.sqrt(part.size)

                assert abs(part.mean()) < 4.0 * standard_error
