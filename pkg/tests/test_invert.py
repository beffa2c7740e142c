"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import math

import numpy as np
import pytest

from dilationmra.core.constants import SIGNAL_IDS
from dilationmra.core.exceptions import DegenerateBispectrumError, ZeroReferenceError
from dilationmra.core.invert import InversionConfig, InvertUtils
from dilationmra.core.oracle import OracleUtils
from dilationmra.core.signal_model import Grid, ModelParams, Signal, SignalModelUtils
from dilationmra.core.spectra import SpectraUtils, Spectrum


def _hidden(signal_id: str, grid: Grid) -> Signal:
    params = SignalModelUtils.make_params(signal_id=signal_id, grid=grid, sigma=0.0, eta=0.0)

    return SignalModelUtils.sample_hidden(params=params, grid=grid)


class TestAlignedError:
    """Translation-aligned relative error."""

    def test_fractional_shift_is_aligned_away(self, grid: Grid, noiseless_params: ModelParams):
        hidden = SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)

        shifted = InvertUtils.shift_signal(signal=hidden, shift=0.3)

        assert InvertUtils.aligned_relative_error(reference=hidden, estimate=shifted) < 1e-6

    def test_whole_node_shift(self, grid: Grid, noiseless_params: ModelParams):
        hidden = SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)

        shifted = InvertUtils.shift_signal(signal=hidden, shift=4 * grid.dx)

        np.testing.assert_allclose(shifted.values[4:], hidden.values[:-4], atol=1e-10)

    def test_different_signals(self, grid: Grid):
        error = InvertUtils.aligned_relative_error(
            reference=_hidden(signal_id="f1", grid=grid),
            estimate=_hidden(signal_id="f2", grid=grid),
        )

        assert error > 0.1

    def test_zero_reference(self, grid: Grid, noiseless_params: ModelParams):
        with pytest.raises(ZeroReferenceError):
            InvertUtils.aligned_relative_error(
                reference=Signal(values=np.zeros(grid.n_x), grid=grid),
                estimate=SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid),
            )


class TestAssembly:
    """Magnitudes, phases and the inverse transform."""

    def test_magnitudes_are_clamped(self):
        np.testing.assert_array_equal(
            InvertUtils.magnitudes_from_power(power_hat=np.array([4.0, -1.0, 0.0])),
            [2.0, 0.0, 0.0],
        )

    def test_true_phases_reproduce_signal(self, grid: Grid):
        hidden = _hidden(signal_id="f2", grid=grid)
        spectrum = SpectraUtils.dft(signal=hidden).values[grid.nonnegative]

        assembled = InvertUtils.assemble_signal(
            mags=np.abs(spectrum), phases=np.angle(spectrum), grid=grid
        )

        np.testing.assert_allclose(assembled.values, hidden.values, atol=1e-8)

    def test_half_period_translation_is_undone(self, grid: Grid):
        hidden = _hidden(signal_id="f1", grid=grid)
        spectrum = SpectraUtils.dft(signal=hidden).values[grid.nonnegative]

        # (-1)^k on omega_k = k pi / N is a translation by N
        flipped = np.angle(spectrum) + math.pi * np.arange(spectrum.size)

        assembled = InvertUtils.assemble_signal(mags=np.abs(spectrum), phases=flipped, grid=grid)

        np.testing.assert_allclose(assembled.values, hidden.values, atol=1e-8)


class TestFrequencyMarching:
    """Phase recovery along omega_1 = pi / N."""

    def test_gauge(self, grid: Grid):
        B = OracleUtils.exact_bispectrum(signal_id="f1", grid=grid)

        phases = InvertUtils.frequency_marching(B=B)

        assert phases.phases[1] == 0.0
        assert 1 < phases.resolved <= grid.intervals

    def test_negative_mean_sets_origin_phase(self, grid: Grid):
        B = OracleUtils.exact_bispectrum(signal_id="f4", grid=grid)

        assert InvertUtils.frequency_marching(B=B).phases[0] == pytest.approx(math.pi)

    def test_degenerate_bispectrum(self, grid: Grid):
        B = OracleUtils.exact_bispectrum(signal_id="f1", grid=grid)

        with pytest.raises(DegenerateBispectrumError):
            InvertUtils.frequency_marching(B=B.with_values(values=np.zeros_like(B.values)))

    @pytest.mark.parametrize("signal_id", SIGNAL_IDS)
    def test_exact_inputs(self, grid: Grid, signal_id: str):
        recovered = InvertUtils.recover_signal(
            bispectrum=OracleUtils.exact_bispectrum(signal_id=signal_id, grid=grid),
            power=OracleUtils.exact_power(signal_id=signal_id, grid=grid),
            cfg=InversionConfig(method="fm", modulus_floor=1e-20),
        )

        assert InvertUtils.aligned_relative_error(
            reference=_hidden(signal_id=signal_id, grid=grid), estimate=recovered
        ) < 1e-6


class TestPhaseSynchronization:
    """Iterative phase synchronization."""

    @pytest.mark.parametrize("signal_id", SIGNAL_IDS)
    def test_exact_inputs(self, grid: Grid, signal_id: str):
        recovered = InvertUtils.recover_signal(
            bispectrum=OracleUtils.exact_bispectrum(signal_id=signal_id, grid=grid),
            power=OracleUtils.exact_power(signal_id=signal_id, grid=grid),
            cfg=InversionConfig(method="aps"),
        )

        assert InvertUtils.aligned_relative_error(
            reference=_hidden(signal_id=signal_id, grid=grid), estimate=recovered
        ) < 1e-6

    def test_exact_phases_are_a_fixed_point(self, grid: Grid):
        B = OracleUtils.exact_bispectrum(signal_id="f2", grid=grid)

        marched = InvertUtils.frequency_marching(B=B, modulus_floor=1e-20)
        synchronized = InvertUtils.phase_synchronization(B=B, init=marched)

        resolved = min(marched.resolved, synchronized.resolved)

        np.testing.assert_allclose(
            np.exp(1j * synchronized.phases[: resolved + 1]),
            np.exp(1j * marched.phases[: resolved + 1]),
            atol=1e-6,
        )

    def test_falls_back_to_marching(self, grid: Grid, rng):
        B = OracleUtils.exact_bispectrum(signal_id="f1", grid=grid)
        scale = np.abs(B.values).max()

        noise = rng.standard_normal(B.values.shape) + 1j * rng.standard_normal(B.values.shape)

        noisy = B.with_values(values=B.values + 0.1 * scale * noise)

        cfg = InversionConfig(method="aps", max_iters=1, tol=1e-300)

        np.testing.assert_array_equal(
            InvertUtils.recover_phases(bispectrum=noisy, cfg=cfg).phases,
            InvertUtils.frequency_marching(B=noisy).phases,
        )

    def test_starts_from_zero_phases(self, grid: Grid):
        B = OracleUtils.gaussian_reference_spectra(width=1.0, grid=grid)[2]

        synchronized = InvertUtils.phase_synchronization(
            B=B, cfg=InversionConfig(init="zeros")
        )

        # A centered Gaussian has a real positive transform
        np.testing.assert_allclose(synchronized.phases, 0.0, atol=1e-12)
        assert synchronized.resolved > 1


class TestInversionStability:
    """Behaviour of the recovery under translations and perturbed inputs."""

    def test_translation_leaves_error_unchanged(self, grid: Grid):
        hidden = _hidden(signal_id="f2", grid=grid)
        spectrum = SpectraUtils.dft(signal=hidden)
        power = SpectraUtils.power_spectrum(spectrum=spectrum)

        ramped = Spectrum(values=spectrum.values * np.exp(-0.7j * grid.omega), grid=grid)

        cfg = InversionConfig(method="fm")

        errors = [
            InvertUtils.aligned_relative_error(
                reference=hidden,
                estimate=InvertUtils.recover_signal(
                    bispectrum=SpectraUtils.bispectrum(spectrum=source),
                    power=power,
                    cfg=cfg,
                ),
            )
            for source in (spectrum, ramped)
        ]

        assert errors[0] < 1e-3
        assert errors[1] == pytest.approx(errors[0], abs=1e-8)

    def test_error_grows_with_perturbation(self, grid: Grid):
        B = OracleUtils.exact_bispectrum(signal_id="f1", grid=grid)
        power = OracleUtils.exact_power(signal_id="f1", grid=grid)
        hidden = _hidden(signal_id="f1", grid=grid)

        levels = (0.0, 0.01, 0.05, 0.2)
        errors = np.zeros((5, len(levels)))

        for seed in range(5):
            rng = np.random.default_rng(seed)
            shape = B.values.shape

            noise = (
                rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            ) / math.sqrt(2.0)

            for index, level in enumerate(levels):
                perturbed = B.with_values(values=B.values * (1.0 + level * noise))

                errors[seed, index] = InvertUtils.aligned_relative_error(
                    reference=hidden,
                    estimate=InvertUtils.recover_signal(
                        bispectrum=perturbed,
                        power=power,
                        cfg=InversionConfig(method="fm"),
                    ),
                )

        assert np.all(np.diff(errors.mean(axis=0)) >= 0.0)
