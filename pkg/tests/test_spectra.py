"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import numpy as np
import pytest

from dilationmra.core.oracle import OracleUtils
from dilationmra.core.signal_model import Grid, ModelParams, Signal, SignalModelUtils
from dilationmra.core.spectra import BispectrumAccumulator, BispectrumField, SpectraUtils, Spectrum


@pytest.fixture
def gaussian(grid: Grid) -> Signal:
    return Signal(values=np.exp(-2.0 * grid.x**2), grid=grid)


@pytest.fixture
def random_field(grid: Grid, rng) -> np.ndarray:
    shape = (grid.n_omega, grid.n_omega)

    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestTransforms:
    """Riemann-sum transform and its exact inverse."""

    def test_gaussian_closed_form(self, grid: Grid, gaussian: Signal):
        (
            transform,
            power,
            _,
        ) = OracleUtils.gaussian_reference_spectra(width=2.0, grid=grid)

        spectrum = SpectraUtils.dft(signal=gaussian)

        np.testing.assert_allclose(spectrum.values, transform.values, atol=1e-6)
        np.testing.assert_allclose(SpectraUtils.power_spectrum(spectrum), power, atol=1e-6)

    def test_inverse_is_exact(self, grid: Grid, rng):
        values = rng.standard_normal(grid.n_x)

        restored = SpectraUtils.idft(
            spectrum=SpectraUtils.dft(signal=Signal(values=values, grid=grid))
        )

        np.testing.assert_allclose(restored.values, values, atol=1e-10)

    def test_conjugate_symmetry(self, grid: Grid, rng):
        spectrum = SpectraUtils.dft_values(values=rng.standard_normal(grid.n_x), grid=grid)

        np.testing.assert_array_equal(spectrum[::-1], np.conj(spectrum))

    def test_stacked_rows_match_single_transforms(self, grid: Grid, rng):
        stack = rng.standard_normal((3, grid.n_x))

        transformed = SpectraUtils.dft_values(values=stack, grid=grid)

        for row, values in zip(transformed, stack):
            np.testing.assert_allclose(
                row, SpectraUtils.dft_values(values=values, grid=grid), atol=1e-12
            )

    def test_matches_direct_summation(self, grid: Grid, rng):
        values = rng.standard_normal(grid.n_x)

        np.testing.assert_allclose(
            SpectraUtils.dft_values(values=values, grid=grid),
            OracleUtils.dtft_at(values=values, grid=grid, frequencies=grid.omega),
            atol=1e-10,
        )


class TestBispectrum:
    """Bispectra of single spectra and their streaming mean."""

    def test_gaussian_closed_form(self, grid: Grid, gaussian: Signal):
        (
            _,
            _,
            reference,
        ) = OracleUtils.gaussian_reference_spectra(width=2.0, grid=grid)

        field = SpectraUtils.bispectrum(spectrum=SpectraUtils.dft(signal=gaussian))

        np.testing.assert_array_equal(field.mask, reference.mask)
        np.testing.assert_allclose(field.values, reference.values, atol=1e-4)

    def test_validity_mask(self, grid: Grid):
        mask = SpectraUtils.validity_mask(grid=grid)

        assert mask[grid.center, grid.center]
        assert mask[0, 0]
        assert not mask[-1, 0]
        assert not mask[0, -1]
        np.testing.assert_array_equal(mask, mask.T)

    def test_invariant_under_translation(self, grid: Grid, noiseless_params: ModelParams):
        spectrum = SpectraUtils.dft(
            signal=SignalModelUtils.sample_hidden(params=noiseless_params, grid=grid)
        )

        shifted = Spectrum(values=spectrum.values * np.exp(-1j * grid.omega * 0.7), grid=grid)

        original = SpectraUtils.bispectrum(spectrum=spectrum)

        np.testing.assert_allclose(
            SpectraUtils.bispectrum(spectrum=shifted).values,
            original.values,
            atol=1e-10 * np.abs(original.values).max(),
        )

    def test_accumulated_mean(self, grid: Grid, rng):
        spectra = SpectraUtils.dft_values(values=rng.standard_normal((5, grid.n_x)), grid=grid)

        accumulator = BispectrumAccumulator(grid=grid)
        accumulator.add(spectra=spectra[:2])
        accumulator.add(spectra=spectra[2:])

        expected = np.mean(
            [
                SpectraUtils.bispectrum(spectrum=Spectrum(values=row, grid=grid)).values
                for row in spectra
            ],
            axis=0,
        )

        assert accumulator.count == 5
        np.testing.assert_allclose(accumulator.mean().values, expected, atol=1e-10)

    def test_standard_error_of_identical_spectra(self, grid: Grid, rng):
        spectrum = SpectraUtils.dft_values(values=rng.standard_normal(grid.n_x), grid=grid)

        accumulator = BispectrumAccumulator(grid=grid, track_variance=True)
        accumulator.add(spectra=np.stack([spectrum] * 4))

        scale = np.abs(accumulator.mean().values).max()

        np.testing.assert_allclose(accumulator.sem(), 0.0, atol=1e-6 * scale)

    def test_empty_accumulator(self, grid: Grid):
        with pytest.raises(ValueError):
            BispectrumAccumulator(grid=grid).mean()

    def test_standard_error_needs_tracking(self, grid: Grid, rng):
        accumulator = BispectrumAccumulator(grid=grid)
        accumulator.add(spectra=np.ones((2, grid.n_omega), dtype=np.complex128))

        with pytest.raises(ValueError):
            accumulator.sem()


class TestDilation:
    """The interpolating dilation operator and its transpose."""

    def test_identity_at_unit_scale(self, grid: Grid, random_field: np.ndarray):
        np.testing.assert_allclose(
            SpectraUtils.dilate_field(field=random_field, C=1.0, degree=4, grid=grid),
            random_field,
            atol=1e-12,
        )

    def test_linear_functions_are_exact(self, grid: Grid):
        dilated = SpectraUtils.dilate_field(field=grid.omega, C=0.5, degree=0, grid=grid)

        np.testing.assert_allclose(dilated, 0.5 * grid.omega, atol=1e-12)

    def test_degree_scales_result(self, grid: Grid):
        ones = np.ones(grid.n_omega)

        dilated = SpectraUtils.dilate_field(field=ones, C=0.5, degree=3, grid=grid)

        np.testing.assert_allclose(dilated, 0.125, atol=1e-12)

    @pytest.mark.parametrize("C", [1.0 / 3.0, 0.5, 2.0 / 3.0])
    def test_adjoint_identity(self, grid: Grid, rng, random_field: np.ndarray, C: float):
        shape = (grid.n_omega, grid.n_omega)
        other = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

        forward = SpectraUtils.grid_inner(
            SpectraUtils.dilate_field(field=random_field, C=C, degree=4, grid=grid),
            other,
            grid=grid,
        )
        backward = SpectraUtils.grid_inner(
            random_field,
            SpectraUtils.dilate_adjoint(field=other, C=C, degree=4, grid=grid),
            grid=grid,
        )

        assert abs(forward - backward) <= 1e-10 * abs(forward)

    def test_field_wrapper_keeps_mask(self, grid: Grid, random_field: np.ndarray):
        mask = SpectraUtils.validity_mask(grid=grid)
        field = BispectrumField(values=np.where(mask, random_field, 0.0), grid=grid, mask=mask)

        dilated = SpectraUtils.dilate_field(field=field, C=0.5, degree=4)

        assert isinstance(dilated, BispectrumField)
        assert not np.any(dilated.values[~mask])

    @pytest.mark.parametrize("C", [0.0, 1.5])
    def test_rejects_scale_outside_unit_interval(self, grid: Grid, C: float):
        with pytest.raises(ValueError):
            SpectraUtils.dilate_field(field=grid.omega, C=C, degree=3, grid=grid)

    def test_plain_arrays_need_grid(self, grid: Grid):
        with pytest.raises(ValueError):
            SpectraUtils.dilate_field(field=grid.omega, C=0.5, degree=3)


class TestSmoothing:
    """Gaussian smoothing and the radial data term."""

    def test_constants_are_fixed_points(self, grid: Grid):
        field = np.full((grid.n_omega, grid.n_omega), 2.0 + 1.0j)

        np.testing.assert_allclose(
            SpectraUtils.gaussian_smooth(field=field, L=0.3, grid=grid), field, atol=1e-12
        )

    def test_rejects_nonpositive_width(self, grid: Grid):
        with pytest.raises(ValueError):
            SpectraUtils.gaussian_smooth(field=grid.omega, L=0.0, grid=grid)

    def test_euler_derivative_of_gaussian_power(self, default_grid: Grid):
        (
            _,
            power,
            _,
        ) = OracleUtils.gaussian_reference_spectra(width=2.0, grid=default_grid)

        expected = -(default_grid.omega**2) / 2.0 * power

        np.testing.assert_allclose(
            SpectraUtils.euler_radial_derivative(field=power, grid=default_grid),
            expected,
            atol=1e-2 * power.max(),
        )

    def test_data_term_of_constant(self, grid: Grid):
        field = np.full((grid.n_omega, grid.n_omega), 1.5)

        term = SpectraUtils.smoothed_data_term(field=field, L=0.5, grid=grid)

        np.testing.assert_allclose(term, 6.0, atol=1e-10)

    def test_power_data_term_of_gaussian(self, default_grid: Grid):
        (
            _,
            power,
            _,
        ) = OracleUtils.gaussian_reference_spectra(width=2.0, grid=default_grid)

        term = SpectraUtils.smoothed_data_term(field=power, L=0.05, grid=default_grid)

        expected = 3.0 * power - default_grid.omega**2 / 2.0 * power

        np.testing.assert_allclose(term, expected, atol=2e-2 * power.max())


class TestMetrics:
    """Grid inner product and relative errors."""

    def test_relative_error_of_identical_fields(self, random_field: np.ndarray):
        assert SpectraUtils.relative_error(reference=random_field, estimate=random_field) == 0.0

    def test_relative_error_on_mask(self, grid: Grid):
        reference = np.ones(grid.n_omega)
        estimate = np.where(grid.omega > 0.0, 3.0, 1.0)

        assert SpectraUtils.relative_error(
            reference=reference, estimate=estimate, mask=grid.omega <= 0.0
        ) == 0.0

    def test_relative_error_needs_reference(self, grid: Grid):
        with pytest.raises(ValueError):
            SpectraUtils.relative_error(
                reference=np.zeros(grid.n_omega), estimate=np.ones(grid.n_omega)
            )

    def test_grid_inner_is_quadrature(self, grid: Grid):
        ones = np.ones(grid.n_omega)

        assert SpectraUtils.grid_inner(ones, ones, grid=grid) == pytest.approx(
            grid.d_omega * grid.n_omega
        )
