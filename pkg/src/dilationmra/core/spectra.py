"""
Author: Louis Goodnews
Date: 2025-09-15

Fourier transforms on the grid, power spectra and bispectra, the dilation
operator L_C with its adjoint, the Euler radial derivative and Gaussian
smoothing with derivative-of-Gaussian radial terms.
"""

import logging
import math

from dataclasses import dataclass
from functools import lru_cache
from typing import Final, Optional, TypeVar, Union

import numpy as np
import scipy.fft
import scipy.ndimage
import scipy.sparse

from numpy.typing import NDArray

from .signal_model import Grid, Signal


__all__: Final[list[str]] = [
    "BispectrumAccumulator",
    "BispectrumField",
    "SpectraUtils",
    "Spectrum",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)

# Exact values of e^{i k pi / 2} for k mod 4
_QUARTER_TURNS: Final[NDArray[np.complex128]] = np.array([1.0, 1.0j, -1.0, -1.0j])

# Complex entries held at once while assembling a batch of bispectra
_ASSEMBLY_CHUNK: Final[int] = 2**22


@dataclass(frozen=True, eq=False)
class Spectrum:
    """
    Complex samples of a Fourier transform on Grid.omega.
    """

    values: NDArray[np.complex128]
    grid: Grid


@dataclass(frozen=True, eq=False)
class BispectrumField:
    """
    Complex field over frequency pairs (omega1, omega2), with a validity mask.

    Entries outside ``mask`` are zero: either omega2 - omega1 left the sampled
    range or the field was restricted to a smaller domain.
    """

    values: NDArray[np.complex128]
    grid: Grid
    mask: NDArray[np.bool_]

    def with_values(
        self,
        values: NDArray[np.complex128],
    ) -> "BispectrumField":
        """
        Copy of this field with new values, zeroed outside the mask.

        Args:
            values (NDArray[np.complex128]): The new values.

        Returns:
            BispectrumField: The new field on the same grid and mask.
        """

        return BispectrumField(
            values=np.where(self.mask, values, 0.0),
            grid=self.grid,
            mask=self.mask,
        )

    def restrict(
        self,
        mask: NDArray[np.bool_],
    ) -> "BispectrumField":
        """
        Restrict the field to a smaller domain.

        Args:
            mask (NDArray[np.bool_]): The domain to keep.

        Returns:
            BispectrumField: The field, zero outside ``self.mask & mask``.
        """

        combined: NDArray[np.bool_] = self.mask & mask

        return BispectrumField(
            values=np.where(combined, self.values, 0.0),
            grid=self.grid,
            mask=combined,
        )


FieldLike = TypeVar("FieldLike", BispectrumField, NDArray[np.complex128], NDArray[np.float64])


@lru_cache(maxsize=8)
def _difference_index(grid: Grid) -> tuple[NDArray[np.intp], NDArray[np.bool_]]:
    """Index of omega2 - omega1 for every pair, clipped, and where it is in range."""

    n: int = grid.n_omega

    difference: NDArray[np.intp] = (
        np.arange(n)[None, :] - np.arange(n)[:, None] + grid.center
    )

    valid: NDArray[np.bool_] = (difference >= 0) & (difference < n)

    return np.clip(difference, 0, n - 1), valid


@lru_cache(maxsize=64)
def _interpolation_matrix(
    n: int,
    center: int,
    scale: float,
) -> scipy.sparse.csr_matrix:
    """Sparse linear interpolation of a length-n axis at center + scale * (i - center)."""

    position: NDArray[np.float64] = center + scale * (np.arange(n) - center)

    # Snap rounding noise at the last node
    position = np.where(np.abs(position - (n - 1)) < 1e-9, n - 1, position)

    inside: NDArray[np.bool_] = (position >= 0.0) & (position <= n - 1)

    rows: NDArray[np.intp] = np.flatnonzero(inside)
    lower: NDArray[np.intp] = np.floor(position[rows]).astype(np.intp)
    frac: NDArray[np.float64] = position[rows] - lower

    upper: NDArray[np.intp] = np.minimum(lower + 1, n - 1)

    matrix: scipy.sparse.coo_matrix = scipy.sparse.coo_matrix(
        (
            np.concatenate([1.0 - frac, frac]),
            (np.concatenate([rows, rows]), np.concatenate([lower, upper])),
        ),
        shape=(n, n),
    )

    # Duplicate (row, col) pairs at the last node are summed here
    return matrix.tocsr()


@lru_cache(maxsize=64)
def _gaussian_kernels(width: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Unit-mass Gaussian and moment-normalized derivative kernels, width in nodes."""

    radius: int = max(1, int(math.ceil(4.0 * width)))
    offsets: NDArray[np.float64] = np.arange(-radius, radius + 1, dtype=np.float64)

    phi: NDArray[np.float64] = np.exp(-0.5 * (offsets / width) ** 2)

    smooth: NDArray[np.float64] = phi / phi.sum()

    moment: float = float(np.sum(offsets**2 * phi))

    # Exact on linear functions; falls back to a central difference when phi underflows
    if moment > np.finfo(np.float64).tiny:
        derivative: NDArray[np.float64] = offsets * phi / moment
    else:
        derivative = np.where(np.abs(offsets) == 1.0, offsets / 2.0, 0.0)

    return smooth, derivative


class BispectrumAccumulator:
    """
    Streaming mean (and standard error) of the bispectra of many spectra.
    """

    def __init__(
        self,
        grid: Grid,
        track_variance: bool = False,
    ) -> None:
        """
        Initialize an empty accumulator.

        Args:
            grid (Grid): The grid every spectrum lives on.
            track_variance (bool): Whether to keep second moments for standard errors.

        Returns:
            None
        """

        self.grid: Grid = grid
        self.count: int = 0
        self.track_variance: bool = track_variance

        self._sum: NDArray[np.complex128] = np.zeros(
            (grid.n_omega, grid.n_omega), dtype=np.complex128
        )
        self._sum_sq_re: Optional[NDArray[np.float64]] = None
        self._sum_sq_im: Optional[NDArray[np.float64]] = None

        if track_variance:
            self._sum_sq_re = np.zeros((grid.n_omega, grid.n_omega))
            self._sum_sq_im = np.zeros((grid.n_omega, grid.n_omega))

    def add(
        self,
        spectra: NDArray[np.complex128],
    ) -> None:
        """
        Add the bispectra of a stack of spectra.

        Args:
            spectra (NDArray[np.complex128]): Array of shape (m, n_omega).

        Returns:
            None
        """

        (
            difference,
            _,
        ) = _difference_index(self.grid)

        n: int = self.grid.n_omega
        step: int = max(1, _ASSEMBLY_CHUNK // (n * n))

        for start in range(0, spectra.shape[0], step):
            F: NDArray[np.complex128] = spectra[start : start + step]

            products: NDArray[np.complex128] = (
                F[:, :, None] * np.conj(F[:, None, :]) * F[:, difference]
            )

            self._sum += products.sum(axis=0)

            if self._sum_sq_re is not None and self._sum_sq_im is not None:
                self._sum_sq_re += (products.real**2).sum(axis=0)
                self._sum_sq_im += (products.imag**2).sum(axis=0)

        self.count += int(spectra.shape[0])

    def mean(self) -> BispectrumField:
        """
        The mean bispectrum of everything added so far.

        Returns:
            BispectrumField: The empirical mean, masked where omega2 - omega1 is off-grid.
        """

        if self.count == 0:
            raise ValueError("No spectra have been accumulated")

        (
            _,
            valid,
        ) = _difference_index(self.grid)

        return BispectrumField(
            values=np.where(valid, self._sum / self.count, 0.0),
            grid=self.grid,
            mask=valid.copy(),
        )

    def sem(self) -> NDArray[np.complex128]:
        """
        Standard error of the mean, real and imaginary parts separately.

        Returns:
            NDArray[np.complex128]: sem(Re) + 1j * sem(Im) per entry.
        """

        if self._sum_sq_re is None or self._sum_sq_im is None:
            raise ValueError("Accumulator was created without track_variance")

        if self.count < 2:
            raise ValueError("Standard errors need at least two spectra")

        mean: NDArray[np.complex128] = self._sum / self.count

        # Unbiased sample variances
        var_re = (self._sum_sq_re - self.count * mean.real**2) / (self.count - 1)
        var_im = (self._sum_sq_im - self.count * mean.imag**2) / (self.count - 1)

        return np.sqrt(np.maximum(var_re, 0.0) / self.count) + 1j * np.sqrt(
            np.maximum(var_im, 0.0) / self.count
        )


class SpectraUtils:
    """
    A collection of utility functions for spectra, bispectra and operators on them.
    """

    @classmethod
    def dft_values(
        cls,
        values: NDArray[np.float64],
        grid: Grid,
    ) -> NDArray[np.complex128]:
        """
        Riemann-sum Fourier transform dx * sum_j v_j e^{-i omega_k x_j} along the last axis.

        Args:
            values (NDArray[np.float64]): Real samples, last axis of length n_x.
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.complex128]: Transform on Grid.omega, exactly conjugate symmetric.
        """

        K: int = grid.intervals

        # omega_k x_j = -k pi / 2 + 2 pi k j / (2K), so a length-2K FFT evaluates the sum
        transformed: NDArray[np.complex128] = scipy.fft.rfft(
            np.asarray(values, dtype=np.float64),
            n=2 * K,
            axis=-1,
        )

        positive: NDArray[np.complex128] = (
            grid.dx * transformed * _QUARTER_TURNS[np.arange(K + 1) % 4]
        )

        # Negative frequencies by conjugation, so the symmetry holds bit for bit
        return np.concatenate([np.conj(positive[..., :0:-1]), positive], axis=-1)

    @classmethod
    def dft(
        cls,
        signal: Signal,
        grid: Optional[Grid] = None,
    ) -> Spectrum:
        """
        Fourier transform of a signal on its grid.

        Args:
            signal (Signal): The signal.
            grid (Optional[Grid]): The grid, defaults to the signal's own.

        Returns:
            Spectrum: The transform on Grid.omega.
        """

        grid = grid or signal.grid

        return Spectrum(values=cls.dft_values(values=signal.values, grid=grid), grid=grid)

    @classmethod
    def idft_values(
        cls,
        values: NDArray[np.complex128],
        grid: Grid,
    ) -> NDArray[np.float64]:
        """
        Exact inverse of dft_values on the grid, along the last axis.

        The frequency sum uses half weights at +-omega_max, which makes the
        discrete kernel a Kronecker delta on the spatial nodes.

        Args:
            values (NDArray[np.complex128]): Conjugate-symmetric samples on Grid.omega.
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.float64]: Real samples on Grid.x.
        """

        K: int = grid.intervals

        weights: NDArray[np.float64] = np.ones(grid.n_omega)
        weights[[0, -1]] = 0.5

        k: NDArray[np.intp] = np.arange(-K, K + 1)

        weighted: NDArray[np.complex128] = (
            np.asarray(values) * weights * np.conj(_QUARTER_TURNS[k % 4])
        )

        folded: NDArray[np.complex128] = np.zeros(
            weighted.shape[:-1] + (2 * K,), dtype=np.complex128
        )

        # k >= 0 land on 0..K, -K < k < 0 on K+1..2K-1, and k = -K folds onto K
        folded[..., : K + 1] += weighted[..., K:]
        folded[..., K + 1 :] += weighted[..., 1:K]
        folded[..., K] += weighted[..., 0]

        samples: NDArray[np.complex128] = scipy.fft.ifft(folded, axis=-1)[..., : K + 1]

        scale: float = float(np.max(np.abs(samples))) or 1.0
        residue: float = float(np.max(np.abs(samples.imag))) / scale

        if residue > 1e-8:
            logger.debug("Inverse transform discarded imaginary residue %.3e", residue)

        return samples.real / grid.dx

    @classmethod
    def idft(
        cls,
        spectrum: Spectrum,
    ) -> Signal:
        """
        Inverse transform of a conjugate-symmetric spectrum back to a real signal.

        Args:
            spectrum (Spectrum): The spectrum.

        Returns:
            Signal: The real samples on Grid.x.
        """

        return Signal(
            values=cls.idft_values(values=spectrum.values, grid=spectrum.grid),
            grid=spectrum.grid,
        )

    @classmethod
    def power_spectrum(
        cls,
        spectrum: Spectrum,
    ) -> NDArray[np.float64]:
        """
        Squared modulus of a spectrum.

        Args:
            spectrum (Spectrum): The spectrum.

        Returns:
            NDArray[np.float64]: |S(omega)|^2 on Grid.omega.
        """

        return np.abs(spectrum.values) ** 2

    @classmethod
    def difference_index(
        cls,
        grid: Grid,
    ) -> tuple[NDArray[np.intp], NDArray[np.bool_]]:
        """
        Row-column index of omega2 - omega1 for every frequency pair.

        Args:
            grid (Grid): The sampling grid.

        Returns:
            tuple[NDArray[np.intp], NDArray[np.bool_]]: The clipped index and where it is on the grid.
        """

        return _difference_index(grid)

    @classmethod
    def validity_mask(
        cls,
        grid: Grid,
    ) -> NDArray[np.bool_]:
        """
        Pairs (omega1, omega2) whose difference omega2 - omega1 lies on the grid.

        Args:
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.bool_]: The validity mask.
        """

        return _difference_index(grid)[1].copy()

    @classmethod
    def bispectrum(
        cls,
        spectrum: Spectrum,
    ) -> BispectrumField:
        """
        Bispectrum B(omega1, omega2) = S(omega1) S*(omega2) S(omega2 - omega1).

        Args:
            spectrum (Spectrum): The spectrum.

        Returns:
            BispectrumField: The bispectrum, zero where omega2 - omega1 is off-grid.
        """

        (
            difference,
            valid,
        ) = _difference_index(spectrum.grid)

        F: NDArray[np.complex128] = spectrum.values

        values: NDArray[np.complex128] = F[:, None] * np.conj(F)[None, :] * F[difference]

        return BispectrumField(
            values=np.where(valid, values, 0.0),
            grid=spectrum.grid,
            mask=valid.copy(),
        )

    @classmethod
    def _check_scale(
        cls,
        C: float,
    ) -> None:
        # Check if the dilated arguments stay inside the grid
        if not 0.0 < C <= 1.0:
            raise ValueError(f"Dilation constant must lie in (0, 1], got {C}")

    @classmethod
    def _unwrap(
        cls,
        field: Union[BispectrumField, NDArray],
    ) -> NDArray:
        return field.values if isinstance(field, BispectrumField) else np.asarray(field)

    @classmethod
    def _rewrap(
        cls,
        field: FieldLike,
        values: NDArray,
    ) -> FieldLike:
        if isinstance(field, BispectrumField):
            return field.with_values(values=values)

        return values

    @classmethod
    def dilation_matrix(
        cls,
        grid: Grid,
        C: float,
    ) -> scipy.sparse.csr_matrix:
        """
        Sparse matrix of linear interpolation at C * omega along one frequency axis.

        Args:
            grid (Grid): The sampling grid.
            C (float): The dilation constant.

        Returns:
            scipy.sparse.csr_matrix: An (n_omega, n_omega) interpolation matrix.
        """

        return _interpolation_matrix(grid.n_omega, grid.center, float(C))

    @classmethod
    def dilate_field(
        cls,
        field: FieldLike,
        C: float,
        degree: int,
        grid: Optional[Grid] = None,
    ) -> FieldLike:
        """
        Dilation operator L_C g(omega) = C^degree g(C omega).

        Args:
            field (FieldLike): A 2D bispectrum field or a 1D power-spectrum vector.
            C (float): The dilation constant in (0, 1].
            degree (int): 4 for bispectrum fields, 3 for power spectra.
            grid (Optional[Grid]): The grid, required for plain arrays.

        Returns:
            FieldLike: The dilated field, same kind as the input.
        """

        cls._check_scale(C=C)

        values: NDArray = cls._unwrap(field=field)
        grid = cls._grid_of(field=field, grid=grid)

        P: scipy.sparse.csr_matrix = cls.dilation_matrix(grid=grid, C=C)

        if values.ndim == 1:
            dilated: NDArray = P @ values
        else:
            # P G P^T, one axis at a time
            dilated = (P @ (P @ values).T).T

        return cls._rewrap(field=field, values=C**degree * dilated)

    @classmethod
    def dilate_adjoint(
        cls,
        field: FieldLike,
        C: float,
        degree: int,
        grid: Optional[Grid] = None,
    ) -> FieldLike:
        """
        Adjoint of dilate_field under the grid inner product.

        This is the exact transpose of the interpolation, which acts like
        C^(degree-2) h(omega / C) on 2D fields and C^(degree-1) h(omega / C) on
        vectors, with zero where omega / C leaves the grid.

        Args:
            field (FieldLike): A 2D bispectrum field or a 1D power-spectrum vector.
            C (float): The dilation constant in (0, 1].
            degree (int): 4 for bispectrum fields, 3 for power spectra.
            grid (Optional[Grid]): The grid, required for plain arrays.

        Returns:
            FieldLike: The adjoint applied to the field.
        """

        cls._check_scale(C=C)

        values: NDArray = cls._unwrap(field=field)
        grid = cls._grid_of(field=field, grid=grid)

        Pt: scipy.sparse.csc_matrix = cls.dilation_matrix(grid=grid, C=C).T

        if values.ndim == 1:
            adjoint: NDArray = Pt @ values
        else:
            adjoint = (Pt @ (Pt @ values).T).T

        return cls._rewrap(field=field, values=C**degree * adjoint)

    @classmethod
    def _grid_of(
        cls,
        field: Union[BispectrumField, NDArray],
        grid: Optional[Grid],
    ) -> Grid:
        if isinstance(field, BispectrumField):
            return field.grid

        if grid is None:
            raise ValueError("A grid is required when operating on plain arrays")

        return grid

    @classmethod
    def euler_radial_derivative(
        cls,
        field: FieldLike,
        grid: Optional[Grid] = None,
    ) -> FieldLike:
        """
        r d/dr of a field, written as omega . grad in Cartesian coordinates.

        Central differences in the interior, second-order one-sided differences at the edges.

        Args:
            field (FieldLike): A 2D field or a 1D vector on Grid.omega.
            grid (Optional[Grid]): The grid, required for plain arrays.

        Returns:
            FieldLike: The Euler derivative, zero at the origin.
        """

        values: NDArray = cls._unwrap(field=field)
        grid = cls._grid_of(field=field, grid=grid)

        omega: NDArray[np.float64] = grid.omega

        if values.ndim == 1:
            return cls._rewrap(
                field=field,
                values=omega * np.gradient(values, grid.d_omega, edge_order=2),
            )

        (
            d1,
            d2,
        ) = np.gradient(values, grid.d_omega, edge_order=2)

        return cls._rewrap(
            field=field,
            values=omega[:, None] * d1 + omega[None, :] * d2,
        )

    @classmethod
    def _correlate(
        cls,
        values: NDArray,
        weights: NDArray[np.float64],
        axis: int,
    ) -> NDArray:
        # ndimage filters are real-valued
        if np.iscomplexobj(values):
            return scipy.ndimage.correlate1d(
                values.real, weights, axis=axis, mode="nearest"
            ) + 1j * scipy.ndimage.correlate1d(
                values.imag, weights, axis=axis, mode="nearest"
            )

        return scipy.ndimage.correlate1d(values, weights, axis=axis, mode="nearest")

    @classmethod
    def gaussian_smooth(
        cls,
        field: FieldLike,
        L: float,
        grid: Optional[Grid] = None,
    ) -> FieldLike:
        """
        Convolution with a unit-mass isotropic Gaussian of standard deviation L.

        Args:
            field (FieldLike): A 2D field or a 1D vector on Grid.omega.
            L (float): The Gaussian width in frequency units, positive.
            grid (Optional[Grid]): The grid, required for plain arrays.

        Returns:
            FieldLike: The smoothed field; constants are fixed points.
        """

        if L <= 0.0:
            raise ValueError(f"Smoothing width must be positive, got {L}")

        values: NDArray = cls._unwrap(field=field)
        grid = cls._grid_of(field=field, grid=grid)

        (
            smooth,
            _,
        ) = _gaussian_kernels(L / grid.d_omega)

        smoothed: NDArray = values

        for axis in range(values.ndim):
            smoothed = cls._correlate(values=smoothed, weights=smooth, axis=axis)

        return cls._rewrap(field=field, values=smoothed)

    @classmethod
    def smoothed_data_term(
        cls,
        field: FieldLike,
        L: float,
        grid: Optional[Grid] = None,
    ) -> FieldLike:
        """
        Empirical data term 4 (g * phi_L) + r (g * d_r phi_L), or 3 (q * phi_L) + omega (q * phi_L)' in 1D.

        The radial term is omega1 (g * d1 phi_L) + omega2 (g * d2 phi_L), so no
        finite difference ever touches the noisy field.

        Args:
            field (FieldLike): A 2D bispectrum field or a 1D power-spectrum vector.
            L (float): The Gaussian width in frequency units, positive.
            grid (Optional[Grid]): The grid, required for plain arrays.

        Returns:
            FieldLike: The data term.
        """

        if L <= 0.0:
            raise ValueError(f"Smoothing width must be positive, got {L}")

        values: NDArray = cls._unwrap(field=field)
        grid = cls._grid_of(field=field, grid=grid)

        (
            smooth,
            derivative,
        ) = _gaussian_kernels(L / grid.d_omega)

        derivative = derivative / grid.d_omega
        omega: NDArray[np.float64] = grid.omega

        if values.ndim == 1:
            return cls._rewrap(
                field=field,
                values=3.0 * cls._correlate(values=values, weights=smooth, axis=0)
                + omega * cls._correlate(values=values, weights=derivative, axis=0),
            )

        # Smooth along each axis once, then finish with either kernel on the other
        along_0: NDArray = cls._correlate(values=values, weights=smooth, axis=0)
        along_1: NDArray = cls._correlate(values=values, weights=smooth, axis=1)

        smoothed: NDArray = cls._correlate(values=along_0, weights=smooth, axis=1)
        d1: NDArray = cls._correlate(values=along_1, weights=derivative, axis=0)
        d2: NDArray = cls._correlate(values=along_0, weights=derivative, axis=1)

        return cls._rewrap(
            field=field,
            values=4.0 * smoothed + omega[:, None] * d1 + omega[None, :] * d2,
        )

    @classmethod
    def grid_inner(
        cls,
        a: Union[BispectrumField, NDArray],
        b: Union[BispectrumField, NDArray],
        grid: Grid,
    ) -> complex:
        """
        Grid quadrature of the inner product <a, b> = integral a conj(b).

        Args:
            a (Union[BispectrumField, NDArray]): The first field.
            b (Union[BispectrumField, NDArray]): The second field.
            grid (Grid): The grid both live on.

        Returns:
            complex: The inner product.
        """

        values_a: NDArray = cls._unwrap(field=a)
        values_b: NDArray = cls._unwrap(field=b)

        return complex(grid.d_omega**values_a.ndim * np.sum(values_a * np.conj(values_b)))

    @classmethod
    def relative_error(
        cls,
        reference: Union[BispectrumField, NDArray],
        estimate: Union[BispectrumField, NDArray],
        mask: Optional[NDArray[np.bool_]] = None,
    ) -> float:
        """
        Relative L2 error ||reference - estimate|| / ||reference|| on a domain.

        Args:
            reference (Union[BispectrumField, NDArray]): The ground truth.
            estimate (Union[BispectrumField, NDArray]): The estimate.
            mask (Optional[NDArray[np.bool_]]): The domain, everything by default.

        Returns:
            float: The relative error.
        """

        truth: NDArray = cls._unwrap(field=reference)
        guess: NDArray = cls._unwrap(field=estimate)

        if mask is None:
            mask = np.ones(truth.shape, dtype=bool)

        norm: float = float(np.linalg.norm(truth[mask]))

        if norm == 0.0:
            raise ValueError("Reference has zero norm on the domain")

        return float(np.linalg.norm((truth - guess)[mask])) / norm
