"""
Author: Louis Goodnews
Date: 2025-09-15

Brute-force references: direct transforms at arbitrary frequencies,
Gauss-Legendre averages over the dilation law, Neumann series for
(I - L_C0)^-1 and closed-form Gaussian spectra.

Nothing here calls the FFT transforms, the sparse dilation matrices or the
smoothing kernels of the estimators; only the Grid is shared.
"""

import logging
import math

from typing import Final, Optional, Union

import numpy as np
import scipy.interpolate

from numpy.typing import ArrayLike, NDArray

from .constants import QUADRATURE_NODES
from .signal_model import Grid, ModelParams, SignalModelUtils, dilation_constants
from .spectra import BispectrumField, Spectrum


__all__: Final[list[str]] = ["OracleUtils"]


logger: Final[logging.Logger] = logging.getLogger(__name__)

_MIN_NODES: Final[int] = 64


class OracleUtils:
    """
    A collection of reference computations used to validate the estimators.
    """

    @classmethod
    def dtft_at(
        cls,
        values: NDArray[np.float64],
        grid: Grid,
        frequencies: ArrayLike,
        derivative: bool = False,
    ) -> NDArray[np.complex128]:
        """
        Riemann sum dx sum_j v_j e^{-i nu x_j} at arbitrary frequencies, by direct summation.

        Args:
            values (NDArray[np.float64]): Samples on Grid.x.
            grid (Grid): The sampling grid.
            frequencies (ArrayLike): Frequencies nu, any shape.
            derivative (bool): Return d/dnu instead, dx sum_j (-i x_j) v_j e^{-i nu x_j}.

        Returns:
            NDArray[np.complex128]: The transform, same shape as the frequencies.
        """

        nu: NDArray[np.float64] = np.asarray(frequencies, dtype=np.float64)

        weights: NDArray[np.complex128] = grid.dx * np.asarray(values, dtype=np.complex128)

        if derivative:
            weights = weights * (-1j * grid.x)

        return np.exp(-1j * np.multiply.outer(nu, grid.x)) @ weights

    @classmethod
    def _difference(
        cls,
        grid: Grid,
    ) -> tuple[NDArray[np.intp], NDArray[np.bool_]]:
        n: int = grid.n_omega

        index: NDArray[np.intp] = np.subtract.outer(np.arange(n), np.arange(n)).T + grid.center
        valid: NDArray[np.bool_] = (index >= 0) & (index < n)

        return np.where(valid, index, 0), valid

    @classmethod
    def _check_nodes(
        cls,
        nodes: int,
    ) -> None:
        if nodes < _MIN_NODES:
            raise ValueError(f"Quadrature needs at least {_MIN_NODES} nodes, got {nodes}")

    @classmethod
    def _dilation_rule(
        cls,
        eta: float,
        nodes: int,
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Scales s = 1 - tau and probability weights for tau uniform on [-sqrt(3) eta, sqrt(3) eta]."""

        (
            xi,
            w,
        ) = np.polynomial.legendre.leggauss(nodes)

        return 1.0 - math.sqrt(3.0) * eta * xi, 0.5 * w

    @classmethod
    def _hidden(
        cls,
        signal_id: str,
        grid: Grid,
        amplitude: Optional[float],
    ) -> NDArray[np.float64]:
        params: ModelParams = ModelParams(
            signal_id=signal_id,
            amplitude=(
                amplitude
                if amplitude is not None
                else SignalModelUtils.calibrate_amplitude(signal_id=signal_id, grid=grid)
            ),
            sigma=0.0,
            eta=0.0,
        )

        return SignalModelUtils.sample_hidden(params=params, grid=grid).values

    @classmethod
    def exact_bispectrum(
        cls,
        signal_id: str,
        grid: Grid,
        amplitude: Optional[float] = None,
    ) -> BispectrumField:
        """
        Bispectrum of the sampled hidden signal by direct summation.

        Args:
            signal_id (str): The test signal.
            grid (Grid): The sampling grid.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            BispectrumField: Bf on the grid.
        """

        F: NDArray[np.complex128] = cls.dtft_at(
            values=cls._hidden(signal_id=signal_id, grid=grid, amplitude=amplitude),
            grid=grid,
            frequencies=grid.omega,
        )

        (
            index,
            valid,
        ) = cls._difference(grid=grid)

        return BispectrumField(
            values=np.where(valid, np.outer(F, np.conj(F)) * F[index], 0.0),
            grid=grid,
            mask=valid,
        )

    @classmethod
    def exact_power(
        cls,
        signal_id: str,
        grid: Grid,
        amplitude: Optional[float] = None,
    ) -> NDArray[np.float64]:
        """Power spectrum |f_hat|^2 of the sampled hidden signal by direct summation."""

        F: NDArray[np.complex128] = cls.dtft_at(
            values=cls._hidden(signal_id=signal_id, grid=grid, amplitude=amplitude),
            grid=grid,
            frequencies=grid.omega,
        )

        return np.abs(F) ** 2

    @classmethod
    def quadrature_g_eta(
        cls,
        signal_id: str,
        eta: float,
        grid: Grid,
        nodes: int = QUADRATURE_NODES,
        amplitude: Optional[float] = None,
    ) -> BispectrumField:
        """
        Infinite-sample mean bispectrum E[s^3 Bf(s omega1, s omega2)], s = 1 - tau.

        Args:
            signal_id (str): The test signal.
            eta (float): The dilation scale.
            grid (Grid): The sampling grid.
            nodes (int): Gauss-Legendre nodes, at least 64. Defaults to 128.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            BispectrumField: g_eta on the grid.
        """

        cls._check_nodes(nodes=nodes)

        hidden: NDArray[np.float64] = cls._hidden(
            signal_id=signal_id, grid=grid, amplitude=amplitude
        )

        (
            index,
            valid,
        ) = cls._difference(grid=grid)

        total: NDArray[np.complex128] = np.zeros(valid.shape, dtype=np.complex128)

        for scale, weight in zip(*cls._dilation_rule(eta=eta, nodes=nodes)):
            # s (omega2 - omega1) is the scaled grid node at the difference index
            F: NDArray[np.complex128] = cls.dtft_at(
                values=hidden, grid=grid, frequencies=scale * grid.omega
            )

            total += weight * scale**3 * (np.outer(F, np.conj(F)) * F[index])

        return BispectrumField(
            values=np.where(valid, total, 0.0),
            grid=grid,
            mask=valid,
        )

    @classmethod
    def exact_data_term(
        cls,
        signal_id: str,
        eta: float,
        grid: Grid,
        scale: float = 1.0,
        nodes: int = QUADRATURE_NODES,
        amplitude: Optional[float] = None,
    ) -> BispectrumField:
        """
        4 g_eta + r d_r g_eta at scale * omega, from analytic derivatives of the transform.

        r d_r of Bf(a, b) = F(a) F*(b) F(b - a) is
        a F'(a) F*(b) F(b - a) + b F(a) F'*(b) F(b - a) + (b - a) F(a) F*(b) F'(b - a).

        Args:
            signal_id (str): The test signal.
            eta (float): The dilation scale.
            grid (Grid): The sampling grid.
            scale (float): Evaluate at scale * omega. Defaults to 1.
            nodes (int): Gauss-Legendre nodes. Defaults to 128.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            BispectrumField: The data term.
        """

        cls._check_nodes(nodes=nodes)

        hidden: NDArray[np.float64] = cls._hidden(
            signal_id=signal_id, grid=grid, amplitude=amplitude
        )

        (
            index,
            valid,
        ) = cls._difference(grid=grid)

        total: NDArray[np.complex128] = np.zeros(valid.shape, dtype=np.complex128)

        for s, weight in zip(*cls._dilation_rule(eta=eta, nodes=nodes)):
            nu: NDArray[np.float64] = s * scale * grid.omega

            F: NDArray[np.complex128] = cls.dtft_at(values=hidden, grid=grid, frequencies=nu)
            dF: NDArray[np.complex128] = cls.dtft_at(
                values=hidden, grid=grid, frequencies=nu, derivative=True
            )

            Fa: NDArray[np.complex128] = F[:, None]
            Fb: NDArray[np.complex128] = np.conj(F)[None, :]
            Fd: NDArray[np.complex128] = F[index]

            bispectrum = Fa * Fb * Fd

            euler = (
                (nu * dF)[:, None] * Fb * Fd
                + Fa * (nu * np.conj(dF))[None, :] * Fd
                + Fa * Fb * (nu * dF)[index]
            )

            total += weight * s**3 * (4.0 * bispectrum + euler)

        return BispectrumField(
            values=np.where(valid, total, 0.0),
            grid=grid,
            mask=valid,
        )

    @classmethod
    def quadrature_power(
        cls,
        signal_id: str,
        eta: float,
        grid: Grid,
        nodes: int = QUADRATURE_NODES,
        amplitude: Optional[float] = None,
    ) -> NDArray[np.float64]:
        """
        Infinite-sample mean power spectrum E[s^2 |f_hat(s omega)|^2].

        Args:
            signal_id (str): The test signal.
            eta (float): The dilation scale.
            grid (Grid): The sampling grid.
            nodes (int): Gauss-Legendre nodes. Defaults to 128.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            NDArray[np.float64]: q_eta on the grid.
        """

        cls._check_nodes(nodes=nodes)

        hidden: NDArray[np.float64] = cls._hidden(
            signal_id=signal_id, grid=grid, amplitude=amplitude
        )

        (
            scales,
            weights,
        ) = cls._dilation_rule(eta=eta, nodes=nodes)

        total: NDArray[np.float64] = np.zeros(grid.n_omega)

        for s, weight in zip(scales, weights):
            F: NDArray[np.complex128] = cls.dtft_at(
                values=hidden, grid=grid, frequencies=s * grid.omega
            )

            total += weight * s**2 * np.abs(F) ** 2

        return total

    @classmethod
    def quadrature_power_data_term(
        cls,
        signal_id: str,
        eta: float,
        grid: Grid,
        scale: float = 1.0,
        nodes: int = QUADRATURE_NODES,
        amplitude: Optional[float] = None,
    ) -> NDArray[np.float64]:
        """
        3 q_eta + omega q_eta' at scale * omega, analytically.

        Args:
            signal_id (str): The test signal.
            eta (float): The dilation scale.
            grid (Grid): The sampling grid.
            scale (float): Evaluate at scale * omega. Defaults to 1.
            nodes (int): Gauss-Legendre nodes. Defaults to 128.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            NDArray[np.float64]: The 1D data term.
        """

        cls._check_nodes(nodes=nodes)

        hidden: NDArray[np.float64] = cls._hidden(
            signal_id=signal_id, grid=grid, amplitude=amplitude
        )

        (
            scales,
            weights,
        ) = cls._dilation_rule(eta=eta, nodes=nodes)

        total: NDArray[np.float64] = np.zeros(grid.n_omega)

        for s, weight in zip(scales, weights):
            nu: NDArray[np.float64] = s * scale * grid.omega

            F: NDArray[np.complex128] = cls.dtft_at(values=hidden, grid=grid, frequencies=nu)
            dF: NDArray[np.complex128] = cls.dtft_at(
                values=hidden, grid=grid, frequencies=nu, derivative=True
            )

            # nu d/dnu |F|^2 = 2 nu Re(F' conj(F))
            total += weight * s**2 * (
                3.0 * np.abs(F) ** 2 + 2.0 * nu * np.real(dF * np.conj(F))
            )

        return total

    @classmethod
    def _interpolator_step(
        cls,
        values: NDArray,
        grid: Grid,
        C0: float,
        degree: int,
    ) -> NDArray:
        """One application of L_C0 by linear RegularGridInterpolator lookups."""

        axes: tuple[NDArray[np.float64], ...] = (grid.omega,) * values.ndim

        if values.ndim == 1:
            points: NDArray[np.float64] = (C0 * grid.omega)[:, None]
        else:
            mesh: list[NDArray[np.float64]] = np.meshgrid(
                C0 * grid.omega, C0 * grid.omega, indexing="ij"
            )
            points = np.stack([axis.ravel() for axis in mesh], axis=-1)

        def _lookup(part: NDArray[np.float64]) -> NDArray[np.float64]:
            interpolator = scipy.interpolate.RegularGridInterpolator(
                axes,
                part,
                method="linear",
                bounds_error=False,
                fill_value=0.0,
            )

            return interpolator(points).reshape(values.shape)

        stepped: NDArray = _lookup(np.real(values))

        if np.iscomplexobj(values):
            stepped = stepped + 1j * _lookup(np.imag(values))

        return C0**degree * stepped

    @classmethod
    def neumann_inverse(
        cls,
        field: Union[BispectrumField, NDArray],
        C0: float,
        degree: int,
        grid: Optional[Grid] = None,
        kmax: int = 500,
        tol: float = 1e-14,
    ) -> Union[BispectrumField, NDArray]:
        """
        sum_k L_C0^k applied to a field, truncated once a term falls below tol ||field||.

        Args:
            field (Union[BispectrumField, NDArray]): A bispectrum field or a power vector.
            C0 (float): The contraction constant in (0, 1).
            degree (int): 4 for bispectra, 3 for power spectra.
            grid (Optional[Grid]): The grid, required for plain arrays.
            kmax (int): The last power of L_C0 included. Defaults to 500.
            tol (float): Relative truncation threshold. Defaults to 1e-14.

        Returns:
            Union[BispectrumField, NDArray]: (I - L_C0)^-1 applied to the field.
        """

        if not 0.0 < C0 < 1.0:
            raise ValueError(f"C0 must lie in (0, 1), got {C0}")

        if isinstance(field, BispectrumField):
            values: NDArray = field.values
            grid = field.grid
        elif grid is None:
            raise ValueError("A grid is required when operating on plain arrays")
        else:
            values = np.asarray(field)

        scale: float = float(np.linalg.norm(values))

        total: NDArray = values.copy()
        term: NDArray = values

        for k in range(1, kmax + 1):
            term = cls._interpolator_step(values=term, grid=grid, C0=C0, degree=degree)
            total = total + term

            if float(np.linalg.norm(term)) <= tol * scale:
                logger.debug("Neumann series truncated after %d terms", k)
                break

        if isinstance(field, BispectrumField):
            return field.with_values(values=total)

        return total

    @classmethod
    def infinite_sample_recovery(
        cls,
        signal_id: str,
        eta: float,
        grid: Grid,
        nodes: int = QUADRATURE_NODES,
        amplitude: Optional[float] = None,
    ) -> BispectrumField:
        """
        Bf = (I - L_C0)^-1 C1 L_C2 (4 g_eta + r d_r g_eta) from infinitely many observations.

        Args:
            signal_id (str): The test signal.
            eta (float): The dilation scale in (0, 12^-1/2].
            grid (Grid): The sampling grid.
            nodes (int): Gauss-Legendre nodes. Defaults to 128.
            amplitude (Optional[float]): The amplitude, calibrated by default.

        Returns:
            BispectrumField: The recovered bispectrum on the validity mask.
        """

        (
            C0,
            C1,
            C2,
        ) = dilation_constants(eta=eta)

        data: BispectrumField = cls.exact_data_term(
            signal_id=signal_id,
            eta=eta,
            grid=grid,
            scale=C2,
            nodes=nodes,
            amplitude=amplitude,
        )

        rhs: BispectrumField = data.with_values(values=C1 * C2**4 * data.values)

        return cls.neumann_inverse(field=rhs, C0=C0, degree=4)

    @classmethod
    def gaussian_reference_spectra(
        cls,
        width: float,
        grid: Grid,
    ) -> tuple[Spectrum, NDArray[np.float64], BispectrumField]:
        """
        Closed-form spectra of f(x) = exp(-a x^2).

        f_hat(w) = sqrt(pi / a) exp(-w^2 / 4a), so Pf(w) = (pi / a) exp(-w^2 / 2a) and
        Bf(w1, w2) = (pi / a)^(3/2) exp(-(w1^2 + w2^2 + (w2 - w1)^2) / 4a).

        Args:
            width (float): The Gaussian parameter a > 0.
            grid (Grid): The sampling grid.

        Returns:
            tuple[Spectrum, NDArray[np.float64], BispectrumField]: f_hat, Pf and Bf.
        """

        if width <= 0.0:
            raise ValueError(f"Gaussian parameter must be positive, got {width}")

        omega: NDArray[np.float64] = grid.omega

        transform: NDArray[np.float64] = math.sqrt(math.pi / width) * np.exp(
            -(omega**2) / (4.0 * width)
        )

        (
            _,
            valid,
        ) = cls._difference(grid=grid)

        w1: NDArray[np.float64] = omega[:, None]
        w2: NDArray[np.float64] = omega[None, :]

        bispectrum: NDArray[np.float64] = (math.pi / width) ** 1.5 * np.exp(
            -(w1**2 + w2**2 + (w2 - w1) ** 2) / (4.0 * width)
        )

        return (
            Spectrum(values=transform.astype(np.complex128), grid=grid),
            (math.pi / width) * np.exp(-(omega**2) / (2.0 * width)),
            BispectrumField(
                values=np.where(valid, bispectrum, 0.0).astype(np.complex128),
                grid=grid,
                mask=valid,
            ),
        )

    @classmethod
    def noise_moment(
        cls,
        sigma: float,
        grid: Grid,
        order: int,
        draws: int,
        seed: int,
    ) -> NDArray[np.float64]:
        """
        Monte Carlo E|eps_hat(omega)|^order for white noise at level sigma.

        Args:
            sigma (float): The noise level.
            grid (Grid): The sampling grid.
            order (int): The moment order.
            draws (int): Number of noise realizations.
            seed (int): Seed of the generator.

        Returns:
            NDArray[np.float64]: The moment at every grid frequency.
        """

        rng: np.random.Generator = np.random.default_rng(seed)

        noise: NDArray[np.float64] = (
            rng.standard_normal((draws, grid.n_x))
            * (sigma / math.sqrt(grid.dx))
            * grid.noise_nodes
        )

        basis: NDArray[np.complex128] = grid.dx * np.exp(-1j * np.outer(grid.x, grid.omega))

        return np.mean(np.abs(noise @ basis) ** order, axis=0)
