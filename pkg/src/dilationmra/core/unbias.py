"""
Author: Louis Goodnews
Date: 2025-09-15

Moment accumulation, additive-noise centering and the dilation unbiasing
program (I - L_C0) g = C1 L_C2 d for bispectra and power spectra.
"""

import logging

from dataclasses import dataclass
from typing import Callable, Final, Literal, Optional, Union

import numpy as np
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from .constants import CG_MAX_ITERS, CG_RESIDUAL_TOL, ETA_MAX, SMOOTHING_PREFACTOR
from .exceptions import InvalidEtaError, NonConvergenceError
from .signal_model import (
    Grid,
    ModelParams,
    ObservationBatch,
    SignalModelUtils,
    dilation_constants,
)
from .spectra import BispectrumAccumulator, BispectrumField, SpectraUtils, Spectrum


__all__: Final[list[str]] = [
    "CenteredMoments",
    "MomentAccumulator",
    "SolverConfig",
    "UnbiasUtils",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


OmegaSelector = Literal["disc", "square", "valid"]


class SolverConfig(BaseModel):
    """
    Settings of the unbiasing solvers.

    ``L`` is the smoothing width in frequency units; when left unset the
    callers fall back to 5 sigma M^(-1/6), or dx without noise.
    """

    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(default=CG_MAX_ITERS, ge=1)
    residual_tol: float = Field(default=CG_RESIDUAL_TOL, gt=0.0)
    L: Optional[float] = Field(default=None, gt=0.0)
    omega_mask: OmegaSelector = "disc"


@dataclass(frozen=True, eq=False)
class CenteredMoments:
    """
    Empirical moments of a batch after the additive-noise terms were removed.
    """

    mean_bispectrum: Optional[BispectrumField]
    mean_power: NDArray[np.float64]
    mean_ft: Spectrum
    M: int
    sigma: float
    bispectrum_sem: Optional[NDArray[np.complex128]] = None


class MomentAccumulator:
    """
    Streams observations into raw first, second and third order moments.
    """

    def __init__(
        self,
        grid: Grid,
        bispectrum: bool = True,
        track_variance: bool = False,
    ) -> None:
        """
        Initialize an empty accumulator.

        Args:
            grid (Grid): The sampling grid.
            bispectrum (bool): Whether to accumulate the bispectrum. Defaults to True.
            track_variance (bool): Whether to keep bispectrum standard errors.

        Returns:
            None
        """

        self.grid: Grid = grid
        self.count: int = 0

        self._sum_ft: NDArray[np.complex128] = np.zeros(grid.n_omega, dtype=np.complex128)
        self._sum_power: NDArray[np.float64] = np.zeros(grid.n_omega)

        self._bispectrum: Optional[BispectrumAccumulator] = (
            BispectrumAccumulator(grid=grid, track_variance=track_variance)
            if bispectrum
            else None
        )

    def add_spectra(
        self,
        spectra: NDArray[np.complex128],
    ) -> None:
        """
        Add a stack of observation spectra of shape (m, n_omega).

        Args:
            spectra (NDArray[np.complex128]): The spectra.

        Returns:
            None
        """

        self._sum_ft += spectra.sum(axis=0)
        self._sum_power += (np.abs(spectra) ** 2).sum(axis=0)

        if self._bispectrum is not None:
            self._bispectrum.add(spectra=spectra)

        self.count += int(spectra.shape[0])

    def add_batch(
        self,
        batch: ObservationBatch,
    ) -> None:
        """
        Transform and add a batch of observations.

        Args:
            batch (ObservationBatch): The observations.

        Returns:
            None
        """

        self.add_spectra(spectra=SpectraUtils.dft_values(values=batch.values, grid=self.grid))

    def mean_ft(self) -> Spectrum:
        self._check_nonempty()

        return Spectrum(values=self._sum_ft / self.count, grid=self.grid)

    def mean_power(self) -> NDArray[np.float64]:
        self._check_nonempty()

        return self._sum_power / self.count

    def mean_bispectrum(self) -> Optional[BispectrumField]:
        if self._bispectrum is None:
            return None

        return self._bispectrum.mean()

    def _check_nonempty(self) -> None:
        if self.count == 0:
            raise ValueError("No observations have been accumulated")

    def centered(
        self,
        sigma: float,
    ) -> CenteredMoments:
        """
        Remove the additive-noise contributions at noise level sigma.

        Args:
            sigma (float): The (true or estimated) noise level.

        Returns:
            CenteredMoments: The centered moments.
        """

        mean_ft: Spectrum = self.mean_ft()
        raw_bispectrum: Optional[BispectrumField] = self.mean_bispectrum()

        sem: Optional[NDArray[np.complex128]] = None

        if (
            self._bispectrum is not None
            and self._bispectrum.track_variance
            and self.count > 1
        ):
            sem = self._bispectrum.sem()

        return CenteredMoments(
            mean_bispectrum=(
                None
                if raw_bispectrum is None
                else UnbiasUtils.center_bispectrum(
                    batch_bispectra_mean=raw_bispectrum,
                    mu_tilde=mean_ft,
                    sigma=sigma,
                    grid=self.grid,
                )
            ),
            mean_power=UnbiasUtils.center_power(
                mean_power=self.mean_power(),
                sigma=sigma,
                grid=self.grid,
            ),
            mean_ft=mean_ft,
            M=self.count,
            sigma=sigma,
            bispectrum_sem=sem,
        )


class UnbiasUtils:
    """
    A collection of utility functions for centering and unbiasing empirical moments.
    """

    @classmethod
    def accumulate(
        cls,
        params: ModelParams,
        grid: Grid,
        M: int,
        seed: int,
        bispectrum: bool = True,
        track_variance: bool = False,
        chunk_size: int = 1024,
    ) -> MomentAccumulator:
        """
        Synthesize a batch chunk by chunk and accumulate its moments.

        Args:
            params (ModelParams): The model parameters.
            grid (Grid): The sampling grid.
            M (int): The number of observations.
            seed (int): The batch seed.
            bispectrum (bool): Whether to accumulate the bispectrum. Defaults to True.
            track_variance (bool): Whether to keep bispectrum standard errors.
            chunk_size (int): Observations per chunk. Defaults to 1024.

        Returns:
            MomentAccumulator: The filled accumulator.
        """

        accumulator: MomentAccumulator = MomentAccumulator(
            grid=grid,
            bispectrum=bispectrum,
            track_variance=track_variance,
        )

        for batch in SignalModelUtils.stream_batches(
            params=params,
            grid=grid,
            M=M,
            seed=seed,
            chunk_size=chunk_size,
        ):
            accumulator.add_batch(batch=batch)

        logger.info(
            "Accumulated moments of %d observations (%s, sigma=%g, eta=%g)",
            M,
            params.signal_id,
            params.sigma,
            params.eta,
        )

        return accumulator

    @classmethod
    def noise_kernel_h(
        cls,
        omega: ArrayLike,
        sigma: float,
        grid: Grid,
    ) -> NDArray[np.complex128]:
        """
        Noise cross-covariance h(omega) = E[eps_hat(omega') conj(eps_hat(omega' - omega))].

        On the grid this is sigma^2 dx sum_j e^{-i omega x_j} over the noisy
        nodes, so h(0) = sigma^2 N, h(-omega) = conj(h(omega)) and h vanishes at
        even multiples of pi / N.

        Args:
            omega (ArrayLike): Frequencies, any shape.
            sigma (float): The noise level.
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.complex128]: The kernel, same shape as omega.
        """

        if sigma < 0.0:
            raise ValueError(f"Noise level must be nonnegative, got {sigma}")

        omega = np.asarray(omega, dtype=np.float64)

        if sigma == 0.0:
            return np.zeros(omega.shape, dtype=np.complex128)

        nodes: NDArray[np.float64] = grid.x[grid.noise_nodes]

        return (
            sigma**2
            * grid.dx
            * np.exp(-1j * np.multiply.outer(omega, nodes)).sum(axis=-1)
        )

    @classmethod
    def center_bispectrum(
        cls,
        batch_bispectra_mean: BispectrumField,
        mu_tilde: Spectrum,
        sigma: float,
        grid: Grid,
    ) -> BispectrumField:
        """
        Subtract the noise cross terms R_sigma from a mean bispectrum.

        R(w1, w2) = mu(w1) h(w1)* + mu(w2)* h(w2) + mu(w2 - w1) h(w2 - w1)*,
        the expectation of every product with two noise factors.

        Args:
            batch_bispectra_mean (BispectrumField): Mean bispectrum of the observations.
            mu_tilde (Spectrum): Mean spectrum of the observations.
            sigma (float): The noise level.
            grid (Grid): The sampling grid.

        Returns:
            BispectrumField: The centered mean bispectrum.
        """

        if sigma == 0.0:
            return batch_bispectra_mean

        kernel: NDArray[np.complex128] = cls.noise_kernel_h(
            omega=grid.omega,
            sigma=sigma,
            grid=grid,
        )

        (
            difference,
            _,
        ) = SpectraUtils.difference_index(grid=grid)

        mu: NDArray[np.complex128] = mu_tilde.values

        correction: NDArray[np.complex128] = (
            (mu * np.conj(kernel))[:, None]
            + (np.conj(mu) * kernel)[None, :]
            + mu[difference] * np.conj(kernel[difference])
        )

        return batch_bispectra_mean.with_values(
            values=batch_bispectra_mean.values - correction
        )

    @classmethod
    def center_power(
        cls,
        mean_power: NDArray[np.float64],
        sigma: float,
        grid: Grid,
    ) -> NDArray[np.float64]:
        """
        Subtract the noise level sigma^2 N from a mean power spectrum.

        Args:
            mean_power (NDArray[np.float64]): Mean |y_hat|^2 of the observations.
            sigma (float): The noise level.
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.float64]: The centered power spectrum.
        """

        return np.asarray(mean_power, dtype=np.float64) - sigma**2 * grid.N

    @classmethod
    def omega_domain(
        cls,
        grid: Grid,
        C0: float,
        selector: OmegaSelector = "disc",
    ) -> NDArray[np.bool_]:
        """
        The domain Omega on which the unbiasing program is posed.

        Args:
            grid (Grid): The sampling grid.
            C0 (float): The contraction constant; radius is C0 * omega_max.
            selector (OmegaSelector): "disc", "square" or the whole "valid" set.

        Returns:
            NDArray[np.bool_]: The domain, always inside the validity mask.
        """

        valid: NDArray[np.bool_] = SpectraUtils.validity_mask(grid=grid)

        radius: float = C0 * grid.omega_max * (1.0 + 1e-12)
        w1: NDArray[np.float64] = grid.omega[:, None]
        w2: NDArray[np.float64] = grid.omega[None, :]

        if selector == "disc":
            return valid & (w1**2 + w2**2 <= radius**2)

        if selector == "square":
            return valid & (np.maximum(np.abs(w1), np.abs(w2)) <= radius)

        if selector == "valid":
            return valid

        raise ValueError(f"Unknown domain selector {selector!r}")

    @classmethod
    def power_domain(
        cls,
        grid: Grid,
        C0: float,
    ) -> NDArray[np.bool_]:
        """1D domain |omega| <= C0 * omega_max."""

        return np.abs(grid.omega) <= C0 * grid.omega_max * (1.0 + 1e-12)

    @classmethod
    def default_smoothing_width(
        cls,
        sigma: float,
        M: int,
        grid: Grid,
    ) -> float:
        """
        Smoothing width 5 sigma M^(-1/6), or dx for noiseless data.

        Args:
            sigma (float): The noise level.
            M (int): The number of observations.
            grid (Grid): The sampling grid.

        Returns:
            float: The Gaussian width in frequency units.
        """

        if sigma <= 0.0:
            return grid.dx

        return SMOOTHING_PREFACTOR * sigma * M ** (-1.0 / 6.0)

    @classmethod
    def _check_eta(
        cls,
        eta: float,
    ) -> None:
        if eta <= 0.0:
            raise InvalidEtaError(
                eta=eta,
                reason="the unbiasing operator is singular at eta=0, use the centered mean",
            )

        if eta > ETA_MAX * (1.0 + 1e-12):
            raise InvalidEtaError(eta=eta, reason="must not exceed 12^-1/2")

    @classmethod
    def assemble_data_term(
        cls,
        centered: BispectrumField,
        L: float,
        eta: float,
    ) -> BispectrumField:
        """
        Right-hand side C1 L_C2 d of the unbiasing program.

        Args:
            centered (BispectrumField): The centered mean bispectrum.
            L (float): The smoothing width.
            eta (float): The dilation scale.

        Returns:
            BispectrumField: The right-hand side, identically zero at eta = 0.
        """

        (
            _,
            C1,
            C2,
        ) = dilation_constants(eta=eta)

        if C1 == 0.0:
            return centered.with_values(values=np.zeros_like(centered.values))

        data: BispectrumField = SpectraUtils.smoothed_data_term(field=centered, L=L)

        dilated: BispectrumField = SpectraUtils.dilate_field(field=data, C=C2, degree=4)

        return dilated.with_values(values=C1 * dilated.values)

    @classmethod
    def assemble_power_data_term(
        cls,
        centered_power: NDArray[np.float64],
        L: float,
        eta: float,
        grid: Grid,
    ) -> NDArray[np.float64]:
        """
        Right-hand side C1 L_C2 (3 q + omega q') of the 1D program.

        Args:
            centered_power (NDArray[np.float64]): The centered mean power spectrum.
            L (float): The smoothing width.
            eta (float): The dilation scale.
            grid (Grid): The sampling grid.

        Returns:
            NDArray[np.float64]: The right-hand side.
        """

        (
            _,
            C1,
            C2,
        ) = dilation_constants(eta=eta)

        if C1 == 0.0:
            return np.zeros(grid.n_omega)

        data: NDArray[np.float64] = SpectraUtils.smoothed_data_term(
            field=np.asarray(centered_power, dtype=np.float64),
            L=L,
            grid=grid,
        )

        return C1 * SpectraUtils.dilate_field(field=data, C=C2, degree=3, grid=grid)

    @classmethod
    def loss_and_gradient(
        cls,
        g_hat: BispectrumField,
        rhs: BispectrumField,
        C0: float,
        mask: NDArray[np.bool_],
    ) -> tuple[float, BispectrumField]:
        """
        Unbiasing loss sum_Omega |(I - L_C0) g - rhs|^2 dA and its gradient.

        The gradient is taken with respect to the real inner product
        Re(dA sum a conj(b)), so the directional derivative along delta is
        Re(grid_inner(gradient, delta)).

        Args:
            g_hat (BispectrumField): The candidate solution.
            rhs (BispectrumField): The right-hand side.
            C0 (float): The contraction constant in (0, 1).
            mask (NDArray[np.bool_]): The domain Omega.

        Returns:
            tuple[float, BispectrumField]: The loss and the gradient field.
        """

        if not 0.0 < C0 < 1.0:
            raise ValueError(f"C0 must lie in (0, 1), got {C0}")

        grid: Grid = g_hat.grid
        area: float = grid.d_omega**2

        residual: NDArray[np.complex128] = np.where(
            mask,
            g_hat.values
            - SpectraUtils.dilate_field(field=g_hat, C=C0, degree=4).values
            - rhs.values,
            0.0,
        )

        loss: float = float(area * np.sum(np.abs(residual) ** 2))

        # 2 (I - L)^T applied to the masked residual
        gradient: NDArray[np.complex128] = 2.0 * (
            residual
            - SpectraUtils.dilate_adjoint(field=residual, C=C0, degree=4, grid=grid)
        )

        return loss, g_hat.with_values(values=gradient)

    @classmethod
    def _restricted_operator(
        cls,
        grid: Grid,
        C0: float,
        mask: NDArray[np.bool_],
    ) -> tuple[scipy.sparse.linalg.LinearOperator, Callable, Callable]:
        """A^T A, A and A^T for A = S (I - L_C0) S^T on the masked unknowns."""

        size: int = int(mask.sum())
        shape: tuple[int, int] = mask.shape

        def _scatter(vector: NDArray[np.complex128]) -> NDArray[np.complex128]:
            field: NDArray[np.complex128] = np.zeros(shape, dtype=np.complex128)
            field[mask] = vector.ravel()

            return field

        def _forward(vector: NDArray[np.complex128]) -> NDArray[np.complex128]:
            field = _scatter(vector=vector)

            return (
                field - SpectraUtils.dilate_field(field=field, C=C0, degree=4, grid=grid)
            )[mask]

        def _transpose(vector: NDArray[np.complex128]) -> NDArray[np.complex128]:
            field = _scatter(vector=vector)

            return (
                field - SpectraUtils.dilate_adjoint(field=field, C=C0, degree=4, grid=grid)
            )[mask]

        return (
            scipy.sparse.linalg.LinearOperator(
                shape=(size, size),
                matvec=lambda v: _transpose(_forward(v)),
                dtype=np.complex128,
            ),
            _forward,
            _transpose,
        )

    @classmethod
    def _symmetrize(
        cls,
        field: BispectrumField,
    ) -> BispectrumField:
        # B(-w1, -w2) = conj(B(w1, w2)) for real signals
        return field.with_values(
            values=0.5 * (field.values + np.conj(field.values[::-1, ::-1]))
        )

    @classmethod
    def solve_bispectrum(
        cls,
        centered: BispectrumField,
        eta: float,
        cfg: Optional[SolverConfig] = None,
    ) -> BispectrumField:
        """
        Unbiased bispectrum from a centered mean by solving (I - L_C0) g = C1 L_C2 d on Omega.

        Conjugate gradient runs on the normal equations; the system is the
        identity minus a contraction, so it converges in few iterations.

        Args:
            centered (BispectrumField): The centered mean bispectrum.
            eta (float): The dilation scale in (0, 12^-1/2].
            cfg (Optional[SolverConfig]): Solver settings; L defaults to dx.

        Returns:
            BispectrumField: The estimate, masked to Omega and conjugate symmetric.

        Raises:
            InvalidEtaError: If eta is not in (0, 12^-1/2].
            NonConvergenceError: If the residual does not reach cfg.residual_tol.
        """

        cls._check_eta(eta=eta)

        cfg = cfg or SolverConfig()
        grid: Grid = centered.grid

        (
            C0,
            _,
            _,
        ) = dilation_constants(eta=eta)

        mask: NDArray[np.bool_] = cls.omega_domain(grid=grid, C0=C0, selector=cfg.omega_mask)

        rhs: BispectrumField = cls.assemble_data_term(
            centered=centered,
            L=cfg.L if cfg.L is not None else grid.dx,
            eta=eta,
        ).restrict(mask=mask)

        if not np.any(rhs.values):
            return rhs

        (
            normal,
            forward,
            transpose,
        ) = cls._restricted_operator(grid=grid, C0=C0, mask=mask)

        b: NDArray[np.complex128] = rhs.values[mask]
        normal_rhs: NDArray[np.complex128] = transpose(b)

        iterations: list[int] = [0]

        def _report(xk: NDArray[np.complex128]) -> None:
            iterations[0] += 1

            if logger.isEnabledFor(logging.DEBUG):
                logger.debug(
                    "cg iteration %d: relative residual %.3e",
                    iterations[0],
                    np.linalg.norm(forward(xk) - b) / np.linalg.norm(b),
                )

        (
            solution,
            info,
        ) = scipy.sparse.linalg.cg(
            normal,
            normal_rhs,
            rtol=cfg.residual_tol,
            atol=0.0,
            maxiter=cfg.max_iters,
            callback=_report,
        )

        field: NDArray[np.complex128] = np.zeros(mask.shape, dtype=np.complex128)
        field[mask] = solution

        estimate: BispectrumField = cls._symmetrize(field=rhs.with_values(values=field))

        residual: float = float(np.linalg.norm(forward(solution) - b) / np.linalg.norm(b))

        if info != 0:
            raise NonConvergenceError(
                solver="cg",
                iterations=iterations[0],
                residual=residual,
                result=estimate,
            )

        logger.info(
            "Unbiased bispectrum for eta=%.4g in %d cg iterations (residual %.2e)",
            eta,
            iterations[0],
            residual,
        )

        return estimate

    @classmethod
    def solve_power(
        cls,
        centered_power: NDArray[np.float64],
        eta: float,
        grid: Grid,
        cfg: Optional[SolverConfig] = None,
        domain: Optional[NDArray[np.bool_]] = None,
    ) -> NDArray[np.float64]:
        """
        Unbiased power spectrum by bounded least squares on (I - L_C0) p = C1 L_C2 (3q + omega q').

        Args:
            centered_power (NDArray[np.float64]): The centered mean power spectrum.
            eta (float): The dilation scale in (0, 12^-1/2].
            grid (Grid): The sampling grid.
            cfg (Optional[SolverConfig]): Solver settings; L defaults to dx.
            domain (Optional[NDArray[np.bool_]]): 1D domain, |omega| <= C0 omega_max by default.

        Returns:
            NDArray[np.float64]: The estimate, nonnegative and zero off the domain.

        Raises:
            InvalidEtaError: If eta is not in (0, 12^-1/2].
            NonConvergenceError: If the bounded solver stops on its iteration limit.
        """

        cls._check_eta(eta=eta)

        cfg = cfg or SolverConfig()

        (
            C0,
            _,
            _,
        ) = dilation_constants(eta=eta)

        if domain is None:
            domain = cls.power_domain(grid=grid, C0=C0)

        rhs: NDArray[np.float64] = cls.assemble_power_data_term(
            centered_power=centered_power,
            L=cfg.L if cfg.L is not None else grid.dx,
            eta=eta,
            grid=grid,
        )[domain]

        estimate: NDArray[np.float64] = np.zeros(grid.n_omega)

        if not np.any(rhs):
            return estimate

        indices: NDArray[np.intp] = np.flatnonzero(domain)

        operator: scipy.sparse.csr_matrix = (
            scipy.sparse.identity(grid.n_omega, format="csr")
            - C0**3 * SpectraUtils.dilation_matrix(grid=grid, C=C0)
        )[indices][:, indices]

        result: scipy.optimize.OptimizeResult = scipy.optimize.lsq_linear(
            operator,
            rhs,
            bounds=(0.0, np.inf),
            method="trf",
            lsq_solver="lsmr",
            tol=cfg.residual_tol,
            max_iter=cfg.max_iters,
        )

        estimate[indices] = np.maximum(result.x, 0.0)

        if result.status <= 0:
            raise NonConvergenceError(
                solver="lsq_linear",
                iterations=int(result.nit),
                residual=float(result.cost),
                result=estimate,
            )

        logger.debug(
            "Unbiased power spectrum for eta=%.4g in %d iterations", eta, int(result.nit)
        )

        return estimate

    @classmethod
    def resolve_config(
        cls,
        cfg: Optional[SolverConfig],
        sigma: float,
        M: int,
        grid: Grid,
    ) -> SolverConfig:
        """
        Fill in the default smoothing width for this noise level and sample size.

        Args:
            cfg (Optional[SolverConfig]): The settings, possibly without L.
            sigma (float): The noise level.
            M (int): The number of observations.
            grid (Grid): The sampling grid.

        Returns:
            SolverConfig: Settings with L set.
        """

        cfg = cfg or SolverConfig()

        if cfg.L is not None:
            return cfg

        return cfg.model_copy(
            update={"L": cls.default_smoothing_width(sigma=sigma, M=M, grid=grid)}
        )

    @classmethod
    def recover_bispectrum(
        cls,
        moments: CenteredMoments,
        eta: float,
        cfg: Optional[SolverConfig] = None,
    ) -> BispectrumField:
        """
        Unbiased bispectrum from centered moments.

        Args:
            moments (CenteredMoments): The centered moments, bispectrum included.
            eta (float): The dilation scale; 0 returns the centered mean.
            cfg (Optional[SolverConfig]): Solver settings.

        Returns:
            BispectrumField: The estimate.
        """

        if moments.mean_bispectrum is None:
            raise ValueError("Moments were accumulated without the bispectrum")

        if eta == 0.0:
            return moments.mean_bispectrum

        return cls.solve_bispectrum(
            centered=moments.mean_bispectrum,
            eta=eta,
            cfg=cls.resolve_config(
                cfg=cfg,
                sigma=moments.sigma,
                M=moments.M,
                grid=moments.mean_ft.grid,
            ),
        )

    @classmethod
    def recover_power(
        cls,
        moments: CenteredMoments,
        eta: float,
        cfg: Optional[SolverConfig] = None,
    ) -> NDArray[np.float64]:
        """
        Unbiased power spectrum from centered moments.

        Args:
            moments (CenteredMoments): The centered moments.
            eta (float): The dilation scale; 0 returns the centered mean, clamped at 0.
            cfg (Optional[SolverConfig]): Solver settings.

        Returns:
            NDArray[np.float64]: The estimate.
        """

        grid: Grid = moments.mean_ft.grid

        if eta == 0.0:
            return np.maximum(moments.mean_power, 0.0)

        return cls.solve_power(
            centered_power=moments.mean_power,
            eta=eta,
            grid=grid,
            cfg=cls.resolve_config(cfg=cfg, sigma=moments.sigma, M=moments.M, grid=grid),
        )

    @classmethod
    def dilation_residual(
        cls,
        field: Union[BispectrumField, NDArray[np.float64]],
        C0: float,
        grid: Grid,
    ) -> Union[BispectrumField, NDArray[np.float64]]:
        """
        Apply (I - L_C0) with the degree matching the field's dimension.

        Args:
            field (Union[BispectrumField, NDArray[np.float64]]): A bispectrum field or power vector.
            C0 (float): The contraction constant.
            grid (Grid): The sampling grid.

        Returns:
            Union[BispectrumField, NDArray[np.float64]]: The image under I - L_C0.
        """

        if isinstance(field, BispectrumField):
            return field.with_values(
                values=field.values
                - SpectraUtils.dilate_field(field=field, C=C0, degree=4).values
            )

        return field - SpectraUtils.dilate_field(field=field, C=C0, degree=3, grid=grid)
