"""
Author: Louis Goodnews
Date: 2025-09-15

Nuisance parameters: the noise level from the power-spectrum tail, and the
dilation scale jointly with the unbiased power spectrum.
"""

import logging
import math

from dataclasses import dataclass, field
from typing import Final, Iterable, Optional, Union

import numpy as np
import scipy.optimize

from numpy.typing import NDArray

from .constants import ETA_MAX, ETA_SEARCH_EVALS, ETA_SEARCH_MIN
from .exceptions import NonConvergenceError, SearchFailureError
from .signal_model import Grid, ObservationBatch, dilation_constants
from .spectra import SpectraUtils
from .unbias import MomentAccumulator, SolverConfig, UnbiasUtils


__all__: Final[list[str]] = [
    "EstimateUtils",
    "EtaEstimate",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)

# Coarse log-spaced candidates evaluated before the bracketed search
_COARSE_POINTS: Final[int] = 9

# The coarse profile and the final re-solve at the minimizer share the budget
_BRENT_EVALS: Final[int] = ETA_SEARCH_EVALS - _COARSE_POINTS - 1

# Two coarse local minima closer than this (relative) make the profile ambiguous
_AMBIGUITY_TOL: Final[float] = 1e-2


@dataclass(frozen=True, eq=False)
class EtaEstimate:
    """
    Result of the joint search: the dilation scale, the power spectrum at that scale and the loss profile.
    """

    eta: float
    power: NDArray[np.float64]
    loss: float
    profile: list[tuple[float, float]] = field(default_factory=list)


class EstimateUtils:
    """
    A collection of utility functions for estimating sigma and eta.
    """

    @classmethod
    def tail_mask(
        cls,
        grid: Grid,
    ) -> NDArray[np.bool_]:
        """Frequencies 2^(ell-1) pi < |omega| <= 2^ell pi."""

        return np.abs(grid.omega) > 0.5 * grid.omega_max * (1.0 + 1e-12)

    @classmethod
    def estimate_sigma_from_power(
        cls,
        mean_power: NDArray[np.float64],
        grid: Grid,
    ) -> float:
        """
        Noise level from a raw mean power spectrum.

        Args:
            mean_power (NDArray[np.float64]): Mean |y_hat|^2 over the observations.
            grid (Grid): The sampling grid.

        Returns:
            float: sqrt(mean over the tail / N).
        """

        level: float = float(np.mean(np.asarray(mean_power)[cls.tail_mask(grid=grid)]))

        return math.sqrt(max(level, 0.0) / grid.N)

    @classmethod
    def estimate_sigma(
        cls,
        batch: Union[ObservationBatch, MomentAccumulator],
        grid: Grid,
    ) -> float:
        """
        Noise level from the flat high-frequency tail of the observed power spectra.

        The noise contributes sigma^2 N at every frequency, while a band-limited
        signal contributes nothing above 2^(ell-1) pi. Signals with slowly
        decaying spectra (f3, f4) bias the estimate upwards.

        Args:
            batch (Union[ObservationBatch, MomentAccumulator]): The observations or their raw moments.
            grid (Grid): The sampling grid.

        Returns:
            float: The estimated noise level.
        """

        if isinstance(batch, MomentAccumulator):
            mean_power: NDArray[np.float64] = batch.mean_power()
        else:
            if batch.size == 0:
                raise ValueError("Cannot estimate sigma from an empty batch")

            spectra = SpectraUtils.dft_values(values=batch.values, grid=grid)
            mean_power = np.mean(np.abs(spectra) ** 2, axis=0)

        sigma: float = cls.estimate_sigma_from_power(mean_power=mean_power, grid=grid)

        logger.info("Estimated sigma=%.4f", sigma)

        return sigma

    @classmethod
    def search_domain(
        cls,
        grid: Grid,
    ) -> NDArray[np.bool_]:
        """
        Fixed 1D domain |omega| <= omega_max / 3 shared by all candidates.

        omega_max / 3 is C0 at the largest admissible eta, so the losses of
        different candidates are sums over the same frequencies.
        """

        return UnbiasUtils.power_domain(grid=grid, C0=dilation_constants(eta=ETA_MAX)[0])

    @classmethod
    def _candidate_loss(
        cls,
        centered_power: NDArray[np.float64],
        eta: float,
        grid: Grid,
        cfg: SolverConfig,
        domain: NDArray[np.bool_],
    ) -> tuple[float, NDArray[np.float64]]:
        (
            C0,
            _,
            _,
        ) = dilation_constants(eta=eta)

        try:
            power: NDArray[np.float64] = UnbiasUtils.solve_power(
                centered_power=centered_power,
                eta=eta,
                grid=grid,
                cfg=cfg,
                domain=domain,
            )
        except NonConvergenceError as error:
            logger.warning("Inner power solve at eta=%.4g did not converge", eta)
            power = error.result

        rhs: NDArray[np.float64] = UnbiasUtils.assemble_power_data_term(
            centered_power=centered_power,
            L=cfg.L if cfg.L is not None else grid.dx,
            eta=eta,
            grid=grid,
        )

        residual: NDArray[np.float64] = (
            UnbiasUtils.dilation_residual(field=power, C0=C0, grid=grid) - rhs
        )[domain]

        return float(grid.d_omega * np.sum(residual**2)) / eta**2, power

    @classmethod
    def eta_profile(
        cls,
        centered_power: NDArray[np.float64],
        grid: Grid,
        etas: Iterable[float],
        cfg: Optional[SolverConfig] = None,
    ) -> list[tuple[float, float]]:
        """
        Joint loss, minimized over p >= 0, at each candidate eta.

        Args:
            centered_power (NDArray[np.float64]): The centered mean power spectrum.
            grid (Grid): The sampling grid.
            etas (Iterable[float]): Candidates in (0, 12^-1/2].
            cfg (Optional[SolverConfig]): Solver settings for the inner solves.

        Returns:
            list[tuple[float, float]]: (eta, loss) pairs in the order given.
        """

        cfg = cfg or SolverConfig()
        domain: NDArray[np.bool_] = cls.search_domain(grid=grid)

        return [
            (
                float(eta),
                cls._candidate_loss(
                    centered_power=centered_power,
                    eta=float(eta),
                    grid=grid,
                    cfg=cfg,
                    domain=domain,
                )[0],
            )
            for eta in etas
        ]

    @classmethod
    def _check_unimodal(
        cls,
        coarse: list[tuple[float, float]],
    ) -> None:
        losses: NDArray[np.float64] = np.array([loss for _, loss in coarse])

        padded: NDArray[np.float64] = np.concatenate([[np.inf], losses, [np.inf]])

        minima: NDArray[np.intp] = np.flatnonzero(
            (padded[1:-1] < padded[:-2]) & (padded[1:-1] <= padded[2:])
        )

        if minima.size < 2:
            return

        best: float = float(losses[minima].min())
        rivals: NDArray[np.float64] = np.sort(losses[minima])

        # A second valley about as deep as the first leaves eta undetermined
        if rivals[1] - best <= _AMBIGUITY_TOL * max(abs(best), np.finfo(np.float64).tiny):
            raise SearchFailureError(profile=coarse)

        logger.warning(
            "Eta loss profile has %d local minima, keeping the deepest", int(minima.size)
        )

    @classmethod
    def search_eta(
        cls,
        centered_power: NDArray[np.float64],
        grid: Grid,
        cfg: Optional[SolverConfig] = None,
    ) -> EtaEstimate:
        """
        Minimize the joint loss over eta on a log scale.

        A coarse log-spaced profile over [10^-3, 12^-1/2] locates the deepest
        valley, then a bounded Brent search refines it between the neighbouring
        coarse points. At most ETA_SEARCH_EVALS joint losses are evaluated in total.

        Args:
            centered_power (NDArray[np.float64]): The centered mean power spectrum.
            grid (Grid): The sampling grid.
            cfg (Optional[SolverConfig]): Solver settings for the inner solves.

        Returns:
            EtaEstimate: The minimizing eta, its power spectrum and the evaluated profile.

        Raises:
            SearchFailureError: If the profile has two valleys of near-equal depth.
        """

        cfg = cfg or SolverConfig()
        domain: NDArray[np.bool_] = cls.search_domain(grid=grid)

        log_grid: NDArray[np.float64] = np.linspace(
            math.log(ETA_SEARCH_MIN),
            math.log(ETA_MAX),
            _COARSE_POINTS,
        )

        coarse: list[tuple[float, float]] = cls.eta_profile(
            centered_power=centered_power,
            grid=grid,
            etas=np.exp(log_grid),
            cfg=cfg,
        )

        cls._check_unimodal(coarse=coarse)

        best: int = int(np.argmin([loss for _, loss in coarse]))

        profile: list[tuple[float, float]] = list(coarse)

        def _objective(log_eta: float) -> float:
            loss: float = cls._candidate_loss(
                centered_power=centered_power,
                eta=math.exp(log_eta),
                grid=grid,
                cfg=cfg,
                domain=domain,
            )[0]

            profile.append((math.exp(log_eta), loss))

            return loss

        result: scipy.optimize.OptimizeResult = scipy.optimize.minimize_scalar(
            _objective,
            bounds=(
                log_grid[max(best - 1, 0)],
                log_grid[min(best + 1, _COARSE_POINTS - 1)],
            ),
            method="bounded",
            options={"maxiter": _BRENT_EVALS, "xatol": 1e-4},
        )

        # The bounded search never evaluates its end points
        (
            eta,
            loss,
        ) = min(profile, key=lambda pair: pair[1])

        (
            loss,
            power,
        ) = cls._candidate_loss(
            centered_power=centered_power,
            eta=eta,
            grid=grid,
            cfg=cfg,
            domain=domain,
        )

        logger.info(
            "Estimated eta=%.4f (loss %.3e, %d evaluations)",
            eta,
            loss,
            int(result.nfev) + _COARSE_POINTS + 1,
        )

        return EtaEstimate(
            eta=eta,
            power=power,
            loss=loss,
            profile=sorted(profile),
        )

    @classmethod
    def joint_estimate_eta_power(
        cls,
        batch: Union[ObservationBatch, MomentAccumulator],
        sigma: float,
        grid: Grid,
        cfg: Optional[SolverConfig] = None,
    ) -> EtaEstimate:
        """
        Estimate eta together with the unbiased power spectrum, sigma held fixed.

        Args:
            batch (Union[ObservationBatch, MomentAccumulator]): The observations or their raw moments.
            sigma (float): The known or pre-estimated noise level.
            grid (Grid): The sampling grid.
            cfg (Optional[SolverConfig]): Solver settings; L defaults to 5 sigma M^(-1/6).

        Returns:
            EtaEstimate: The estimate.
        """

        if isinstance(batch, MomentAccumulator):
            accumulator: MomentAccumulator = batch
        else:
            accumulator = MomentAccumulator(grid=grid, bispectrum=False)
            accumulator.add_batch(batch=batch)

        centered_power: NDArray[np.float64] = UnbiasUtils.center_power(
            mean_power=accumulator.mean_power(),
            sigma=sigma,
            grid=grid,
        )

        return cls.search_eta(
            centered_power=centered_power,
            grid=grid,
            cfg=UnbiasUtils.resolve_config(
                cfg=cfg,
                sigma=sigma,
                M=accumulator.count,
                grid=grid,
            ),
        )
