"""
Author: Louis Goodnews
Date: 2025-09-15

Hidden-signal recovery from a bispectrum and a power spectrum: magnitudes,
phases by frequency marching or iterative phase synchronization, assembly,
and the translation-aligned error metric.
"""

import logging
import math

from dataclasses import dataclass
from typing import Final, Literal, Optional

import numpy as np
import scipy.optimize
import scipy.signal

from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from .constants import APS_MAX_ITERS, APS_TOL, MODULUS_FLOOR
from .exceptions import DegenerateBispectrumError, NonConvergenceError, ZeroReferenceError
from .signal_model import Grid, Signal
from .spectra import BispectrumField, SpectraUtils


__all__: Final[list[str]] = [
    "InversionConfig",
    "InvertUtils",
    "PhaseVector",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """
    Phases of the hidden signal's transform at omega_k = k pi / N, k = 0..K.

    ``resolved`` is the last index whose phase the bispectrum determined;
    later phases are placeholders (zero).
    """

    phases: NDArray[np.float64]
    resolved: int
    gauge: str = "theta(omega_1) = 0"

    @property
    def unit(self) -> NDArray[np.complex128]:
        return np.exp(1j * self.phases)


class InversionConfig(BaseModel):
    """
    Settings of the phase recovery.
    """

    model_config = ConfigDict(frozen=True)

    method: Literal["aps", "fm"] = "aps"
    init: Literal["fm", "zeros"] = "fm"
    tol: float = Field(default=APS_TOL, gt=0.0)
    max_iters: int = Field(default=APS_MAX_ITERS, ge=1)
    modulus_floor: float = Field(default=MODULUS_FLOOR, gt=0.0)


class InvertUtils:
    """
    A collection of utility functions for bispectrum inversion.
    """

    @classmethod
    def magnitudes_from_power(
        cls,
        power_hat: NDArray[np.float64],
    ) -> NDArray[np.float64]:
        """
        Fourier magnitudes sqrt(max(p, 0)).

        Args:
            power_hat (NDArray[np.float64]): An estimated power spectrum.

        Returns:
            NDArray[np.float64]: The magnitudes, same shape.
        """

        return np.sqrt(np.maximum(np.asarray(power_hat, dtype=np.float64), 0.0))

    @classmethod
    def _origin_phase(
        cls,
        B: BispectrumField,
    ) -> float:
        # B(0, 0) = |f(0)|^2 f(0) carries the sign of the real value f(0)
        center: int = B.grid.center

        return 0.0 if B.values[center, center].real >= 0.0 else math.pi

    @classmethod
    def _floor(
        cls,
        B: BispectrumField,
        modulus_floor: float,
    ) -> float:
        return modulus_floor * float(np.max(np.abs(B.values[B.mask]), initial=0.0))

    @classmethod
    def frequency_marching(
        cls,
        B: BispectrumField,
        modulus_floor: float = MODULUS_FLOOR,
    ) -> PhaseVector:
        """
        March phases upwards along omega1 = pi / N.

        With arg B(w1, w2) = theta(w1) - theta(w2) + theta(w2 - w1) and the
        gauge theta(omega_1) = 0, theta(omega_k) = theta(omega_(k-1)) - arg B(omega_1, omega_k).

        Args:
            B (BispectrumField): The bispectrum.
            modulus_floor (float): Entries below this fraction of max |B| are unusable.

        Returns:
            PhaseVector: The marched phases.

        Raises:
            DegenerateBispectrumError: If no entry of the omega_1 row clears the floor.
        """

        grid: Grid = B.grid
        center: int = grid.center
        K: int = grid.intervals

        threshold: float = cls._floor(B=B, modulus_floor=modulus_floor)

        row: NDArray[np.complex128] = B.values[center + 1, center:]
        usable: NDArray[np.bool_] = B.mask[center + 1, center:] & (np.abs(row) > threshold)

        if not np.any(usable[1:]):
            raise DegenerateBispectrumError(
                reason="no entry B(omega_1, omega_k) clears the modulus floor"
            )

        phases: NDArray[np.float64] = np.zeros(K + 1)
        phases[0] = cls._origin_phase(B=B)

        resolved: int = 1

        for k in range(2, K + 1):
            # Stop quietly where the domain ends
            if not B.mask[center + 1, center + k]:
                break

            if not usable[k]:
                logger.warning(
                    "Frequency marching halted at k=%d of %d: bispectrum below modulus floor",
                    k,
                    K,
                )
                break

            phases[k] = phases[k - 1] - np.angle(row[k])
            resolved = k

        return PhaseVector(phases=np.angle(np.exp(1j * phases)), resolved=resolved)

    @classmethod
    def _full_unit(
        cls,
        z: NDArray[np.complex128],
    ) -> NDArray[np.complex128]:
        return np.concatenate([np.conj(z[:0:-1]), z])

    @classmethod
    def _fix_gauge(
        cls,
        z: NDArray[np.complex128],
        origin: float,
    ) -> NDArray[np.complex128]:
        # z_k conj(z_1)^k removes the translation ramp
        ramp: NDArray[np.complex128] = np.conj(z[1]) ** np.arange(z.size)

        fixed: NDArray[np.complex128] = z * ramp
        fixed[0] = math.cos(origin)

        return fixed / np.abs(fixed)

    @classmethod
    def phase_synchronization(
        cls,
        B: BispectrumField,
        init: Optional[PhaseVector] = None,
        cfg: Optional[InversionConfig] = None,
    ) -> PhaseVector:
        """
        Iterative phase synchronization.

        Each sweep replaces every z_k by the normalized sum over valid triples of
        conj(W(omega_l, omega_k)) z_l z_(k-l), with W = B / |B| on entries above
        the modulus floor, then re-fixes the gauge.

        Args:
            B (BispectrumField): The bispectrum.
            init (Optional[PhaseVector]): Starting phases, frequency marching by default.
            cfg (Optional[InversionConfig]): Tolerance, iteration limit and floor.

        Returns:
            PhaseVector: The synchronized phases.

        Raises:
            NonConvergenceError: If the largest phase change stays above cfg.tol; ``result`` holds the last iterate.
        """

        cfg = cfg or InversionConfig()
        grid: Grid = B.grid
        center: int = grid.center

        if init is None:
            init = (
                cls.frequency_marching(B=B, modulus_floor=cfg.modulus_floor)
                if cfg.init == "fm"
                else PhaseVector(phases=np.zeros(grid.intervals + 1), resolved=grid.intervals)
            )

        threshold: float = cls._floor(B=B, modulus_floor=cfg.modulus_floor)
        usable: NDArray[np.bool_] = B.mask & (np.abs(B.values) > threshold)

        weights: NDArray[np.complex128] = np.where(
            usable,
            np.conj(B.values) / np.where(usable, np.abs(B.values), 1.0),
            0.0,
        )[:, center:]

        (
            difference,
            _,
        ) = SpectraUtils.difference_index(grid=grid)
        difference = difference[:, center:]

        # A phase is determined wherever its column has at least one usable entry
        determined: NDArray[np.intp] = np.flatnonzero(np.any(weights != 0.0, axis=0))
        resolved: int = int(determined[-1]) if determined.size else 0

        origin: float = cls._origin_phase(B=B)
        z: NDArray[np.complex128] = cls._fix_gauge(z=init.unit, origin=origin)

        change: float = math.inf

        for iteration in range(1, cfg.max_iters + 1):
            full: NDArray[np.complex128] = cls._full_unit(z=z)

            sums: NDArray[np.complex128] = (
                weights * full[:, None] * full[difference]
            ).sum(axis=0)

            magnitude: NDArray[np.float64] = np.abs(sums)

            updated: NDArray[np.complex128] = np.where(
                magnitude > 0.0,
                sums / np.where(magnitude > 0.0, magnitude, 1.0),
                z,
            )
            updated = cls._fix_gauge(z=updated, origin=origin)

            change = float(np.max(np.abs(np.angle(updated * np.conj(z)))))
            z = updated

            logger.debug("Phase synchronization sweep %d: max change %.3e", iteration, change)

            if change < cfg.tol:
                return PhaseVector(phases=np.angle(z), resolved=resolved)

        raise NonConvergenceError(
            solver="phase_synchronization",
            iterations=cfg.max_iters,
            residual=change,
            result=PhaseVector(phases=np.angle(z), resolved=resolved),
        )

    @classmethod
    def _recenter(
        cls,
        positive: NDArray[np.complex128],
        grid: Grid,
    ) -> NDArray[np.complex128]:
        """Phase ramp moving the energy centroid of the period-2N signal to x = 0."""

        omega: NDArray[np.float64] = grid.omega[grid.nonnegative]
        full: NDArray[np.complex128] = cls._full_unit(z=positive)

        # The window holds half of the period; the other half is the window shifted by N
        near: NDArray[np.float64] = SpectraUtils.idft_values(values=full, grid=grid)
        far: NDArray[np.float64] = SpectraUtils.idft_values(
            values=full * np.exp(-1j * grid.omega * grid.N),
            grid=grid,
        )[1:-1]

        moment: complex = complex(
            np.sum(near**2 * np.exp(1j * math.pi * grid.x / grid.N))
            + np.sum(far**2 * np.exp(1j * math.pi * (grid.x[1:-1] - grid.N) / grid.N))
        )

        if abs(moment) <= 1e-12 * float(np.sum(near**2) + np.sum(far**2)):
            return positive

        centroid: float = math.atan2(moment.imag, moment.real) * grid.N / math.pi

        return positive * np.exp(1j * omega * centroid)

    @classmethod
    def assemble_signal(
        cls,
        mags: NDArray[np.float64],
        phases: NDArray[np.float64],
        grid: Grid,
    ) -> Signal:
        """
        Real signal with transform mags * e^{i phases} on omega >= 0, conjugate-symmetric below.

        Phases only fix the signal up to a translation on the period 2N of the
        frequency grid, so the result is translated to put its energy centroid
        at x = 0, inside the sampled window.

        Args:
            mags (NDArray[np.float64]): Magnitudes on omega >= 0 (or on the whole grid).
            phases (NDArray[np.float64]): Phases on omega >= 0.
            grid (Grid): The sampling grid.

        Returns:
            Signal: The inverse transform.
        """

        mags = np.asarray(mags, dtype=np.float64)

        if mags.size == grid.n_omega:
            mags = mags[grid.nonnegative]

        positive: NDArray[np.complex128] = mags * np.exp(1j * np.asarray(phases))

        # f_hat(0) of a real signal is real
        positive[0] = mags[0] * math.cos(float(phases[0]))

        return Signal(
            values=SpectraUtils.idft_values(
                values=cls._full_unit(z=cls._recenter(positive=positive, grid=grid)),
                grid=grid,
            ),
            grid=grid,
        )

    @classmethod
    def shift_signal(
        cls,
        signal: Signal,
        shift: float,
    ) -> Signal:
        """
        Translate a signal by a real amount through a spectral phase ramp.

        Args:
            signal (Signal): The signal.
            shift (float): The translation s, so the result is f(x - s).

        Returns:
            Signal: The translated signal.
        """

        grid: Grid = signal.grid

        spectrum: NDArray[np.complex128] = SpectraUtils.dft_values(values=signal.values, grid=grid)

        return Signal(
            values=SpectraUtils.idft_values(
                values=spectrum * np.exp(-1j * grid.omega * shift),
                grid=grid,
            ),
            grid=grid,
        )

    @classmethod
    def aligned_relative_error(
        cls,
        reference: Signal,
        estimate: Signal,
    ) -> float:
        """
        min_t ||f(x) - f_est(x - t)|| / ||f||.

        The best whole-node lag comes from a circular cross-correlation on the
        zero-padded period of the transform; a bounded Brent search over the
        neighbouring lags then refines it with spectral phase-ramp shifts.

        Args:
            reference (Signal): The ground truth.
            estimate (Signal): The estimate, same grid.

        Returns:
            float: The minimized relative L2 error.

        Raises:
            ZeroReferenceError: If the reference is identically zero.
        """

        grid: Grid = reference.grid

        norm: float = float(np.linalg.norm(reference.values))

        if norm == 0.0:
            raise ZeroReferenceError()

        period: int = 2 * grid.intervals

        padded_reference: NDArray[np.float64] = np.zeros(period)
        padded_reference[: grid.n_x] = reference.values

        padded_estimate: NDArray[np.float64] = np.zeros(period)
        padded_estimate[: grid.n_x] = estimate.values

        # correlation[m] = sum_i ref[(i + m) mod P] est[i]
        correlation: NDArray[np.float64] = scipy.signal.correlate(
            np.concatenate([padded_reference, padded_reference]),
            padded_estimate,
            mode="valid",
            method="fft",
        )[:period]

        lag: int = int(np.argmax(correlation))

        if lag > grid.intervals:
            lag -= period

        spectrum: NDArray[np.complex128] = SpectraUtils.dft_values(values=estimate.values, grid=grid)

        def _squared_error(shift: float) -> float:
            shifted: NDArray[np.float64] = SpectraUtils.idft_values(
                values=spectrum * np.exp(-1j * grid.omega * shift),
                grid=grid,
            )

            return float(np.sum((reference.values - shifted) ** 2))

        result: scipy.optimize.OptimizeResult = scipy.optimize.minimize_scalar(
            _squared_error,
            bounds=((lag - 1) * grid.dx, (lag + 1) * grid.dx),
            method="bounded",
            options={"xatol": 1e-12, "maxiter": 200},
        )

        best: float = min(float(result.fun), _squared_error(shift=lag * grid.dx))

        return math.sqrt(max(best, 0.0)) / norm

    @classmethod
    def recover_phases(
        cls,
        bispectrum: BispectrumField,
        cfg: Optional[InversionConfig] = None,
    ) -> PhaseVector:
        """
        Phases by the configured method, falling back to marching when synchronization fails.

        Args:
            bispectrum (BispectrumField): The bispectrum estimate.
            cfg (Optional[InversionConfig]): Inversion settings.

        Returns:
            PhaseVector: The recovered phases.
        """

        cfg = cfg or InversionConfig()

        marched: PhaseVector = cls.frequency_marching(
            B=bispectrum,
            modulus_floor=cfg.modulus_floor,
        )

        if cfg.method == "fm":
            return marched

        try:
            return cls.phase_synchronization(
                B=bispectrum,
                init=marched if cfg.init == "fm" else None,
                cfg=cfg,
            )
        except NonConvergenceError as error:
            logger.warning(
                "Phase synchronization stopped after %d sweeps (change %.2e), using frequency marching",
                error.iterations,
                error.residual,
            )

            return marched

    @classmethod
    def recover_signal(
        cls,
        bispectrum: BispectrumField,
        power: NDArray[np.float64],
        cfg: Optional[InversionConfig] = None,
    ) -> Signal:
        """
        Hidden signal, up to translation, from bispectrum and power spectrum estimates.

        Magnitudes beyond the last frequency with a determined phase are dropped.

        Args:
            bispectrum (BispectrumField): The bispectrum estimate.
            power (NDArray[np.float64]): The power spectrum estimate on the whole grid.
            cfg (Optional[InversionConfig]): Inversion settings.

        Returns:
            Signal: The recovered signal.
        """

        grid: Grid = bispectrum.grid

        phases: PhaseVector = cls.recover_phases(bispectrum=bispectrum, cfg=cfg)

        mags: NDArray[np.float64] = cls.magnitudes_from_power(power_hat=power)[grid.nonnegative]
        mags = np.where(np.arange(mags.size) <= phases.resolved, mags, 0.0)

        return cls.assemble_signal(mags=mags, phases=phases.phases, grid=grid)
