"""
Author: Louis Goodnews
Date: 2025-09-15

Test signals, sampling grids and the generative process of the dilation MRA
models: every observation is a translated, dilated copy of a hidden signal plus
white noise.
"""

import logging
import math

from dataclasses import dataclass, field
from functools import cached_property
from typing import Final, Iterator, Optional, Union

import numpy as np

from numpy.typing import ArrayLike, NDArray

from .constants import (
    ETA_MAX,
    F4_HALF_WIDTH,
    MIN_FREQUENCY_NODES,
    SIGNAL_IDS,
    TRANSLATION_FRACTION,
)
from .exceptions import (
    CalibrationError,
    GridError,
    InvalidEtaError,
    InvalidParameterError,
    LatentOutOfWindowError,
)


__all__: Final[list[str]] = [
    "Grid",
    "LatentDraw",
    "ModelParams",
    "ObservationBatch",
    "Signal",
    "SignalModelUtils",
    "dilation_constants",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


def dilation_constants(eta: float) -> tuple[float, float, float]:
    """
    Constants (C0, C1, C2) of the unbiasing identity for a uniform dilation law.

    Args:
        eta (float): The dilation scale, sqrt(Var(tau)).

    Returns:
        tuple[float, float, float]: C0 = (1 - a) / (1 + a), C1 = 2a, C2 = 1 / (1 + a) with a = sqrt(3) eta.
    """

    a: float = math.sqrt(3.0) * eta

    return (1.0 - a) / (1.0 + a), 2.0 * a, 1.0 / (1.0 + a)


@dataclass(frozen=True)
class Grid:
    """
    Spatial and frequency sampling shared by every transform.

    Spatial nodes are x_j = -N/2 + j * 2^-ell for j = 0..N*2^ell, frequency nodes
    are omega_k = k * pi / N for k = -N*2^ell..N*2^ell.
    """

    N: int
    ell: int

    @cached_property
    def intervals(self) -> int:
        """Number of spatial intervals, N * 2^ell."""

        return self.N * 2**self.ell

    @cached_property
    def dx(self) -> float:
        return 2.0**-self.ell

    @cached_property
    def x(self) -> NDArray[np.float64]:
        return -self.N / 2.0 + self.dx * np.arange(self.intervals + 1)

    @cached_property
    def d_omega(self) -> float:
        return math.pi / self.N

    @cached_property
    def center(self) -> int:
        """Index of omega = 0."""

        return self.intervals

    @cached_property
    def omega(self) -> NDArray[np.float64]:
        return self.d_omega * np.arange(-self.intervals, self.intervals + 1)

    @cached_property
    def omega_max(self) -> float:
        return 2.0**self.ell * math.pi

    @property
    def n_x(self) -> int:
        return self.intervals + 1

    @property
    def n_omega(self) -> int:
        return 2 * self.intervals + 1

    @cached_property
    def noise_nodes(self) -> NDArray[np.bool_]:
        """Nodes of the half-open window [-N/2, N/2) that carry noise."""

        mask: NDArray[np.bool_] = np.ones(self.n_x, dtype=bool)
        mask[-1] = False

        return mask

    @property
    def nonnegative(self) -> slice:
        """Slice selecting omega >= 0."""

        return slice(self.center, None)


@dataclass(frozen=True)
class ModelParams:
    """
    Generative parameters of one experiment. C0, C1 and C2 are always derived from eta.
    """

    signal_id: str
    amplitude: float
    sigma: float
    eta: float

    def __post_init__(self) -> None:
        # Check if the signal is one of the four test signals
        if self.signal_id not in SIGNAL_IDS:
            raise InvalidParameterError(
                name="signal_id", value=self.signal_id, reason="not one of f1..f4"
            )

        if self.amplitude <= 0.0:
            raise InvalidParameterError(
                name="amplitude", value=self.amplitude, reason="must be positive"
            )

        if self.sigma < 0.0:
            raise InvalidParameterError(
                name="sigma", value=self.sigma, reason="must be nonnegative"
            )

        # eta**2 <= 1/12 keeps the dilation factor 1 - tau inside [1/2, 3/2]
        if not 0.0 <= self.eta <= ETA_MAX * (1.0 + 1e-12):
            raise InvalidEtaError(eta=self.eta, reason="must lie in [0, 12^-1/2]")

    @property
    def half_width(self) -> float:
        """Half-width sqrt(3) * eta of the uniform dilation law."""

        return math.sqrt(3.0) * self.eta

    @property
    def C0(self) -> float:
        return dilation_constants(eta=self.eta)[0]

    @property
    def C1(self) -> float:
        return dilation_constants(eta=self.eta)[1]

    @property
    def C2(self) -> float:
        return dilation_constants(eta=self.eta)[2]


@dataclass(frozen=True, eq=False)
class Signal:
    """
    Real samples of a hidden signal or an observation on a grid.
    """

    values: NDArray[np.float64]
    grid: Grid

    def __post_init__(self) -> None:
        if np.shape(self.values) != (self.grid.n_x,):
            raise ValueError(
                f"Signal has shape {np.shape(self.values)}, grid expects ({self.grid.n_x},)"
            )


@dataclass(frozen=True)
class LatentDraw:
    """
    Translation t and dilation parameter tau of one observation.
    """

    t: float
    tau: float


@dataclass(frozen=True, eq=False)
class ObservationBatch:
    """
    A contiguous run of observations, rows indexed from ``start``.
    """

    values: NDArray[np.float64]
    t: NDArray[np.float64]
    tau: NDArray[np.float64]
    grid: Grid
    start: int = 0
    params: Optional[ModelParams] = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return int(self.values.shape[0])


class SignalModelUtils:
    """
    A collection of utility functions for the test signals and the generative model.
    """

    @classmethod
    def make_grid(
        cls,
        N: int,
        ell: int,
    ) -> Grid:
        """
        Build the sampling grid.

        Args:
            N (int): The spatial extent, a power of two.
            ell (int): The dyadic sampling exponent, at least 1.

        Returns:
            Grid: The grid with spatial step 2^-ell and frequency step pi/N.

        Raises:
            GridError: If N is not a power of two, ell < 1, or the grid is too coarse.
        """

        # Check if N is a positive power of two
        if N < 1 or N & (N - 1) != 0:
            raise GridError(N=N, ell=ell, reason="N must be a power of two")

        if ell < 1:
            raise GridError(N=N, ell=ell, reason="ell must be at least 1")

        grid: Grid = Grid(N=N, ell=ell)

        # The frequency axis is the one every estimator works on
        if grid.n_omega < MIN_FREQUENCY_NODES:
            raise GridError(
                N=N,
                ell=ell,
                reason=f"fewer than {MIN_FREQUENCY_NODES} frequency nodes",
            )

        return grid

    @classmethod
    def eval_signal(
        cls,
        signal_id: str,
        amplitude: float,
        x: ArrayLike,
    ) -> Union[float, NDArray[np.float64]]:
        """
        Evaluate one of the closed-form test signals.

        Args:
            signal_id (str): One of "f1", "f2", "f3", "f4".
            amplitude (float): The amplitude A_i.
            x (ArrayLike): The evaluation points.

        Returns:
            Union[float, NDArray[np.float64]]: The signal values, same shape as x.
        """

        u: NDArray[np.float64] = np.asarray(x, dtype=np.float64)

        if signal_id == "f1":
            values = np.exp(-5.0 * u**2) * np.cos(8.0 * u)
        elif signal_id == "f2":
            values = np.exp(-5.0 * u**2) * np.cos(12.0 * u)
        elif signal_id == "f3":
            # np.sinc is the normalized sinc, sin(pi v) / (pi v)
            values = np.sinc(4.0 * u / math.pi)
        elif signal_id == "f4":
            values = np.where(np.abs(u) < F4_HALF_WIDTH, np.cos(6.0 * u), 0.0)
        else:
            raise ValueError(f"Unknown signal id {signal_id!r}")

        return amplitude * values

    @classmethod
    def support_half_width(
        cls,
        signal_id: str,
        grid: Grid,
    ) -> float:
        """
        Half-width of the hidden window the signal is restricted to.

        Args:
            signal_id (str): The test signal.
            grid (Grid): The sampling grid.

        Returns:
            float: N/4, or pi/4 for the windowed cosine.
        """

        if signal_id == "f4":
            return min(F4_HALF_WIDTH, grid.N / 4.0)

        return grid.N / 4.0

    @classmethod
    def _hidden_values(
        cls,
        signal_id: str,
        amplitude: float,
        u: NDArray[np.float64],
        grid: Grid,
    ) -> NDArray[np.float64]:
        """Signal values restricted to the hidden window [-N/4, N/4]."""

        inside: NDArray[np.bool_] = np.abs(u) <= grid.N / 4.0

        return np.where(
            inside,
            cls.eval_signal(signal_id=signal_id, amplitude=amplitude, x=u),
            0.0,
        )

    @classmethod
    def sample_hidden(
        cls,
        params: ModelParams,
        grid: Grid,
    ) -> Signal:
        """
        Sample the hidden signal on the grid.

        Args:
            params (ModelParams): The model parameters (signal and amplitude).
            grid (Grid): The sampling grid.

        Returns:
            Signal: A * f on the grid, zero outside [-N/4, N/4].
        """

        return Signal(
            values=cls._hidden_values(
                signal_id=params.signal_id,
                amplitude=params.amplitude,
                u=grid.x,
                grid=grid,
            ),
            grid=grid,
        )

    @classmethod
    def calibrate_amplitude(
        cls,
        signal_id: str,
        grid: Grid,
    ) -> float:
        """
        Find the amplitude giving the hidden signal unit energy, so SNR = sigma^-2.

        Args:
            signal_id (str): The test signal.
            grid (Grid): The sampling grid.

        Returns:
            float: The amplitude A_i.

        Raises:
            CalibrationError: If the signal has (numerically) no energy on the grid.
        """

        values: NDArray[np.float64] = cls._hidden_values(
            signal_id=signal_id,
            amplitude=1.0,
            u=grid.x,
            grid=grid,
        )

        # Riemann sum with the same weights as the transform, so Plancherel is exact
        energy: float = float(grid.dx * np.sum(values**2))

        if energy < np.finfo(np.float64).eps:
            raise CalibrationError(signal_id=signal_id, energy=energy)

        return 1.0 / math.sqrt(energy)

    @classmethod
    def make_params(
        cls,
        signal_id: str,
        grid: Grid,
        sigma: float,
        eta: float,
    ) -> ModelParams:
        """
        Build calibrated model parameters.

        Args:
            signal_id (str): The test signal.
            grid (Grid): The sampling grid.
            sigma (float): The noise level.
            eta (float): The dilation scale.

        Returns:
            ModelParams: Parameters with the calibrated amplitude.
        """

        return ModelParams(
            signal_id=signal_id,
            amplitude=cls.calibrate_amplitude(signal_id=signal_id, grid=grid),
            sigma=sigma,
            eta=eta,
        )

    @classmethod
    def observation_rng(
        cls,
        seed: int,
        index: int,
    ) -> np.random.Generator:
        """
        Random stream of one observation, derived from (seed, index) only.

        Args:
            seed (int): The batch seed.
            index (int): The observation index.

        Returns:
            np.random.Generator: An independent generator for this observation.
        """

        return np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(index,))
        )

    @classmethod
    def draw_latent(
        cls,
        params: ModelParams,
        grid: Grid,
        rng: np.random.Generator,
    ) -> LatentDraw:
        """
        Draw a translation and a dilation parameter.

        Args:
            params (ModelParams): The model parameters.
            grid (Grid): The sampling grid.
            rng (np.random.Generator): The observation's random stream.

        Returns:
            LatentDraw: t uniform on [-N/8, N/8], tau uniform on [-sqrt(3) eta, sqrt(3) eta].
        """

        reach: float = grid.N * TRANSLATION_FRACTION

        return LatentDraw(
            t=float(rng.uniform(-reach, reach)),
            tau=float(rng.uniform(-params.half_width, params.half_width)),
        )

    @classmethod
    def _check_latent(
        cls,
        params: ModelParams,
        grid: Grid,
        latent: LatentDraw,
    ) -> None:
        # |tau| <= sqrt(3) eta with a little slack for rounding
        if abs(latent.tau) > params.half_width + 1e-12:
            raise LatentOutOfWindowError(t=latent.t, tau=latent.tau, half_window=grid.N / 2)

        reach: float = abs(latent.t) + (1.0 - latent.tau) * cls.support_half_width(
            signal_id=params.signal_id,
            grid=grid,
        )

        if reach > grid.N / 2.0 + 1e-12:
            raise LatentOutOfWindowError(t=latent.t, tau=latent.tau, half_window=grid.N / 2)

    @classmethod
    def _noise(
        cls,
        params: ModelParams,
        grid: Grid,
        rng: np.random.Generator,
    ) -> NDArray[np.float64]:
        # Variance sigma^2 / dx per node makes E|eps_hat(0)|^2 = sigma^2 N
        return (
            rng.standard_normal(grid.n_x)
            * (params.sigma / math.sqrt(grid.dx))
            * grid.noise_nodes
        )

    @classmethod
    def synthesize_observation(
        cls,
        params: ModelParams,
        grid: Grid,
        latent: LatentDraw,
        rng: np.random.Generator,
    ) -> Signal:
        """
        Produce one observation y(x) = f((1 - tau)^-1 (x - t)) + eps(x).

        Args:
            params (ModelParams): The model parameters.
            grid (Grid): The sampling grid.
            latent (LatentDraw): The translation and dilation.
            rng (np.random.Generator): The random stream used for the noise.

        Returns:
            Signal: The observation, signal evaluated analytically at the dilated nodes.

        Raises:
            LatentOutOfWindowError: If the transformed support leaves the window.
        """

        cls._check_latent(params=params, grid=grid, latent=latent)

        u: NDArray[np.float64] = (grid.x - latent.t) / (1.0 - latent.tau)

        values: NDArray[np.float64] = cls._hidden_values(
            signal_id=params.signal_id,
            amplitude=params.amplitude,
            u=u,
            grid=grid,
        )

        return Signal(
            values=values + cls._noise(params=params, grid=grid, rng=rng),
            grid=grid,
        )

    @classmethod
    def _synthesize_range(
        cls,
        params: ModelParams,
        grid: Grid,
        start: int,
        stop: int,
        seed: int,
    ) -> ObservationBatch:
        count: int = stop - start

        t: NDArray[np.float64] = np.empty(count)
        tau: NDArray[np.float64] = np.empty(count)
        noise: NDArray[np.float64] = np.empty((count, grid.n_x))

        # One generator per observation keeps results independent of chunking
        for row, index in enumerate(range(start, stop)):
            rng: np.random.Generator = cls.observation_rng(seed=seed, index=index)

            latent: LatentDraw = cls.draw_latent(params=params, grid=grid, rng=rng)

            cls._check_latent(params=params, grid=grid, latent=latent)

            t[row] = latent.t
            tau[row] = latent.tau
            noise[row] = cls._noise(params=params, grid=grid, rng=rng)

        u: NDArray[np.float64] = (grid.x[None, :] - t[:, None]) / (1.0 - tau[:, None])

        values: NDArray[np.float64] = cls._hidden_values(
            signal_id=params.signal_id,
            amplitude=params.amplitude,
            u=u,
            grid=grid,
        )

        return ObservationBatch(
            values=values + noise,
            t=t,
            tau=tau,
            grid=grid,
            start=start,
            params=params,
        )

    @classmethod
    def stream_batches(
        cls,
        params: ModelParams,
        grid: Grid,
        M: int,
        seed: int,
        chunk_size: int = 1024,
    ) -> Iterator[ObservationBatch]:
        """
        Yield the observations of a batch in contiguous chunks.

        Args:
            params (ModelParams): The model parameters.
            grid (Grid): The sampling grid.
            M (int): The total number of observations.
            seed (int): The batch seed.
            chunk_size (int): Observations per chunk. Defaults to 1024.

        Returns:
            Iterator[ObservationBatch]: Chunks in index order.
        """

        if M < 1:
            raise ValueError(f"Batch size must be at least 1, got {M}")

        for start in range(0, M, chunk_size):
            yield cls._synthesize_range(
                params=params,
                grid=grid,
                start=start,
                stop=min(start + chunk_size, M),
                seed=seed,
            )

    @classmethod
    def synthesize_batch(
        cls,
        params: ModelParams,
        grid: Grid,
        M: int,
        seed: int,
    ) -> ObservationBatch:
        """
        Produce M independent observations.

        Args:
            params (ModelParams): The model parameters.
            grid (Grid): The sampling grid.
            M (int): The number of observations.
            seed (int): The batch seed.

        Returns:
            ObservationBatch: All M observations, deterministic given the seed.
        """

        if M < 1:
            raise ValueError(f"Batch size must be at least 1, got {M}")

        batch: ObservationBatch = cls._synthesize_range(
            params=params,
            grid=grid,
            start=0,
            stop=M,
            seed=seed,
        )

        logger.debug(
            "Synthesized %d observations of %s (sigma=%g, eta=%g)",
            M,
            params.signal_id,
            params.sigma,
            params.eta,
        )

        return batch
