"""
Author: Louis Goodnews
Date: 2025-09-15

Monte Carlo sweeps over the sample size, log-log slope fits and the result
files (CSV, SVG plot, run manifest) of an experiment.
"""

import logging
import math
import os
import platform
import time

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import metadata
from pathlib import Path
from typing import Any, Final, Literal, Mapping, Optional, Union

import numpy as np

from frozendict import frozendict
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .constants import DEFAULT_ELL, DEFAULT_N, ETA_MAX, SIGNAL_IDS, SignalId
from .estimate import EstimateUtils, EtaEstimate
from .exceptions import DilationMRAError, InsufficientPointsError, SerializationError
from .invert import InversionConfig, InvertUtils
from .signal_model import Grid, ModelParams, Signal, SignalModelUtils, dilation_constants
from .spectra import BispectrumField, SpectraUtils
from .unbias import CenteredMoments, OmegaSelector, SolverConfig, UnbiasUtils
from ..utils.utils import DataConversionUtils, FileUtils


__all__: Final[list[str]] = [
    "DESK_MAX_M",
    "FULL_MAX_M",
    "HarnessUtils",
    "PRESETS",
    "RESULT_COLUMNS",
    "ExperimentSpec",
    "ResultRow",
    "ResultTable",
]


logger: Final[logging.Logger] = logging.getLogger(__name__)


DESK_MAX_M: Final[int] = 2**18
FULL_MAX_M: Final[int] = 2**20

RESULT_COLUMNS: Final[tuple[str, ...]] = (
    "signal_id",
    "sigma",
    "M",
    "trial",
    "series",
    "bispectrum_rel_error",
    "signal_rel_error",
    "eta_hat",
    "sigma_hat",
    "error",
)

TIMING_COLUMNS: Final[tuple[str, ...]] = (
    "sigma",
    "M",
    "trial",
    "wall_time",
)

Series = Literal["UB", "NO UB"]
Metric = Literal["bispectrum_rel_error", "signal_rel_error", "eta_rel_error"]


class ExperimentSpec(BaseModel):
    """
    One sweep: a signal, a list of noise levels and a list of sample sizes.

    With ``unbias`` on, every trial reports the unbiased estimate ("UB") next
    to the centered mean ("NO UB"); with it off only the centered mean.
    """

    model_config = ConfigDict(frozen=True)

    name: str = "experiment"
    signal_id: SignalId = "f1"
    sigmas: list[float] = Field(default_factory=lambda: [0.5], min_length=1)
    eta: float = Field(default=ETA_MAX, ge=0.0, le=ETA_MAX)
    M: list[int] = Field(min_length=1)
    trials: int = Field(default=3, ge=1)
    mode: Literal["oracle", "empirical"] = "oracle"
    unbias: bool = True
    inversion: Literal["aps", "fm", "none"] = "none"
    seed: int = Field(default=0, ge=0)
    N: int = Field(default=DEFAULT_N, ge=1)
    ell: int = Field(default=DEFAULT_ELL, ge=0)
    L: Optional[float] = Field(default=None, gt=0.0)
    omega_mask: OmegaSelector = "disc"
    plot_metric: Metric = "bispectrum_rel_error"

    @field_validator("sigmas")
    @classmethod
    def _check_sigmas(
        cls,
        value: list[float],
    ) -> list[float]:
        if any(sigma < 0.0 for sigma in value):
            raise ValueError("noise levels must be non-negative")

        return value

    @field_validator("M")
    @classmethod
    def _check_sample_sizes(
        cls,
        value: list[int],
    ) -> list[int]:
        if any(m < 1 or m & (m - 1) for m in value):
            raise ValueError("sample sizes must be powers of two")

        # Check if the list is strictly increasing
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("sample sizes must be strictly increasing")

        return value

    def series(self) -> tuple[Series, ...]:
        return ("UB", "NO UB") if self.unbias else ("NO UB",)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(L=self.L, omega_mask=self.omega_mask)

    def inversion_config(self) -> Optional[InversionConfig]:
        if self.inversion == "none":
            return None

        return InversionConfig(method=self.inversion)


@dataclass(frozen=True)
class ResultRow:
    """
    The errors of one series of one trial. Failed trials carry the exception name in ``error``.
    """

    signal_id: str
    sigma: float
    M: int
    trial: int
    series: str
    bispectrum_rel_error: Optional[float] = None
    signal_rel_error: Optional[float] = None
    eta_hat: Optional[float] = None
    sigma_hat: Optional[float] = None
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    def key(self) -> tuple[float, int, int, int]:
        return (self.sigma, self.M, self.trial, 0 if self.series == "UB" else 1)

    def to_cells(self) -> tuple[str, ...]:
        to_str = DataConversionUtils.float_to_str

        return (
            self.signal_id,
            to_str(value=self.sigma),
            str(self.M),
            str(self.trial),
            self.series,
            to_str(value=self.bispectrum_rel_error),
            to_str(value=self.signal_rel_error),
            to_str(value=self.eta_hat),
            to_str(value=self.sigma_hat),
            self.error,
        )


@dataclass(frozen=True)
class ResultTable:
    """
    The rows of a sweep in canonical (sigma, M, trial, series) order.
    """

    spec: ExperimentSpec
    rows: tuple[ResultRow, ...] = ()

    def successful(self) -> tuple[ResultRow, ...]:
        return tuple(row for row in self.rows if row.ok)

    def failed(self) -> tuple[ResultRow, ...]:
        return tuple(row for row in self.rows if not row.ok)


PRESETS: Final[Mapping[str, Mapping[str, Any]]] = frozendict(
    {
        # Bispectrum error with the true sigma and eta
        **{
            f"oracle-{signal_id}": frozendict(
                name=f"oracle-{signal_id}",
                signal_id=signal_id,
                sigmas=(0.5, 1.0),
                M=tuple(2**k for k in range(12, 19)),
                mode="oracle",
            )
            for signal_id in SIGNAL_IDS
        },
        # Bispectrum error with estimated sigma and eta
        **{
            f"empirical-{signal_id}": frozendict(
                name=f"empirical-{signal_id}",
                signal_id=signal_id,
                sigmas=(0.5, 1.0),
                M=tuple(2**k for k in range(12, 19)),
                mode="empirical",
            )
            for signal_id in SIGNAL_IDS
        },
        "eta-estimation": frozendict(
            name="eta-estimation",
            signal_id="f1",
            sigmas=(0.5,),
            M=tuple(2**k for k in range(12, 19)),
            trials=5,
            mode="empirical",
            unbias=False,
            plot_metric="eta_rel_error",
        ),
        "inversion-oracle": frozendict(
            name="inversion-oracle",
            signal_id="f2",
            sigmas=(0.5,),
            M=tuple(2**k for k in range(12, 19)),
            mode="oracle",
            inversion="aps",
            plot_metric="signal_rel_error",
        ),
        "inversion-empirical": frozendict(
            name="inversion-empirical",
            signal_id="f2",
            sigmas=(1.0,),
            M=tuple(2**k for k in range(12, 19)),
            mode="empirical",
            inversion="aps",
            plot_metric="signal_rel_error",
        ),
        # Dilations only, no additive noise
        "dilation-only": frozendict(
            name="dilation-only",
            signal_id="f1",
            sigmas=(0.0,),
            M=tuple(2**k for k in range(10, 17)),
            mode="oracle",
        ),
    }
)


@dataclass(frozen=True)
class _Job:
    sigma_index: int
    sigma: float
    M_index: int
    M: int
    trial: int


class HarnessUtils:
    """
    A collection of utility functions for running and reporting experiments.
    """

    @classmethod
    def load_spec(
        cls,
        source: Union[str, Path],
        full: bool = False,
        **overrides: Any,
    ) -> ExperimentSpec:
        """
        Build an experiment from a preset name or a TOML file.

        Args:
            source (Union[str, Path]): A key of PRESETS or the path of a TOML file.
            full (bool): Whether to extend desk-scale sample sizes up to 2^20.
            **overrides: Field values taking precedence, None entries are ignored.

        Returns:
            ExperimentSpec: The validated experiment.

        Raises:
            SerializationError: If the source is neither a preset nor a readable file.
        """

        if str(source) in PRESETS:
            values: dict[str, Any] = {
                key: list(value) if isinstance(value, tuple) else value
                for key, value in PRESETS[str(source)].items()
            }
        elif Path(source).is_file():
            values = dict(FileUtils.read_toml(path=source))
        else:
            raise SerializationError(
                path=source,
                reason=f"neither a file nor one of the presets {', '.join(sorted(PRESETS))}",
            )

        values.update({key: value for key, value in overrides.items() if value is not None})

        spec: ExperimentSpec = ExperimentSpec(**values)

        if full:
            spec = cls.full_scale(spec=spec)

        return spec

    @classmethod
    def full_scale(
        cls,
        spec: ExperimentSpec,
    ) -> ExperimentSpec:
        """Extend a sweep ending at 2^18 up to 2^20."""

        if spec.M[-1] != DESK_MAX_M:
            return spec

        extra: list[int] = [2**k for k in range(19, int(math.log2(FULL_MAX_M)) + 1)]

        return spec.model_copy(update={"M": [*spec.M, *extra]})

    @classmethod
    def job_seed(
        cls,
        seed: int,
        sigma_index: int,
        M_index: int,
        trial: int,
    ) -> int:
        """
        Batch seed of one job, a function of the experiment seed and the job key only.

        Args:
            seed (int): The experiment seed.
            sigma_index (int): Position in the noise-level list.
            M_index (int): Position in the sample-size list.
            trial (int): The trial number.

        Returns:
            int: The batch seed.
        """

        return int(
            np.random.SeedSequence(
                entropy=seed,
                spawn_key=(sigma_index, M_index, trial),
            ).generate_state(1)[0]
        )

    @classmethod
    def _jobs(
        cls,
        spec: ExperimentSpec,
    ) -> list[_Job]:
        return [
            _Job(sigma_index=si, sigma=sigma, M_index=mi, M=M, trial=trial)
            for si, sigma in enumerate(spec.sigmas)
            for mi, M in enumerate(spec.M)
            for trial in range(spec.trials)
        ]

    @classmethod
    def _invert(
        cls,
        bispectrum: BispectrumField,
        power: NDArray[np.float64],
        hidden: Signal,
        cfg: InversionConfig,
    ) -> float:
        recovered: Signal = InvertUtils.recover_signal(bispectrum=bispectrum, power=power, cfg=cfg)

        return InvertUtils.aligned_relative_error(reference=hidden, estimate=recovered)

    @classmethod
    def _run_job(
        cls,
        spec: ExperimentSpec,
        grid: Grid,
        job: _Job,
    ) -> list[ResultRow]:
        started: float = time.perf_counter()

        params: ModelParams = SignalModelUtils.make_params(
            signal_id=spec.signal_id,
            grid=grid,
            sigma=job.sigma,
            eta=spec.eta,
        )

        accumulator = UnbiasUtils.accumulate(
            params=params,
            grid=grid,
            M=job.M,
            seed=cls.job_seed(
                seed=spec.seed,
                sigma_index=job.sigma_index,
                M_index=job.M_index,
                trial=job.trial,
            ),
        )

        cfg: SolverConfig = spec.solver_config()

        sigma_hat: Optional[float] = None
        eta_hat: Optional[float] = None
        estimate: Optional[EtaEstimate] = None

        if spec.mode == "empirical":
            sigma_hat = EstimateUtils.estimate_sigma(batch=accumulator, grid=grid)

            estimate = EstimateUtils.joint_estimate_eta_power(
                batch=accumulator,
                sigma=sigma_hat,
                grid=grid,
                cfg=cfg,
            )

            eta_hat = estimate.eta

        sigma: float = job.sigma if sigma_hat is None else sigma_hat
        eta: float = spec.eta if eta_hat is None else eta_hat

        moments: CenteredMoments = accumulator.centered(sigma=sigma)

        hidden: Signal = SignalModelUtils.sample_hidden(params=params, grid=grid)
        reference: BispectrumField = SpectraUtils.bispectrum(
            spectrum=SpectraUtils.dft(signal=hidden),
        )

        domain: NDArray[np.bool_] = UnbiasUtils.omega_domain(
            grid=grid,
            C0=dilation_constants(eta=spec.eta)[0],
            selector=spec.omega_mask,
        )

        inversion: Optional[InversionConfig] = spec.inversion_config()

        estimates: dict[str, tuple[BispectrumField, NDArray[np.float64]]] = {
            "NO UB": (moments.mean_bispectrum, np.maximum(moments.mean_power, 0.0)),
        }

        if spec.unbias:
            estimates["UB"] = (
                UnbiasUtils.recover_bispectrum(moments=moments, eta=eta, cfg=cfg),
                (
                    estimate.power
                    if estimate is not None
                    else UnbiasUtils.recover_power(moments=moments, eta=eta, cfg=cfg)
                ),
            )

        rows: list[ResultRow] = []

        for series in spec.series():
            (
                bispectrum,
                power,
            ) = estimates[series]

            rows.append(
                ResultRow(
                    signal_id=spec.signal_id,
                    sigma=job.sigma,
                    M=job.M,
                    trial=job.trial,
                    series=series,
                    bispectrum_rel_error=SpectraUtils.relative_error(
                        reference=reference,
                        estimate=bispectrum,
                        mask=domain,
                    ),
                    signal_rel_error=(
                        None
                        if inversion is None
                        else cls._invert(
                            bispectrum=bispectrum,
                            power=power,
                            hidden=hidden,
                            cfg=inversion,
                        )
                    ),
                    eta_hat=eta_hat,
                    sigma_hat=sigma_hat,
                )
            )

        elapsed: float = time.perf_counter() - started

        logger.info(
            "Finished sigma=%g M=%d trial=%d in %.2fs",
            job.sigma,
            job.M,
            job.trial,
            elapsed,
        )

        return [replace(row, wall_time=elapsed) for row in rows]

    @classmethod
    def _safe_job(
        cls,
        spec: ExperimentSpec,
        grid: Grid,
        job: _Job,
    ) -> list[ResultRow]:
        started: float = time.perf_counter()

        try:
            return cls._run_job(spec=spec, grid=grid, job=job)
        except (DilationMRAError, ValueError, ArithmeticError) as error:
            logger.warning(
                "Trial sigma=%g M=%d trial=%d failed: %s",
                job.sigma,
                job.M,
                job.trial,
                error,
            )

            return [
                ResultRow(
                    signal_id=spec.signal_id,
                    sigma=job.sigma,
                    M=job.M,
                    trial=job.trial,
                    series=series,
                    wall_time=time.perf_counter() - started,
                    error=type(error).__name__,
                )
                for series in spec.series()
            ]

    @classmethod
    def run_experiment(
        cls,
        spec: ExperimentSpec,
        threads: Optional[int] = None,
    ) -> ResultTable:
        """
        Run every (sigma, M, trial) job of a sweep on a bounded thread pool.

        Each job draws its batch from a seed derived from the experiment seed
        and the job key, so the table does not depend on the thread count or
        on completion order. A failing job yields rows carrying the exception
        name instead of aborting the sweep.

        Args:
            spec (ExperimentSpec): The experiment.
            threads (Optional[int]): Worker count; defaults to min(4, cpu count).

        Returns:
            ResultTable: The rows in canonical order.
        """

        grid: Grid = SignalModelUtils.make_grid(N=spec.N, ell=spec.ell)
        jobs: list[_Job] = cls._jobs(spec=spec)

        workers: int = threads or min(4, os.cpu_count() or 1)

        logger.info(
            "Running %s: %s, %d jobs on %d threads",
            spec.name,
            spec.signal_id,
            len(jobs),
            workers,
        )

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results: list[list[ResultRow]] = list(
                pool.map(lambda job: cls._safe_job(spec=spec, grid=grid, job=job), jobs)
            )

        rows: list[ResultRow] = sorted(
            (row for chunk in results for row in chunk),
            key=lambda row: row.key(),
        )

        table: ResultTable = ResultTable(spec=spec, rows=tuple(rows))

        if table.failed():
            logger.warning("%d of %d rows failed", len(table.failed()), len(rows))

        return table

    @classmethod
    def metric_value(
        cls,
        row: ResultRow,
        metric: Metric,
        eta: float,
    ) -> Optional[float]:
        """
        The value of a metric for one row.

        Args:
            row (ResultRow): The row.
            metric (Metric): A row column, or "eta_rel_error" for |eta_hat - eta| / eta.
            eta (float): The true dilation scale.

        Returns:
            Optional[float]: The value, or None when the row does not carry it.
        """

        if metric != "eta_rel_error":
            return getattr(row, metric)

        if row.eta_hat is None or eta == 0.0:
            return None

        return abs(row.eta_hat - eta) / eta

    @classmethod
    def trial_statistics(
        cls,
        table: ResultTable,
        series: str,
        sigma: float,
        metric: Metric = "bispectrum_rel_error",
    ) -> tuple[NDArray[np.int64], NDArray[np.float64], NDArray[np.float64]]:
        """
        Trial mean and standard error of a metric at each sample size.

        Args:
            table (ResultTable): The results.
            series (str): "UB" or "NO UB".
            sigma (float): The noise level.
            metric (Metric): The metric.

        Returns:
            tuple[NDArray[np.int64], NDArray[np.float64], NDArray[np.float64]]:
                The sample sizes with at least one value, the means and the standard errors.
        """

        grouped: dict[int, list[float]] = {}

        for row in table.successful():
            if row.series != series or row.sigma != sigma:
                continue

            value: Optional[float] = cls.metric_value(row=row, metric=metric, eta=table.spec.eta)

            if value is not None and math.isfinite(value):
                grouped.setdefault(row.M, []).append(value)

        sizes: list[int] = sorted(grouped)

        means: list[float] = [float(np.mean(grouped[m])) for m in sizes]
        errors: list[float] = [
            float(np.std(grouped[m], ddof=1) / math.sqrt(len(grouped[m])))
            if len(grouped[m]) > 1
            else 0.0
            for m in sizes
        ]

        return np.array(sizes, dtype=np.int64), np.array(means), np.array(errors)

    @classmethod
    def fit_loglog_slope(
        cls,
        table: ResultTable,
        series: str = "UB",
        sigma: Optional[float] = None,
        metric: Metric = "bispectrum_rel_error",
    ) -> float:
        """
        Least-squares slope of log(trial-mean error) against log M.

        Args:
            table (ResultTable): The results.
            series (str): "UB" or "NO UB". Defaults to "UB".
            sigma (Optional[float]): The noise level; defaults to the first of the experiment.
            metric (Metric): The metric. Defaults to the bispectrum error.

        Returns:
            float: The fitted slope.

        Raises:
            InsufficientPointsError: If fewer than three sample sizes have a positive mean error.
        """

        if sigma is None:
            sigma = table.spec.sigmas[0]

        (
            sizes,
            means,
            _,
        ) = cls.trial_statistics(table=table, series=series, sigma=sigma, metric=metric)

        positive: NDArray[np.bool_] = means > 0.0

        if int(positive.sum()) < 3:
            raise InsufficientPointsError(found=int(positive.sum()), required=3)

        (
            slope,
            _,
        ) = np.polyfit(np.log(sizes[positive]), np.log(means[positive]), deg=1)

        return float(slope)

    @classmethod
    def slopes(
        cls,
        table: ResultTable,
    ) -> dict[tuple[str, float], float]:
        """Fitted slopes of the plotted metric for every (series, sigma) with enough points."""

        fitted: dict[tuple[str, float], float] = {}

        for sigma in table.spec.sigmas:
            for series in table.spec.series():
                try:
                    fitted[(series, sigma)] = cls.fit_loglog_slope(
                        table=table,
                        series=series,
                        sigma=sigma,
                        metric=table.spec.plot_metric,
                    )
                except InsufficientPointsError:
                    continue

        return fitted

    @classmethod
    def write_results(
        cls,
        table: ResultTable,
        path: Union[str, Path],
    ) -> Path:
        """Write the result rows, header fixed, wall time excluded."""

        return FileUtils.write_csv(
            path=path,
            header=RESULT_COLUMNS,
            rows=(row.to_cells() for row in table.rows),
        )

    @classmethod
    def write_timings(
        cls,
        table: ResultTable,
        path: Union[str, Path],
    ) -> Path:
        """Write the wall time of every job as an ISO 8601 duration."""

        jobs: dict[tuple[float, int, int], float] = {
            (row.sigma, row.M, row.trial): row.wall_time for row in table.rows
        }

        return FileUtils.write_csv(
            path=path,
            header=TIMING_COLUMNS,
            rows=(
                (
                    DataConversionUtils.float_to_str(value=sigma),
                    str(M),
                    str(trial),
                    DataConversionUtils.seconds_to_str(value=seconds),
                )
                for (sigma, M, trial), seconds in sorted(jobs.items())
            ),
        )

    @classmethod
    def write_plot(
        cls,
        table: ResultTable,
        path: Union[str, Path],
    ) -> Optional[Path]:
        """
        Log-log plot of the trial-mean metric against M, one line per (series, sigma).

        Error bars are standard errors over trials. Nothing is written when the
        table has no successful row.

        Args:
            table (ResultTable): The results.
            path (Union[str, Path]): The SVG destination.

        Returns:
            Optional[Path]: The written path, or None.
        """

        if not table.successful():
            return None

        import matplotlib

        from matplotlib.backends.backend_agg import FigureCanvasAgg
        from matplotlib.figure import Figure

        spec: ExperimentSpec = table.spec
        fitted: dict[tuple[str, float], float] = cls.slopes(table=table)

        figure: Figure = Figure(figsize=(5.0, 4.0))
        FigureCanvasAgg(figure)

        axes = figure.add_subplot(1, 1, 1)

        plotted: int = 0

        for sigma in spec.sigmas:
            for series in spec.series():
                (
                    sizes,
                    means,
                    errors,
                ) = cls.trial_statistics(
                    table=table,
                    series=series,
                    sigma=sigma,
                    metric=spec.plot_metric,
                )

                if sizes.size == 0:
                    continue

                label: str = f"{series}, sigma={sigma:g}"

                if (series, sigma) in fitted:
                    label += f" (slope {fitted[(series, sigma)]:.2f})"

                axes.errorbar(
                    sizes,
                    means,
                    yerr=errors,
                    marker="o",
                    capsize=3,
                    label=label,
                )

                plotted += 1

        if plotted == 0:
            return None

        axes.set_xscale("log", base=2)
        axes.set_yscale("log")
        axes.set_xlabel("M")
        axes.set_ylabel(spec.plot_metric.replace("_", " "))
        axes.set_title(f"{spec.name}: {spec.signal_id}, {spec.mode} parameters")
        axes.legend(title="error bars: standard error over trials", fontsize="small")

        path = Path(path)

        try:
            path.parent.mkdir(parents=True, exist_ok=True)

            with matplotlib.rc_context({"svg.hashsalt": "dilationmra", "svg.fonttype": "path"}):
                figure.savefig(path, format="svg", metadata={"Date": None})
        except OSError as error:
            raise SerializationError(path=path, reason=str(error)) from error

        return path

    @classmethod
    def _versions(cls) -> Mapping[str, str]:
        versions: dict[str, str] = {"python": platform.python_version()}

        for package in ("dilationmra", "numpy", "scipy", "pydantic", "matplotlib"):
            try:
                versions[package] = metadata.version(package)
            except metadata.PackageNotFoundError:
                versions[package] = "unknown"

        return frozendict(versions)

    @classmethod
    def write_manifest(
        cls,
        table: ResultTable,
        path: Union[str, Path],
    ) -> Path:
        """
        Write the run manifest: experiment echo, seed, package versions and fitted slopes.

        Args:
            table (ResultTable): The results.
            path (Union[str, Path]): The destination.

        Returns:
            Path: The written path.
        """

        echo: Mapping[str, Any] = frozendict(table.spec.model_dump())

        lines: list[str] = ["[experiment]"]
        lines += [f"{key} = {echo[key]!r}" for key in sorted(echo)]

        lines += ["", "[versions]"]
        lines += [f"{key} = {value}" for key, value in cls._versions().items()]

        lines += ["", "[slopes]"]
        lines += [
            f"{series}, sigma={sigma!r} = {slope!r}"
            for (series, sigma), slope in sorted(cls.slopes(table=table).items())
        ]

        lines += ["", "[rows]", f"total = {len(table.rows)}", f"failed = {len(table.failed())}"]

        path = Path(path)

        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as error:
            raise SerializationError(path=path, reason=str(error)) from error

        return path

    @classmethod
    def emit_outputs(
        cls,
        table: ResultTable,
        out_dir: Union[str, Path],
    ) -> dict[str, Path]:
        """
        Write results.csv, timings.csv, results.svg and manifest.txt into a directory.

        Args:
            table (ResultTable): The results.
            out_dir (Union[str, Path]): The output directory.

        Returns:
            dict[str, Path]: The written files by kind; "plot" is absent for an empty table.

        Raises:
            SerializationError: If a file cannot be written.
        """

        out_dir = Path(out_dir)

        written: dict[str, Path] = {
            "results": cls.write_results(table=table, path=out_dir / "results.csv"),
            "timings": cls.write_timings(table=table, path=out_dir / "timings.csv"),
        }

        plot: Optional[Path] = cls.write_plot(table=table, path=out_dir / "results.svg")

        if plot is not None:
            written["plot"] = plot

        written["manifest"] = cls.write_manifest(table=table, path=out_dir / "manifest.txt")

        logger.info("Wrote %s", ", ".join(str(path) for path in written.values()))

        return written
