"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import argparse
import logging
import sys

from pathlib import Path
from typing import Final, Optional, Sequence

from pydantic import ValidationError

from .core.constants import DEFAULT_ELL, DEFAULT_N, ETA_MAX, SIGNAL_IDS
from .core.estimate import EstimateUtils, EtaEstimate
from .core.exceptions import DilationMRAError
from .core.harness import PRESETS, HarnessUtils, ResultTable
from .core.invert import InversionConfig, InvertUtils
from .core.signal_model import ObservationBatch, SignalModelUtils
from .core.unbias import MomentAccumulator, SolverConfig, UnbiasUtils
from .utils.utils import FileUtils


__all__: Final[list[str]] = ["build_parser", "main"]


logger: Final[logging.Logger] = logging.getLogger(__name__)

LOG_FORMAT: Final[str] = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _common_flags() -> argparse.ArgumentParser:
    common: argparse.ArgumentParser = argparse.ArgumentParser(add_help=False)

    common.add_argument("--seed", type=int, default=None, help="random seed (default: 0)")
    common.add_argument(
        "--out-dir",
        type=Path,
        default=Path("."),
        help="directory for the written files (default: current directory)",
    )
    common.add_argument("--threads", type=int, default=None, help="worker threads")
    common.add_argument("--verbose", action="store_true", help="log solver iterations")
    common.add_argument(
        "--full",
        action="store_true",
        help="extend desk-scale sweeps to M = 2^20",
    )

    return common


def build_parser() -> argparse.ArgumentParser:
    """
    Build the command-line parser.

    Returns:
        argparse.ArgumentParser: The parser with one subcommand per pipeline stage.
    """

    common: argparse.ArgumentParser = _common_flags()

    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        prog="dilationmra",
        description="Signal recovery from translated, dilated and noisy observations.",
    )

    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", parents=[common], help="synthesize observations")
    synth.add_argument("--signal", choices=SIGNAL_IDS, default="f1")
    synth.add_argument("--sigma", type=float, default=0.5)
    synth.add_argument("--eta", type=float, default=ETA_MAX)
    synth.add_argument("-M", "--observations", type=int, default=1024, dest="M")
    synth.add_argument("--N", type=int, default=DEFAULT_N)
    synth.add_argument("--ell", type=int, default=DEFAULT_ELL)

    recover = commands.add_parser(
        "recover-bispectrum",
        parents=[common],
        help="unbiased bispectrum and power spectrum of observations",
    )
    recover.add_argument("observations", type=Path)
    recover.add_argument("--sigma", type=float, default=None, help="estimated when omitted")
    recover.add_argument("--eta", type=float, default=None, help="estimated when omitted")
    recover.add_argument("--L", type=float, default=None, help="smoothing width")
    recover.add_argument("--omega-mask", choices=("disc", "square", "valid"), default="disc")

    estimate = commands.add_parser("estimate", parents=[common], help="estimate sigma and eta")
    estimate.add_argument("observations", type=Path)
    estimate.add_argument("--sigma", type=float, default=None, help="estimated when omitted")

    invert = commands.add_parser("invert", parents=[common], help="recover the signal")
    invert.add_argument("bispectrum", type=Path)
    invert.add_argument("power", type=Path)
    invert.add_argument("--method", choices=("aps", "fm"), default="aps")

    experiment = commands.add_parser(
        "experiment",
        parents=[common],
        help="run a preset or a TOML experiment",
    )
    experiment.add_argument(
        "source",
        help=f"preset ({', '.join(sorted(PRESETS))}) or path to a TOML file",
    )
    experiment.add_argument("--signal", choices=SIGNAL_IDS, default=None)
    experiment.add_argument("--trials", type=int, default=None)

    return parser


def _accumulate(path: Path, bispectrum: bool = True) -> MomentAccumulator:
    batch: ObservationBatch = FileUtils.read_observations(path=path)

    accumulator: MomentAccumulator = MomentAccumulator(
        grid=batch.grid,
        bispectrum=bispectrum,
    )
    accumulator.add_batch(batch=batch)

    return accumulator


def _synth(args: argparse.Namespace) -> None:
    seed: int = 0 if args.seed is None else args.seed

    grid = SignalModelUtils.make_grid(N=args.N, ell=args.ell)
    params = SignalModelUtils.make_params(
        signal_id=args.signal,
        grid=grid,
        sigma=args.sigma,
        eta=args.eta,
    )

    batch: ObservationBatch = SignalModelUtils.synthesize_batch(
        params=params,
        grid=grid,
        M=args.M,
        seed=seed,
    )

    header = {
        "signal_id": params.signal_id,
        "amplitude": params.amplitude,
        "sigma": params.sigma,
        "eta": params.eta,
        "seed": seed,
    }

    FileUtils.write_observations(batch=batch, path=args.out_dir / "observations.csv", **header)
    FileUtils.write_signal(
        signal=SignalModelUtils.sample_hidden(params=params, grid=grid),
        path=args.out_dir / "hidden.csv",
        **header,
    )


def _estimate_nuisance(
    accumulator: MomentAccumulator,
    sigma: Optional[float],
    cfg: SolverConfig,
) -> tuple[float, EtaEstimate]:
    if sigma is None:
        sigma = EstimateUtils.estimate_sigma(batch=accumulator, grid=accumulator.grid)

    return sigma, EstimateUtils.joint_estimate_eta_power(
        batch=accumulator,
        sigma=sigma,
        grid=accumulator.grid,
        cfg=cfg,
    )


def _recover_bispectrum(args: argparse.Namespace) -> None:
    accumulator: MomentAccumulator = _accumulate(path=args.observations)
    cfg: SolverConfig = SolverConfig(L=args.L, omega_mask=args.omega_mask)

    sigma: Optional[float] = args.sigma

    if sigma is None:
        sigma = EstimateUtils.estimate_sigma(batch=accumulator, grid=accumulator.grid)

    eta: Optional[float] = args.eta

    if eta is None:
        (
            sigma,
            estimate,
        ) = _estimate_nuisance(accumulator=accumulator, sigma=sigma, cfg=cfg)

        eta = estimate.eta

    moments = accumulator.centered(sigma=sigma)

    FileUtils.write_bispectrum(
        field=UnbiasUtils.recover_bispectrum(moments=moments, eta=eta, cfg=cfg),
        path=args.out_dir / "bispectrum.csv",
        sigma=sigma,
        eta=eta,
        M=accumulator.count,
    )
    FileUtils.write_vector(
        path=args.out_dir / "power.csv",
        grid=accumulator.grid,
        columns=("omega", "power"),
        values=UnbiasUtils.recover_power(moments=moments, eta=eta, cfg=cfg),
        sigma=sigma,
        eta=eta,
        M=accumulator.count,
    )


def _estimate(args: argparse.Namespace) -> None:
    accumulator: MomentAccumulator = _accumulate(path=args.observations, bispectrum=False)

    (
        sigma,
        estimate,
    ) = _estimate_nuisance(accumulator=accumulator, sigma=args.sigma, cfg=SolverConfig())

    FileUtils.write_profile(profile=estimate.profile, path=args.out_dir / "eta_profile.csv")
    FileUtils.write_vector(
        path=args.out_dir / "power.csv",
        grid=accumulator.grid,
        columns=("omega", "power"),
        values=estimate.power,
        sigma=sigma,
        eta=estimate.eta,
        M=accumulator.count,
    )

    print(f"sigma_hat = {sigma!r}")
    print(f"eta_hat = {estimate.eta!r}")


def _invert(args: argparse.Namespace) -> None:
    bispectrum = FileUtils.read_bispectrum(path=args.bispectrum)

    (
        _,
        power,
    ) = FileUtils.read_vector(path=args.power, columns=("omega", "power"))

    FileUtils.write_signal(
        signal=InvertUtils.recover_signal(
            bispectrum=bispectrum,
            power=power,
            cfg=InversionConfig(method=args.method),
        ),
        path=args.out_dir / "signal.csv",
        method=args.method,
    )


def _experiment(args: argparse.Namespace) -> None:
    spec = HarnessUtils.load_spec(
        source=args.source,
        full=args.full,
        seed=args.seed,
        signal_id=args.signal,
        trials=args.trials,
    )

    table: ResultTable = HarnessUtils.run_experiment(spec=spec, threads=args.threads)

    HarnessUtils.emit_outputs(table=table, out_dir=args.out_dir / spec.name)

    for (series, sigma), slope in sorted(HarnessUtils.slopes(table=table).items()):
        print(f"{spec.name} {series} sigma={sigma:g}: slope {slope:.3f}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name; sys.argv by default.

    Returns:
        int: The exit status, 1 when a domain or configuration error stops the command.
    """

    args: argparse.Namespace = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
    )

    handlers = {
        "synth": _synth,
        "recover-bispectrum": _recover_bispectrum,
        "estimate": _estimate,
        "invert": _invert,
        "experiment": _experiment,
    }

    try:
        handlers[args.command](args)
    except (DilationMRAError, ValidationError, ValueError) as error:
        logger.error("%s: %s", type(error).__name__, error)

        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
