"""
Author: Louis Goodnews
Date: 2025-09-15
"""

from typing import Final, Literal

from .core.estimate import EstimateUtils, EtaEstimate
from .core.exceptions import (
    CalibrationError,
    DegenerateBispectrumError,
    DilationMRAError,
    GridError,
    InsufficientPointsError,
    InvalidEtaError,
    InvalidParameterError,
    LatentOutOfWindowError,
    NonConvergenceError,
    SearchFailureError,
    SerializationError,
    ZeroReferenceError,
)
from .core.harness import PRESETS, ExperimentSpec, HarnessUtils, ResultRow, ResultTable
from .core.invert import InversionConfig, InvertUtils, PhaseVector
from .core.oracle import OracleUtils
from .core.signal_model import (
    Grid,
    LatentDraw,
    ModelParams,
    ObservationBatch,
    Signal,
    SignalModelUtils,
    dilation_constants,
)
from .core.spectra import BispectrumAccumulator, BispectrumField, SpectraUtils, Spectrum
from .core.unbias import CenteredMoments, MomentAccumulator, SolverConfig, UnbiasUtils
from .utils.utils import DataConversionUtils, FileUtils


__all__: Final[list[str]] = [
    "BispectrumAccumulator",
    "BispectrumField",
    "CalibrationError",
    "CenteredMoments",
    "DataConversionUtils",
    "DegenerateBispectrumError",
    "DilationMRAError",
    "EstimateUtils",
    "EtaEstimate",
    "ExperimentSpec",
    "FileUtils",
    "Grid",
    "GridError",
    "HarnessUtils",
    "InsufficientPointsError",
    "InvalidEtaError",
    "InvalidParameterError",
    "InversionConfig",
    "InvertUtils",
    "LatentDraw",
    "LatentOutOfWindowError",
    "ModelParams",
    "MomentAccumulator",
    "NonConvergenceError",
    "ObservationBatch",
    "OracleUtils",
    "PRESETS",
    "PhaseVector",
    "ResultRow",
    "ResultTable",
    "SearchFailureError",
    "SerializationError",
    "Signal",
    "SignalModelUtils",
    "SolverConfig",
    "SpectraUtils",
    "Spectrum",
    "UnbiasUtils",
    "ZeroReferenceError",
    "dilation_constants",
]

__version__: Final[Literal["0.1.0"]] = "0.1.0"
