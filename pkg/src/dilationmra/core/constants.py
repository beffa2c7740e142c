"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import math

from typing import Final, Literal


__all__: Final[list[str]] = [
    "APS_MAX_ITERS",
    "APS_TOL",
    "CG_MAX_ITERS",
    "CG_RESIDUAL_TOL",
    "DEFAULT_ELL",
    "DEFAULT_N",
    "ETA_MAX",
    "ETA_SEARCH_EVALS",
    "ETA_SEARCH_MIN",
    "F4_HALF_WIDTH",
    "MIN_FREQUENCY_NODES",
    "MODULUS_FLOOR",
    "QUADRATURE_NODES",
    "SIGNAL_IDS",
    "SMOOTHING_PREFACTOR",
    "SignalId",
    "TRANSLATION_FRACTION",
]


SignalId = Literal["f1", "f2", "f3", "f4"]

SIGNAL_IDS: Final[tuple[str, ...]] = ("f1", "f2", "f3", "f4")

# Grid of the preset experiments
DEFAULT_N: Final[int] = 32
DEFAULT_ELL: Final[int] = 4
MIN_FREQUENCY_NODES: Final[int] = 8

# Largest admissible dilation scale, Var(tau) <= 1/12
ETA_MAX: Final[float] = 12.0**-0.5

# Translations are uniform on [-N * TRANSLATION_FRACTION, N * TRANSLATION_FRACTION]
TRANSLATION_FRACTION: Final[float] = 1.0 / 8.0

F4_HALF_WIDTH: Final[float] = math.pi / 4.0

# L = SMOOTHING_PREFACTOR * sigma * M^(-1/6)
SMOOTHING_PREFACTOR: Final[float] = 5.0

CG_RESIDUAL_TOL: Final[float] = 1e-8
CG_MAX_ITERS: Final[int] = 500

# Relative to max |B|
MODULUS_FLOOR: Final[float] = 1e-12

APS_TOL: Final[float] = 1e-8
APS_MAX_ITERS: Final[int] = 100

ETA_SEARCH_MIN: Final[float] = 1e-3
# Joint-loss evaluations of one eta search, coarse profile included
ETA_SEARCH_EVALS: Final[int] = 25

QUADRATURE_NODES: Final[int] = 128
