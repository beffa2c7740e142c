"""
Author: Louis Goodnews
Date: 2025-09-15

Shared fixtures: a small grid (N=8, ell=4) on which every kernel runs in
well under a second, and calibrated parameters for each test signal.
"""

import numpy as np
import pytest

from dilationmra.core.constants import ETA_MAX
from dilationmra.core.signal_model import Grid, ModelParams, SignalModelUtils


@pytest.fixture(scope="session")
def grid() -> Grid:
    return SignalModelUtils.make_grid(N=8, ell=4)


@pytest.fixture(scope="session")
def default_grid() -> Grid:
    return SignalModelUtils.make_grid(N=32, ell=4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def f1_params(grid: Grid) -> ModelParams:
    return SignalModelUtils.make_params(signal_id="f1", grid=grid, sigma=0.5, eta=ETA_MAX)


@pytest.fixture
def noiseless_params(grid: Grid) -> ModelParams:
    return SignalModelUtils.make_params(signal_id="f1", grid=grid, sigma=0.0, eta=ETA_MAX)
