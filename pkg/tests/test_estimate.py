"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import math

import numpy as np
import pytest

from dilationmra.core.constants import ETA_MAX, ETA_SEARCH_EVALS, ETA_SEARCH_MIN
from dilationmra.core.estimate import EstimateUtils
from dilationmra.core.exceptions import SearchFailureError
from dilationmra.core.oracle import OracleUtils
from dilationmra.core.signal_model import Grid, ObservationBatch, SignalModelUtils
from dilationmra.core.unbias import MomentAccumulator, SolverConfig, UnbiasUtils


def _coarse_etas() -> np.ndarray:
    return np.exp(np.linspace(math.log(ETA_SEARCH_MIN), math.log(ETA_MAX), 9))


def _patch_loss(monkeypatch, loss):
    """Replace the inner power solve by a closed-form loss of eta."""

    def _fake(cls, centered_power, eta, grid, cfg, domain):
        return loss(eta), np.zeros(grid.n_omega)

    monkeypatch.setattr(EstimateUtils, "_candidate_loss", classmethod(_fake))


class TestEstimateSigma:
    """Noise level from the high-frequency tail."""

    def test_tail_mask(self, grid: Grid):
        mask = EstimateUtils.tail_mask(grid=grid)

        assert mask.sum() == grid.intervals
        assert np.all(np.abs(grid.omega[mask]) > 0.5 * grid.omega_max)

    def test_flat_power(self, grid: Grid):
        sigma = EstimateUtils.estimate_sigma_from_power(
            mean_power=np.full(grid.n_omega, 0.09 * grid.N), grid=grid
        )

        assert sigma == pytest.approx(0.3)

    def test_negative_level_is_clamped(self, grid: Grid):
        assert EstimateUtils.estimate_sigma_from_power(
            mean_power=np.full(grid.n_omega, -1.0), grid=grid
        ) == 0.0

    def test_synthetic_batch(self, grid: Grid, f1_params):
        batch = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=200, seed=9)

        assert EstimateUtils.estimate_sigma(batch=batch, grid=grid) == pytest.approx(
            f1_params.sigma, rel=3e-2
        )

    def test_accumulator_agrees_with_batch(self, grid: Grid, f1_params):
        batch = SignalModelUtils.synthesize_batch(params=f1_params, grid=grid, M=20, seed=9)

        accumulator = MomentAccumulator(grid=grid, bispectrum=False)
        accumulator.add_batch(batch=batch)

        assert EstimateUtils.estimate_sigma(batch=accumulator, grid=grid) == pytest.approx(
            EstimateUtils.estimate_sigma(batch=batch, grid=grid), rel=1e-12
        )

    def test_empty_batch(self, grid: Grid):
        empty = ObservationBatch(
            values=np.empty((0, grid.n_x)),
            t=np.empty(0),
            tau=np.empty(0),
            grid=grid,
        )

        with pytest.raises(ValueError):
            EstimateUtils.estimate_sigma(batch=empty, grid=grid)


class TestSearchEta:
    """Log-scale search over the dilation scale."""

    def test_finds_single_valley(self, grid: Grid, monkeypatch):
        _patch_loss(monkeypatch, lambda eta: (math.log(eta) - math.log(0.05)) ** 2)

        estimate = EstimateUtils.search_eta(centered_power=np.zeros(grid.n_omega), grid=grid)

        assert estimate.eta == pytest.approx(0.05, rel=1e-3)
        assert len(estimate.profile) > 9
        assert estimate.profile == sorted(estimate.profile)

    def test_stays_within_evaluation_budget(self, grid: Grid, monkeypatch):
        evaluated = []

        def _loss(eta):
            evaluated.append(eta)

            return (math.log(eta) - math.log(0.05)) ** 2

        _patch_loss(monkeypatch, _loss)

        EstimateUtils.search_eta(centered_power=np.zeros(grid.n_omega), grid=grid)

        assert 9 < len(evaluated) <= ETA_SEARCH_EVALS

    def test_valley_at_upper_bound(self, grid: Grid, monkeypatch):
        _patch_loss(monkeypatch, lambda eta: -math.log(eta))

        estimate = EstimateUtils.search_eta(centered_power=np.zeros(grid.n_omega), grid=grid)

        assert estimate.eta == pytest.approx(ETA_MAX, rel=1e-3)

    def test_two_equal_valleys_fail(self, grid: Grid, monkeypatch):
        (
            first,
            second,
        ) = _coarse_etas()[[2, 6]]

        _patch_loss(
            monkeypatch,
            lambda eta: min(
                (math.log(eta) - math.log(first)) ** 2,
                (math.log(eta) - math.log(second)) ** 2,
            ),
        )

        with pytest.raises(SearchFailureError) as info:
            EstimateUtils.search_eta(centered_power=np.zeros(grid.n_omega), grid=grid)

        assert len(info.value.profile) == 9

    def test_unequal_valleys_keep_deepest(self, grid: Grid, monkeypatch):
        (
            first,
            second,
        ) = _coarse_etas()[[2, 6]]

        _patch_loss(
            monkeypatch,
            lambda eta: min(
                1.0 + (math.log(eta) - math.log(first)) ** 2,
                (math.log(eta) - math.log(second)) ** 2,
            ),
        )

        estimate = EstimateUtils.search_eta(centered_power=np.zeros(grid.n_omega), grid=grid)

        assert estimate.eta == pytest.approx(second, rel=1e-3)

    def test_joint_estimate_centers_power(self, grid: Grid, f1_params, monkeypatch):
        captured = {}

        def _fake_search(cls, centered_power, grid, cfg=None):
            captured["power"] = centered_power
            captured["cfg"] = cfg

        monkeypatch.setattr(EstimateUtils, "search_eta", classmethod(_fake_search))

        accumulator = UnbiasUtils.accumulate(
            params=f1_params, grid=grid, M=64, seed=3, bispectrum=False
        )

        EstimateUtils.joint_estimate_eta_power(
            batch=accumulator, sigma=f1_params.sigma, grid=grid
        )

        np.testing.assert_allclose(
            captured["power"], accumulator.mean_power() - 0.25 * grid.N
        )
        assert captured["cfg"].L == pytest.approx(5.0 * 0.5 * 64 ** (-1.0 / 6.0))

    @pytest.mark.slow
    def test_oracle_power_gives_eta(self, default_grid: Grid):
        q_eta = OracleUtils.quadrature_power(signal_id="f1", eta=ETA_MAX, grid=default_grid)

        estimate = EstimateUtils.search_eta(centered_power=q_eta, grid=default_grid)

        assert estimate.eta == pytest.approx(ETA_MAX, rel=5e-2)
        assert np.all(estimate.power >= 0.0)


class TestEtaProfile:
    """Loss profile of the joint power-spectrum fit."""

    def test_profile_keeps_candidate_order(self, grid: Grid):
        q_eta = UnbiasUtils.center_power(
            mean_power=np.full(grid.n_omega, 1.0), sigma=0.0, grid=grid
        )

        etas = [0.25, 0.05, 0.15]

        profile = EstimateUtils.eta_profile(
            centered_power=q_eta, grid=grid, etas=etas, cfg=SolverConfig(L=0.5)
        )

        assert [eta for eta, _ in profile] == etas
        assert all(np.isfinite(loss) and loss >= 0.0 for _, loss in profile)

    def test_search_domain_is_shared(self, grid: Grid):
        domain = EstimateUtils.search_domain(grid=grid)

        assert np.abs(grid.omega[domain]).max() <= grid.omega_max / 3.0 + 1e-9
