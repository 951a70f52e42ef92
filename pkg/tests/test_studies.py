"""Study builders and the windowed-returns decision workflow."""

import numpy as np
import pytest

from sigmmd.errors import ConfigError
from sigmmd.preprocess import Pipeline, LeadLag
from sigmmd.sig_kernel import PDEBackend, TruncatedBackend
from sigmmd.studies import (
    GARCH_R1,
    GARCH_R2,
    default_returns_config,
    dimension_study,
    garch_type2_study,
    mixture_type2_study,
    returns_decision,
    scaled_bm_type1_study,
    scaled_bm_type2_study,
)
from sigmmd.two_sample import StatisticConfig, TwoSampleConfig


def test_scaled_bm_builders():
    t2 = scaled_bm_type2_study(B=50, reps=2, seed=7)
    assert t2.scalings == (1.0, 3.0) and t2.batch_sizes == (128,)
    assert isinstance(t2.kernel, TruncatedBackend) and t2.kernel.depth == 13
    assert not t2.compute_type1 and t2.B == 50 and t2.reps == 2 and t2.seed == 7

    t1 = scaled_bm_type1_study(B=50)
    assert t1.compute_type1
    assert isinstance(t1.kernel, PDEBackend)
    assert t1.scalings == (1.0, 2.0, 3.0, 5.0) and t1.batch_sizes == (32, 128)


def test_garch_builder_uses_raw_returns():
    cfg = garch_type2_study(B=50)
    assert cfg.spec_x.model is GARCH_R1 and cfg.spec_y.model is GARCH_R2
    assert not GARCH_R1.cumulative and not GARCH_R2.cumulative
    assert cfg.estimators == ("unbiased",)
    assert cfg.null_style == "within"
    assert cfg.scalings == (1.0, 5.5)


def test_dimension_study_counts_time_channel():
    cfg = dimension_study(3, B=50)
    # dim 3 = clock + two simulated channels
    assert len(cfg.spec_x) == 2 and len(cfg.spec_y) == 2
    assert cfg.pipeline.steps == ()
    assert cfg.null_style == "within"
    for bad in (1, 6):
        with pytest.raises(ValueError):
            dimension_study(bad)


def test_mixture_arms():
    raw = mixture_type2_study("raw", B=50)
    assert isinstance(raw.kernel, TruncatedBackend) and raw.scaling_mode == "path"
    assert raw.scalings == (1.0,)
    rbf = mixture_type2_study("rbf", B=50)
    assert isinstance(rbf.kernel, PDEBackend) and rbf.scaling_mode == "lift"
    assert rbf.kernel.static_kernel.kind == "rbf"
    assert rbf.scalings == (1.0, 0.8)
    with pytest.raises(ValueError):
        mixture_type2_study("kitchen_sink")


def _write_prices(path, sigma, seed, n_days=220):
    rng = np.random.default_rng(seed)
    prices = 100.0 * np.cumprod(np.exp(0.0003 + sigma * rng.standard_normal(n_days)))
    dates = np.datetime64("2020-01-01") + np.arange(n_days)
    with open(path, "w") as fh:
        fh.write("date,price\n")
        for d, p in zip(dates, prices):
            fh.write(f"{d},{p:.6f}\n")


def test_returns_decision_end_to_end(tmp_path):
    fx, fy = tmp_path / "x.csv", tmp_path / "y.csv"
    _write_prices(fx, 0.01, 1)
    _write_prices(fy, 0.01, 2)
    cheap = TwoSampleConfig(
        statistic=StatisticConfig("unbiased", TruncatedBackend(depth=4)),
        null_method="permutation", B=60, seed=3,
        pipeline=Pipeline((LeadLag(),)))
    decision = returns_decision(str(fx), str(fy), window=10, config=cheap)
    # 220 days -> 219 returns -> 21 windows -> 16 calibration + 5 test each
    assert decision.n_calibration == (16, 16)
    assert decision.n_test == (5, 5)
    assert 0.0 <= decision.result.p_value <= 1.0
    assert decision.result.reject in (True, False)
    assert decision.reports[0].n_kept == 220


def test_returns_decision_bootstrap_pool_comes_from_calibration(tmp_path):
    fx, fy = tmp_path / "x.csv", tmp_path / "y.csv"
    _write_prices(fx, 0.01, 4)
    _write_prices(fy, 0.02, 5)
    cheap = TwoSampleConfig(
        statistic=StatisticConfig("biased", TruncatedBackend(depth=3)),
        null_method="bootstrap", B=40, seed=6,
        pipeline=Pipeline((LeadLag(),)))
    decision = returns_decision(str(fx), str(fy), window=10, config=cheap)
    assert decision.result.null_method == "bootstrap"
    assert np.isfinite(decision.result.threshold)


def test_default_returns_config_shape():
    cfg = default_returns_config(B=123, seed=9)
    assert cfg.null_method == "permutation" and cfg.B == 123 and cfg.seed == 9
    assert isinstance(cfg.statistic.kernel, PDEBackend)
    assert cfg.statistic.kernel.lift_scale == 5.0
    assert [s.name for s in cfg.pipeline.steps] == ["lead_lag"]
