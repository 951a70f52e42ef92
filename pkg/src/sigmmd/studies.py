"""Preconfigured simulation studies.

Each builder returns a PowerStudyConfig wired with the process parameters,
preprocessing, and kernel backend for one of the experiments shipped with
the package; run it with two_sample.power_study. The scripts/ directory
contains thin wrappers that execute a study and write the power table.

Studies:

* scaled_bm_type2_study: driftless scaled Brownian motions (sigma=0.2 vs
  beta=0.3), time-augmented, truncated backend. Path scaling collapses the
  Type 2 rate.
* scaled_bm_type1_study: same process pair on a scaling x batch-size grid,
  PDE backend, with fresh same-law pools to confirm the Type 1 rate stays
  at the significance level.
* dimension_study: multichannel scaled BM with per-channel volatility
  pairs, PDE backend, over batch sizes {16..256} at scale 2 vs none.
* garch_type2_study: GARCH(1,1) r1 vs r2 on cumulative return paths.
* mixture_type2_study: GBM+OU mixtures that differ in the third moment;
  'raw' arm (time-augmented, truncated) shows the Type 2 failure mode, the
  'rbf' arm (standardize + lead-lag + RBF lift) repairs it, with the lift
  scaling applied in feature space.
* returns_decision: end-to-end two-sample decision on price tables via
  windowed returns with a calibration/test split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .ingest import DropReport, PriceSchema, ingest_prices
from .preprocess import LeadLag, Pipeline, Standardize, TimeAugment
from .sig_kernel import PDEBackend, TruncatedBackend
from .static_kernels import StaticKernel
from .simulate import GBM, Garch, MixtureGBMOU, OU, ScaledBM, SimSpec
from .two_sample import (PowerStudyConfig, StatisticConfig, TestResult,
                         TwoSampleConfig, two_sample_test)

__all__ = [
    "VOL_PAIRS", "GARCH_R1", "GARCH_R2", "MIXTURE_X", "MIXTURE_Y",
    "scaled_bm_type2_study", "scaled_bm_type1_study", "dimension_study",
    "garch_type2_study", "mixture_type2_study",
    "ReturnsDecision", "returns_decision",
]

# per-channel (sigma_j, beta_j) volatilities for the multichannel grid
VOL_PAIRS = ((0.2, 0.3), (0.5, 0.6), (0.7, 0.8), (0.1, 0.2))

# raw return series, not cumulated: the level difference between the two
# means then cancels out of every signature increment and only the
# volatility dynamics separate the laws, which is the regime of interest
GARCH_R1 = Garch(mu=1.0e-3, omega=3.8e-3, alpha1=4.0e-2, beta1=4.2e-2,
                 cumulative=False)
GARCH_R2 = Garch(mu=5.0e-3, omega=5.3e-3, alpha1=8.0e-2, beta1=1.0e-2,
                 cumulative=False)

# mixtures share every parameter except (sigma, sigma_tilde), chosen so the
# terminal laws match in the first two moments but not the third
MIXTURE_X = MixtureGBMOU(gbm=GBM(mu=0.3, sigma=0.5, s0=1.0),
                         ou=OU(theta=0.3, sigma_tilde=0.5, g0=0.75))
MIXTURE_Y = MixtureGBMOU(gbm=GBM(mu=0.3, sigma=0.3, s0=1.0),
                         ou=OU(theta=0.3, sigma_tilde=0.84, g0=0.75))


def scaled_bm_type2_study(scalings=(1.0, 3.0), batch_sizes=(128,), B=500,
                          reps=1, seed=0, n_steps=30, depth=13,
                          pool_factor=5) -> PowerStudyConfig:
    """Type 2 study for sigma=0.2 vs beta=0.3 scaled Brownian motion.

    Truncated backend; depth 13 keeps the factorial tail negligible for
    value scalings up to 3 at this volatility and step count. The pool
    factor balances the two regimes: the near-separated scale-3 cells want
    a tight null quantile (big pools), the overlapping unscaled cells are
    closest to fresh-sample rates with moderate ones.
    """
    return PowerStudyConfig(
        spec_x=SimSpec(ScaledBM(sigma=0.2), n_steps=n_steps),
        spec_y=SimSpec(ScaledBM(sigma=0.3), n_steps=n_steps),
        scalings=tuple(float(c) for c in scalings),
        batch_sizes=tuple(int(b) for b in batch_sizes),
        estimators=("biased", "unbiased"),
        kernel=TruncatedBackend(depth=depth),
        pipeline=Pipeline((TimeAugment(),)),
        B=B, reps=reps, seed=seed, pool_factor=pool_factor,
        compute_type1=False)


def scaled_bm_type1_study(scalings=(1.0, 2.0, 3.0, 5.0), batch_sizes=(32, 128),
                          B=500, reps=1, seed=0, n_steps=30,
                          dyadic_order=1) -> PowerStudyConfig:
    """Type 1 calibration grid for the scaled-BM pair.

    The PDE backend stays stable at scale 5 where a truncated kernel would
    need an impractical depth. Type 1 rates only require the null and the
    fresh same-law draws to share a kernel, not a converged one.
    """
    return PowerStudyConfig(
        spec_x=SimSpec(ScaledBM(sigma=0.2), n_steps=n_steps),
        spec_y=SimSpec(ScaledBM(sigma=0.3), n_steps=n_steps),
        scalings=tuple(float(c) for c in scalings),
        batch_sizes=tuple(int(b) for b in batch_sizes),
        estimators=("biased", "unbiased"),
        kernel=PDEBackend(dyadic_order=dyadic_order),
        pipeline=Pipeline((TimeAugment(),)),
        B=B, reps=reps, seed=seed, compute_type1=True)


def dimension_study(dim, batch_sizes=(16, 64, 256), scalings=(1.0, 2.0),
                    B=500, reps=1, seed=0, n_steps=32,
                    depth=6) -> PowerStudyConfig:
    """Multichannel scaled-BM grid at a given path dimension.

    dim counts the time channel, so dim d uses the first d-1 volatility
    pairs from VOL_PAIRS. Type 2 only; scale 2 against none. Truncated
    backend: with the higher-volatility channels, scaling makes the
    untruncated kernel nearly diagonal (self-terms grow without bound) and
    the test loses power, while the truncation caps that growth and keeps
    the reweighted levels informative. The within-pool null keeps the
    scale-amplified thresholds free of pool-pair noise.
    """
    n_channels = int(dim) - 1
    if not 1 <= n_channels <= len(VOL_PAIRS):
        raise ValueError(f"dim must lie in [2, {len(VOL_PAIRS) + 1}]")
    pairs = VOL_PAIRS[:n_channels]
    # multichannel batches already carry the clock channel, so no pipeline
    return PowerStudyConfig(
        spec_x=tuple(SimSpec(ScaledBM(sigma=s), n_steps=n_steps) for s, _ in pairs),
        spec_y=tuple(SimSpec(ScaledBM(sigma=b), n_steps=n_steps) for _, b in pairs),
        scalings=tuple(float(c) for c in scalings),
        batch_sizes=tuple(int(b) for b in batch_sizes),
        estimators=("biased", "unbiased"),
        kernel=TruncatedBackend(depth=depth),
        B=B, reps=reps, seed=seed, compute_type1=False, null_style="within")


def garch_type2_study(scalings=(1.0, 5.5), batch_sizes=(128,), B=500,
                      reps=1, seed=0, n_steps=30, depth=13,
                      pool_factor=5) -> PowerStudyConfig:
    """GARCH(1,1) r1 vs r2 on time-augmented raw return paths.

    The unscaled test is nearly blind at batch 128: the mean shift cancels
    out of the increments and the volatility gap hides in higher levels.
    Scaling pushes kernel mass onto those levels, so the Type 2 rate stays
    high until roughly scaling 4 and collapses shortly after. The scaled
    kernel is heavy tailed across pool draws, so the within-pool null is
    used for the same reason as in dimension_study: it keeps the threshold
    free of the random pool-vs-pool offset.
    """
    return PowerStudyConfig(
        spec_x=SimSpec(GARCH_R1, n_steps=n_steps),
        spec_y=SimSpec(GARCH_R2, n_steps=n_steps),
        scalings=tuple(float(c) for c in scalings),
        batch_sizes=tuple(int(b) for b in batch_sizes),
        estimators=("unbiased",),
        kernel=TruncatedBackend(depth=depth),
        pipeline=Pipeline((TimeAugment(),)),
        B=B, reps=reps, seed=seed, pool_factor=pool_factor,
        compute_type1=False, null_style="within")


def mixture_type2_study(arm="raw", scalings=None, batch_sizes=(128,), B=500,
                        reps=1, seed=0, n_steps=30) -> PowerStudyConfig:
    """Mixture-model Type 2 study in one of two arms.

    'raw': time-augmented paths with the truncated backend; the test is
    nearly blind to the third-moment difference at batch 128. 'rbf':
    standardize + lead-lag, then lift through an RBF kernel (sigma^2 = 0.5)
    in the PDE backend; scalings act on the lifted path, not the raw one,
    so the study runs in 'lift' mode. Default scalings: (1,) raw,
    (1, 0.8) rbf.
    """
    if arm == "raw":
        if scalings is None:
            scalings = (1.0,)
        kernel, pipeline, mode = (TruncatedBackend(depth=12),
                                  Pipeline((TimeAugment(),)), "path")
    elif arm == "rbf":
        if scalings is None:
            scalings = (1.0, 0.8)
        kernel = PDEBackend(static_kernel=StaticKernel("rbf", math.sqrt(0.5)),
                            dyadic_order=2)
        pipeline, mode = Pipeline((Standardize(), LeadLag())), "lift"
    else:
        raise ValueError(f"unknown arm {arm!r}")
    return PowerStudyConfig(
        spec_x=SimSpec(MIXTURE_X, n_steps=n_steps),
        spec_y=SimSpec(MIXTURE_Y, n_steps=n_steps),
        scalings=tuple(float(c) for c in scalings),
        batch_sizes=tuple(int(b) for b in batch_sizes),
        estimators=("unbiased",),
        kernel=kernel, pipeline=pipeline, scaling_mode=mode,
        B=B, reps=reps, seed=seed, compute_type1=False)


# ---------------------------------------------------------------------------
# returns workflow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReturnsDecision:
    """Outcome of the windowed-returns two-sample workflow."""

    result: TestResult
    n_calibration: tuple[int, int]
    n_test: tuple[int, int]
    reports: tuple[DropReport, DropReport]


def default_returns_config(B=500, seed=0) -> TwoSampleConfig:
    """Permutation test on lead-lag return windows lifted through an RBF
    kernel (sigma^2 = 0.5) with a feature-space scaling of 5."""
    kernel = PDEBackend(static_kernel=StaticKernel("rbf", math.sqrt(0.5)),
                        dyadic_order=2, lift_scale=5.0)
    return TwoSampleConfig(
        statistic=StatisticConfig(estimator="unbiased", kernel=kernel),
        null_method="permutation", B=B, seed=seed,
        pipeline=Pipeline((LeadLag(),)))


def returns_decision(prices_x, prices_y, schema: PriceSchema | None = None,
                     window: int = 15, ratio: float = 0.8, kind: str = "log",
                     cumulative: bool = True, config: TwoSampleConfig | None = None,
                     seed: int = 0) -> ReturnsDecision:
    """Two-sample decision between two price tables.

    Each table is windowed into non-overlapping return blocks and split
    chronologically into calibration and test sets. The calibration windows
    freeze any pipeline statistics and provide the resampling pool when the
    config asks for a bootstrap null; the decision itself is made on the
    held-out test windows.
    """
    if config is None:
        config = default_returns_config(seed=seed)
    ing_x = ingest_prices(prices_x, schema=schema, window=window, ratio=ratio,
                          method="chronological", kind=kind)
    ing_y = ingest_prices(prices_y, schema=schema, window=window, ratio=ratio,
                          method="chronological", kind=kind)
    calib_x = ing_x.calibration.to_paths(cumulative)
    calib_y = ing_y.calibration.to_paths(cumulative)
    test_x = ing_x.test.to_paths(cumulative)
    test_y = ing_y.test.to_paths(cumulative)
    fitted = config.pipeline.fit(calib_x + calib_y)
    config = replace(config, pipeline=fitted)
    pool = calib_x if config.null_method == "bootstrap" else None
    result = two_sample_test(test_x, test_y, config, null_pool=pool)
    return ReturnsDecision(result=result,
                           n_calibration=(len(calib_x), len(calib_y)),
                           n_test=(len(test_x), len(test_y)),
                           reports=(ing_x.report, ing_y.report))
