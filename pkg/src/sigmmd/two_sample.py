"""Two-sample testing machinery: null estimation, thresholds, power studies.

The expensive object is always the kernel Gram over a pool of paths; it is
computed once and every bootstrap/permutation replication reduces to
index arithmetic on it. Per-replication draws come from a single
numpy Generator seeded with SeedSequence(seed), side A indices drawn
before side B within each replication, so runs replay exactly.

The test rejects when the statistic exceeds the estimated (1-alpha) null
quantile; empirical p-values use the add-one convention
(#{null >= statistic} + 1) / (B + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats as sps

from .errors import ConfigError, NumericalError
from .mmd import ESTIMATORS
from .paths import Path
from .preprocess import Pipeline, Scale
from .sig_kernel import PDEBackend, TruncatedBackend, gram
from .simulate import SimSpec, multichannel_batch, simulate_batch

NULL_METHODS = ("permutation", "bootstrap", "gamma")


@dataclass(frozen=True)
class StatisticConfig:
    """Which estimator to evaluate on which kernel."""

    estimator: str = "unbiased"
    kernel: TruncatedBackend | PDEBackend = field(default_factory=TruncatedBackend)

    def __post_init__(self):
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")


@dataclass
class EmpiricalDistribution:
    samples: np.ndarray
    kind: str


@dataclass(frozen=True)
class GammaNull:
    """Moment-matched null for n * biased-MMD: Gamma(shape=tau, scale=psi)."""

    tau: float
    psi: float
    n: int


@dataclass
class TestResult:
    statistic: float
    threshold: float
    p_value: float
    reject: bool
    estimator: str
    alpha: float
    null_method: str
    B: int
    seed: int
    null_dist: EmpiricalDistribution | GammaNull


# ---------------------------------------------------------------------------
# quantiles and error probabilities
# ---------------------------------------------------------------------------

def quantile(dist: EmpiricalDistribution | np.ndarray, q: float) -> float:
    """Order-statistic quantile: the smallest sample with at least a q
    fraction of the sample at or below it."""
    samples = dist.samples if isinstance(dist, EmpiricalDistribution) else np.asarray(dist)
    if samples.size == 0:
        raise ConfigError("cannot take a quantile of an empty sample")
    if not 0.0 <= q <= 1.0:
        raise ConfigError("q must lie in [0, 1]")
    rank = max(1, int(np.ceil(q * samples.size)))
    return float(np.sort(samples)[rank - 1])


def type2_probability(alt: EmpiricalDistribution | np.ndarray, threshold: float) -> float:
    samples = alt.samples if isinstance(alt, EmpiricalDistribution) else np.asarray(alt)
    return float(np.mean(samples <= threshold))


def type1_probability(null_eval: EmpiricalDistribution | np.ndarray, threshold: float) -> float:
    samples = (null_eval.samples if isinstance(null_eval, EmpiricalDistribution)
               else np.asarray(null_eval))
    return float(np.mean(samples > threshold))


# ---------------------------------------------------------------------------
# resampling engine over precomputed Grams
# ---------------------------------------------------------------------------

def _fast_stats(sub_aa, sub_bb, sub_ab, estimators):
    n1, n2 = sub_ab.shape
    s_aa, t_aa = sub_aa.sum(), np.trace(sub_aa)
    s_bb, t_bb = sub_bb.sum(), np.trace(sub_bb)
    s_ab = sub_ab.sum()
    out = {}
    for e in estimators:
        if e == "biased":
            out[e] = s_aa / n1 ** 2 + s_bb / n2 ** 2 - 2.0 * s_ab / (n1 * n2)
        elif e == "unbiased":
            out[e] = (s_aa - t_aa) / (n1 * (n1 - 1)) + (s_bb - t_bb) / (n2 * (n2 - 1)) \
                - 2.0 * s_ab / (n1 * n2)
        else:  # paired_u
            t_ab = np.trace(sub_ab)
            out[e] = ((s_aa - t_aa) + (s_bb - t_bb) - 2.0 * (s_ab - t_ab)) \
                / (n1 * (n1 - 1))
    return out


def _check_sizes(estimators, n1, n2):
    for e in estimators:
        if e != "biased" and min(n1, n2) < 2:
            raise ConfigError(f"{e} estimator needs at least two paths per batch")
        if e == "paired_u" and n1 != n2:
            raise ConfigError("paired_u needs equal subsample sizes")


def _resample_two_pools(g_aa, g_bb, g_ab, B, n1, n2, estimators, rng,
                        replace=False):
    """B statistics, each between an n1-subsample of pool A and an
    n2-subsample of pool B, drawn independently; without replacement by
    default, with replacement for bootstrap-style draws."""
    _check_sizes(estimators, n1, n2)
    p, q = g_ab.shape
    out = {e: np.empty(B) for e in estimators}
    for b in range(B):
        i = rng.choice(p, size=n1, replace=replace)
        j = rng.choice(q, size=n2, replace=replace)
        vals = _fast_stats(g_aa[np.ix_(i, i)], g_bb[np.ix_(j, j)],
                           g_ab[np.ix_(i, j)], estimators)
        for e in estimators:
            out[e][b] = vals[e]
    return out


def _resample_permutations(g_pool, B, n1, n2, estimators, rng):
    """B statistics over uniformly random splits of a pooled Gram."""
    _check_sizes(estimators, n1, n2)
    total = g_pool.shape[0]
    if n1 + n2 != total:
        raise ConfigError("permutation split sizes must exhaust the pool")
    out = {e: np.empty(B) for e in estimators}
    for b in range(B):
        perm = rng.permutation(total)
        i, j = perm[:n1], perm[n1:]
        vals = _fast_stats(g_pool[np.ix_(i, i)], g_pool[np.ix_(j, j)],
                           g_pool[np.ix_(i, j)], estimators)
        for e in estimators:
            out[e][b] = vals[e]
    return out


# ---------------------------------------------------------------------------
# public null / alternative samplers
# ---------------------------------------------------------------------------

def bootstrap_null(pool: list[Path], B: int, n1: int, n2: int,
                   statistic: StatisticConfig, seed: int = 0) -> EmpiricalDistribution:
    """Null distribution by subsampling both batches from one pool.

    Each replication draws an n1- and an n2-subsample (each without
    replacement, the two draws independent, so they may overlap) and
    evaluates the statistic between them.
    """
    if len(pool) < max(n1, n2):
        raise ConfigError("pool must hold at least max(n1, n2) paths")
    if B < 1:
        raise ConfigError("B must be at least 1")
    g = gram(pool, None, statistic.kernel).entries
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = _resample_two_pools(g, g, g, B, n1, n2, [statistic.estimator], rng)
    return EmpiricalDistribution(samples[statistic.estimator], "bootstrap_null")


def bootstrap_alternative(pool_x: list[Path], pool_y: list[Path], B: int,
                          n1: int, n2: int, statistic: StatisticConfig,
                          seed: int = 0) -> EmpiricalDistribution:
    """Alternative distribution by subsampling each batch from its own pool."""
    if len(pool_x) < n1 or len(pool_y) < n2:
        raise ConfigError("pools are smaller than the requested subsamples")
    g_xx = gram(pool_x, None, statistic.kernel).entries
    g_yy = gram(pool_y, None, statistic.kernel).entries
    g_xy = gram(pool_x, pool_y, statistic.kernel).entries
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = _resample_two_pools(g_xx, g_yy, g_xy, B, n1, n2,
                                  [statistic.estimator], rng)
    return EmpiricalDistribution(samples[statistic.estimator], "bootstrap_alt")


def permutation_null(batch_x: list[Path], batch_y: list[Path], B: int,
                     statistic: StatisticConfig, seed: int = 0) -> EmpiricalDistribution:
    """Null distribution over uniformly random relabelings of the pooled data."""
    if B < 1:
        raise ConfigError("B must be at least 1")
    pooled = list(batch_x) + list(batch_y)
    g = gram(pooled, None, statistic.kernel).entries
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    samples = _resample_permutations(g, B, len(batch_x), len(batch_y),
                                     [statistic.estimator], rng)
    return EmpiricalDistribution(samples[statistic.estimator], "permutation_null")


# ---------------------------------------------------------------------------
# parametric approximations
# ---------------------------------------------------------------------------

def gamma_null_fit(null: EmpiricalDistribution | np.ndarray, n: int) -> GammaNull:
    """Moment-match Gamma(tau, psi) to n * biased-MMD null samples:
    tau = mean^2 / var, psi = n * var / mean (sample variance)."""
    samples = null.samples if isinstance(null, EmpiricalDistribution) else np.asarray(null)
    if samples.size < 2:
        raise ConfigError("gamma fit needs at least two null samples")
    mean = float(samples.mean())
    var = float(samples.var(ddof=1))
    if mean <= 0 or var <= 0:
        raise NumericalError("gamma fit needs positive null mean and variance")
    return GammaNull(tau=mean ** 2 / var, psi=n * var / mean, n=n)


def gamma_threshold(gn: GammaNull, q: float) -> float:
    """Quantile of the raw statistic: the Gamma quantile of n * MMD over n."""
    return float(sps.gamma.ppf(q, a=gn.tau, scale=gn.psi)) / gn.n


def gamma_p_value(gn: GammaNull, statistic: float) -> float:
    return float(sps.gamma.sf(gn.n * statistic, a=gn.tau, scale=gn.psi))


def gaussian_alt_params(gram_xx, gram_yy, gram_xy) -> tuple[float, float]:
    """Plug-in mean and asymptotic variance of the paired U-statistic.

    Returns (u, sigma2) with sigma2 = 4 (E_Z[E_Z'[h]^2] - E[h]^2) estimated
    from empirical conditional means; the alternative distribution is
    approximately Normal(u, sigma2 / n).
    """
    gxx = gram_xx.entries if hasattr(gram_xx, "entries") else np.asarray(gram_xx)
    gyy = gram_yy.entries if hasattr(gram_yy, "entries") else np.asarray(gram_yy)
    gxy = gram_xy.entries if hasattr(gram_xy, "entries") else np.asarray(gram_xy)
    n = gxy.shape[0]
    if gxy.shape[0] != gxy.shape[1] or n < 2:
        raise ConfigError("gaussian_alt_params needs equal batch sizes >= 2")
    h = gxx + gyy - gxy - gxy.T
    np.fill_diagonal(h, 0.0)
    u = h.sum() / (n * (n - 1))
    cond = h.sum(axis=1) / (n - 1)
    sigma2 = 4.0 * (float(np.mean(cond ** 2)) - float(u) ** 2)
    return float(u), float(sigma2)


# ---------------------------------------------------------------------------
# the test itself
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoSampleConfig:
    statistic: StatisticConfig = field(default_factory=StatisticConfig)
    alpha: float = 0.05
    null_method: str = "permutation"
    B: int = 500
    seed: int = 0
    pipeline: Pipeline = field(default_factory=Pipeline)

    def __post_init__(self):
        if self.null_method not in NULL_METHODS:
            raise ConfigError(f"unknown null method {self.null_method!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie strictly between 0 and 1")
        if self.B < 1:
            raise ConfigError("B must be at least 1")


def two_sample_test(batch_x: list[Path], batch_y: list[Path], config: TwoSampleConfig,
                    null_pool: list[Path] | None = None) -> TestResult:
    """Run the test on two batches.

    The preprocessing pipeline is applied to each batch separately. The
    bootstrap null method needs an explicit held-out pool (calibration
    paths, preprocessed with the same pipeline); permutation and gamma work
    from the two batches alone. reject is statistic > threshold.
    """
    px = config.pipeline.apply(list(batch_x))
    py = config.pipeline.apply(list(batch_y))
    stat_cfg = config.statistic
    g_xx = gram(px, None, stat_cfg.kernel).entries
    g_yy = gram(py, None, stat_cfg.kernel).entries
    g_xy = gram(px, py, stat_cfg.kernel).entries
    observed = _fast_stats(g_xx, g_yy, g_xy, [stat_cfg.estimator])[stat_cfg.estimator]

    if config.null_method == "bootstrap":
        if null_pool is None:
            raise ConfigError("bootstrap null needs a held-out null_pool")
        null = bootstrap_null(config.pipeline.apply(list(null_pool)), config.B,
                              len(px), len(py), stat_cfg, seed=config.seed)
        threshold = quantile(null, 1.0 - config.alpha)
        p = (np.sum(null.samples >= observed) + 1.0) / (config.B + 1.0)
        null_dist: EmpiricalDistribution | GammaNull = null
    elif config.null_method == "permutation":
        null = permutation_null(px, py, config.B, stat_cfg, seed=config.seed)
        threshold = quantile(null, 1.0 - config.alpha)
        p = (np.sum(null.samples >= observed) + 1.0) / (config.B + 1.0)
        null_dist = null
    else:  # gamma
        if stat_cfg.estimator != "biased":
            raise ConfigError("the gamma null approximation applies to the "
                              "biased estimator scaled by batch size")
        if len(px) != len(py):
            raise ConfigError("gamma null needs equal batch sizes")
        base = permutation_null(px, py, config.B, stat_cfg, seed=config.seed)
        gn = gamma_null_fit(len(px) * base.samples, len(px))
        threshold = gamma_threshold(gn, 1.0 - config.alpha)
        p = gamma_p_value(gn, observed)
        null_dist = gn

    return TestResult(
        statistic=float(observed), threshold=float(threshold), p_value=float(p),
        reject=bool(observed > threshold), estimator=stat_cfg.estimator,
        alpha=config.alpha, null_method=config.null_method, B=config.B,
        seed=config.seed, null_dist=null_dist)


# ---------------------------------------------------------------------------
# power studies over simulator grids
# ---------------------------------------------------------------------------

@dataclass
class PowerRow:
    scaling: float
    batch_size: int
    estimator: str
    type1: float
    type2: float
    std: float
    reps: int
    seed: int


NULL_STYLES = ("cross", "within", "bootstrap")


@dataclass(frozen=True)
class PowerStudyConfig:
    """Error-probability grid over scalings x batch sizes.

    Per replication up to three pools are simulated (X, Y, and a second
    independent X pool), each of size pool_factor * batch_size. The
    alternative resamples across the X and Y pools; the Type 1 rate is
    measured on draws crossing the two same-law pools.

    null_style picks how the null is resampled. 'cross' draws one batch
    from each of the two same-law pools, which keeps the Type 1 rate at
    the significance level: drawing both batches from a single pool
    understates the statistic's spread (subsamples share the pool's
    idiosyncrasies). 'within' draws both batches from the X pool, exactly
    the bootstrap null of the test procedure; its thresholds are free of
    the random pool-vs-pool discrepancy, which stabilises Type 2 estimates
    when the kernel has heavy tails, at the cost of an inflated Type 1
    rate at small pool factors. 'bootstrap' also draws both null batches
    from the X pool but with replacement, the textbook n-from-n bootstrap;
    with pool_factor=1 each replication is then literally one test run on
    fresh batches (the alternative subsample degenerates to the observed
    pair), so the replication average carries the full batch-to-batch
    spread that pooled subsampling suppresses.

    scaling_mode 'path' appends a value-channel Scale step after the
    pipeline; 'lift' scales the lifted feature path via the PDE backend.
    """

    spec_x: SimSpec | tuple[SimSpec, ...]
    spec_y: SimSpec | tuple[SimSpec, ...]
    scalings: tuple[float, ...] = (1.0,)
    batch_sizes: tuple[int, ...] = (128,)
    estimators: tuple[str, ...] = ("biased", "unbiased")
    kernel: TruncatedBackend | PDEBackend = field(default_factory=TruncatedBackend)
    pipeline: Pipeline = field(default_factory=Pipeline)
    scaling_mode: str = "path"
    alpha: float = 0.05
    B: int = 500
    reps: int = 1
    pool_factor: int = 4
    seed: int = 0
    compute_type1: bool = True
    null_style: str = "cross"

    def __post_init__(self):
        if self.scaling_mode not in ("path", "lift"):
            raise ConfigError("scaling_mode must be 'path' or 'lift'")
        if self.scaling_mode == "lift" and not isinstance(self.kernel, PDEBackend):
            raise ConfigError("lift scaling needs the PDE backend")
        if self.pool_factor < 1:
            raise ConfigError("pool_factor must be at least 1")
        if self.null_style not in NULL_STYLES:
            raise ConfigError(f"null_style must be one of {NULL_STYLES}")
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise ConfigError(f"unknown estimator {e!r}")


def _derived_seed(root: int, *key: int) -> int:
    return int(np.random.SeedSequence(root, spawn_key=tuple(key)).generate_state(1)[0])


def _simulate_pool(spec, n: int, seed: int) -> list[Path]:
    if isinstance(spec, (tuple, list)):
        specs = [replace(s, seed=_derived_seed(seed, j)) for j, s in enumerate(spec)]
        return multichannel_batch(specs, n)
    return simulate_batch(replace(spec, seed=seed), n)


def _cell_setup(cfg: PowerStudyConfig, scaling: float):
    pipeline, kernel = cfg.pipeline, cfg.kernel
    if scaling != 1.0:
        if cfg.scaling_mode == "path":
            pipeline = Pipeline(pipeline.steps + (Scale(scaling),))
        else:
            kernel = replace(kernel, lift_scale=scaling)
    return pipeline, kernel


def power_study(cfg: PowerStudyConfig) -> list[PowerRow]:
    rows: list[PowerRow] = []
    ests = list(cfg.estimators)
    for bi, batch in enumerate(cfg.batch_sizes):
        pool_n = cfg.pool_factor * batch
        cells: dict[tuple[float, str], dict[str, list[float]]] = {
            (s, e): {"type1": [], "type2": []} for s in cfg.scalings for e in ests}
        # the second same-law pool only exists where something crosses it
        need_x2 = cfg.compute_type1 or cfg.null_style == "cross"
        for rep in range(cfg.reps):
            pool_x = _simulate_pool(cfg.spec_x, pool_n, _derived_seed(cfg.seed, bi, rep, 0))
            pool_y = _simulate_pool(cfg.spec_y, pool_n, _derived_seed(cfg.seed, bi, rep, 1))
            pool_x2 = (_simulate_pool(cfg.spec_x, pool_n, _derived_seed(cfg.seed, bi, rep, 2))
                       if need_x2 else None)
            for si, scaling in enumerate(cfg.scalings):
                pipeline, kernel = _cell_setup(cfg, scaling)
                px = pipeline.apply(pool_x)
                py = pipeline.apply(pool_y)
                g_xx = gram(px, None, kernel).entries
                g_yy = gram(py, None, kernel).entries
                g_xy = gram(px, py, kernel).entries
                if need_x2:
                    px2 = pipeline.apply(pool_x2)
                    g_x2 = gram(px2, None, kernel).entries
                    g_x_x2 = gram(px, px2, kernel).entries
                rng = np.random.default_rng(
                    np.random.SeedSequence(cfg.seed, spawn_key=(bi, rep, si, 3)))
                if cfg.null_style == "cross":
                    null = _resample_two_pools(g_xx, g_x2, g_x_x2, cfg.B, batch,
                                               batch, ests, rng)
                else:
                    null = _resample_two_pools(g_xx, g_xx, g_xx, cfg.B, batch,
                                               batch, ests, rng,
                                               replace=cfg.null_style == "bootstrap")
                alt = _resample_two_pools(g_xx, g_yy, g_xy, cfg.B, batch, batch,
                                          ests, rng)
                if cfg.compute_type1:
                    h0 = _resample_two_pools(g_xx, g_x2, g_x_x2, cfg.B, batch, batch,
                                             ests, rng)
                for e in ests:
                    threshold = quantile(null[e], 1.0 - cfg.alpha)
                    cells[(scaling, e)]["type2"].append(
                        type2_probability(alt[e], threshold))
                    if cfg.compute_type1:
                        cells[(scaling, e)]["type1"].append(
                            type1_probability(h0[e], threshold))
        for scaling in cfg.scalings:
            for e in ests:
                t2 = np.asarray(cells[(scaling, e)]["type2"])
                t1 = np.asarray(cells[(scaling, e)]["type1"])
                rows.append(PowerRow(
                    scaling=scaling, batch_size=batch, estimator=e,
                    type1=float(t1.mean()) if t1.size else float("nan"),
                    type2=float(t2.mean()),
                    std=float(t2.std(ddof=1)) if cfg.reps > 1 else 0.0,
                    reps=cfg.reps, seed=cfg.seed))
    return rows


# ---------------------------------------------------------------------------
# per-level contribution resampling
# ---------------------------------------------------------------------------

def level_contribution_samples(pool_x: list[Path], pool_y: list[Path], depth: int,
                               B: int, n1: int, n2: int, weights=None,
                               mode: str = "unbiased", seed: int = 0) -> dict[str, np.ndarray]:
    """Resampled per-level contributions Gamma_m under both hypotheses.

    Returns {'null': (B, depth+1), 'alt': (B, depth+1)}; the null rows
    resample both batches from pool_x, the alt rows pair pool_x with
    pool_y. Truncated backend only (levels need explicit signatures).
    """
    from .sig_kernel import unit_weights
    from .signature import signatures
    from .mmd import level_feature_matrix

    weights = weights or unit_weights()
    if mode not in ("biased", "unbiased"):
        raise ConfigError("mode must be 'biased' or 'unbiased'")
    if len(pool_x) < max(n1, n2) or len(pool_y) < n2:
        raise ConfigError("pools are smaller than the requested subsamples")
    sx, sy = signatures(pool_x, depth), signatures(pool_y, depth)
    fx = [level_feature_matrix(sx, m) for m in range(depth + 1)]
    fy = [level_feature_matrix(sy, m) for m in range(depth + 1)]
    g_xx = np.stack([f @ f.T for f in fx])
    g_yy = np.stack([f @ f.T for f in fy])
    g_xy = np.stack([a @ b.T for a, b in zip(fx, fy)])
    phi = weights.phi_array(depth)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = {}
    for label, (g_aa, g_bb, g_ab) in {
            "null": (g_xx, g_xx, g_xx),
            "alt": (g_xx, g_yy, g_xy)}.items():
        rows = np.empty((B, depth + 1))
        for b in range(B):
            i = rng.choice(g_aa.shape[1], size=n1, replace=False)
            j = rng.choice(g_bb.shape[1], size=n2, replace=False)
            sub_aa = g_aa[:, i[:, None], i[None, :]]
            sub_bb = g_bb[:, j[:, None], j[None, :]]
            sub_ab = g_ab[:, i[:, None], j[None, :]]
            if mode == "biased":
                lam_aa = sub_aa.mean(axis=(1, 2))
                lam_bb = sub_bb.mean(axis=(1, 2))
            else:
                tr_aa = np.trace(sub_aa, axis1=1, axis2=2)
                tr_bb = np.trace(sub_bb, axis1=1, axis2=2)
                lam_aa = (sub_aa.sum(axis=(1, 2)) - tr_aa) / (n1 * (n1 - 1))
                lam_bb = (sub_bb.sum(axis=(1, 2)) - tr_bb) / (n2 * (n2 - 1))
            lam_ab = sub_ab.mean(axis=(1, 2))
            rows[b] = phi * (lam_aa - 2.0 * lam_ab + lam_bb)
        out[label] = rows
    return out
