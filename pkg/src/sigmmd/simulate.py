"""Simulators for the processes used in the experiments.

All continuous models are discretized by Euler-Maruyama on the uniform
grid t_k = k * horizon / n_steps:

    X_{k+1} = X_k + b(X_k) h + s(X_k) sqrt(h) Z_k,   Z_k iid N(0,1).

Randomness comes from numpy SeedSequence substreams spawned per path (and
per driving noise within a path), so a batch is bit-reproducible from its
spec and prefixes are stable: path i is the same whether 10 or 10000 paths
are drawn.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .paths import Path

# ---------------------------------------------------------------------------
# model parameter sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledBM:
    """Driftless Brownian motion started at 0 with volatility sigma."""

    sigma: float = 0.2
    name: str = field(default="scaled_bm", init=False)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")


@dataclass(frozen=True)
class GBM:
    """Geometric Brownian motion dS = mu S dt + sigma S dW, S_0 = s0."""

    mu: float = 0.3
    sigma: float = 0.5
    s0: float = 1.0
    name: str = field(default="gbm", init=False)

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")


@dataclass(frozen=True)
class OU:
    """Mean-reverting dG = -theta G dt + sigma_tilde dW, G_0 = g0."""

    theta: float = 0.3
    sigma_tilde: float = 0.5
    g0: float = 0.75
    name: str = field(default="ou", init=False)

    def __post_init__(self):
        if not self.theta > 0 or not self.sigma_tilde > 0:
            raise ConfigError("theta and sigma_tilde must be positive")


@dataclass(frozen=True)
class MixtureGBMOU:
    """Sum of an independent GBM and OU; increments add, drivers independent."""

    gbm: GBM = field(default_factory=GBM)
    ou: OU = field(default_factory=OU)
    name: str = field(default="mixture", init=False)


@dataclass(frozen=True)
class Garch:
    """GARCH(1,1) returns r_t = mu + sigma_t z_t with
    sigma_t^2 = omega + alpha1 eps_{t-1}^2 + beta1 sigma_{t-1}^2,
    initialized at the stationary variance omega / (1 - alpha1 - beta1)
    with eps_0 = 0. With cumulative=True (the default) the emitted path is
    the running sum of returns started at 0."""

    mu: float = 1.0e-3
    omega: float = 3.8e-3
    alpha1: float = 4.0e-2
    beta1: float = 4.2e-2
    cumulative: bool = True
    name: str = field(default="garch", init=False)

    def __post_init__(self):
        if not self.omega > 0 or self.alpha1 < 0 or self.beta1 < 0:
            raise ConfigError("omega must be positive, alpha1 and beta1 nonnegative")
        if not self.alpha1 + self.beta1 < 1:
            raise ConfigError("alpha1 + beta1 must be below 1 for stationarity")

    def stationary_variance(self) -> float:
        return self.omega / (1.0 - self.alpha1 - self.beta1)


Model = ScaledBM | GBM | OU | MixtureGBMOU | Garch


@dataclass(frozen=True)
class SimSpec:
    model: Model
    n_steps: int = 50
    horizon: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1")
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")


# ---------------------------------------------------------------------------
# driving noise
# ---------------------------------------------------------------------------

def _normal_matrix(seed: int, n_paths: int, n_steps: int, stream: int = 0) -> np.ndarray:
    """(n_paths, n_steps) standard normals; row i comes from the substream
    (seed -> path i -> stream), so prefixes are stable in n_paths."""
    root = np.random.SeedSequence(seed)
    rows = np.empty((n_paths, n_steps))
    for i, child in enumerate(root.spawn(n_paths)):
        ss = child if stream == 0 else child.spawn(stream + 1)[stream]
        rows[i] = np.random.default_rng(ss).standard_normal(n_steps)
    return rows


# ---------------------------------------------------------------------------
# value-array simulators
# ---------------------------------------------------------------------------

def simulate_values(spec: SimSpec, n_paths: int) -> tuple[np.ndarray, np.ndarray]:
    """Simulate a batch as arrays: (times, values) with values of shape
    (n_paths, n_points). Cheaper than building Path objects for large
    Monte Carlo checks."""
    if n_paths < 1:
        raise ConfigError("n_paths must be at least 1")
    model, L, T = spec.model, spec.n_steps, spec.horizon
    h = T / L
    times = np.linspace(0.0, T, L + 1)
    if isinstance(model, ScaledBM):
        z = _normal_matrix(spec.seed, n_paths, L)
        inc = model.sigma * np.sqrt(h) * z
        return times, np.hstack([np.zeros((n_paths, 1)), np.cumsum(inc, axis=1)])
    if isinstance(model, GBM):
        z = _normal_matrix(spec.seed, n_paths, L)
        factors = 1.0 + model.mu * h + model.sigma * np.sqrt(h) * z
        vals = model.s0 * np.hstack([np.ones((n_paths, 1)),
                                     np.cumprod(factors, axis=1)])
        return times, vals
    if isinstance(model, OU):
        z = _normal_matrix(spec.seed, n_paths, L)
        vals = np.empty((n_paths, L + 1))
        vals[:, 0] = model.g0
        for k in range(L):
            vals[:, k + 1] = (vals[:, k] * (1.0 - model.theta * h)
                              + model.sigma_tilde * np.sqrt(h) * z[:, k])
        return times, vals
    if isinstance(model, MixtureGBMOU):
        sub = SimSpec(model.gbm, L, T, spec.seed)
        _, s_vals = _simulate_component(sub, n_paths, stream=0)
        sub = SimSpec(model.ou, L, T, spec.seed)
        _, g_vals = _simulate_component(sub, n_paths, stream=1)
        return times, s_vals + g_vals
    if isinstance(model, Garch):
        z = _normal_matrix(spec.seed, n_paths, L)
        var = np.full(n_paths, model.stationary_variance())
        eps = np.zeros(n_paths)
        returns = np.empty((n_paths, L))
        for t in range(L):
            var = model.omega + model.alpha1 * eps ** 2 + model.beta1 * var
            eps = np.sqrt(var) * z[:, t]
            returns[:, t] = model.mu + eps
        if model.cumulative:
            vals = np.hstack([np.zeros((n_paths, 1)), np.cumsum(returns, axis=1)])
            return times, vals
        return np.linspace(0.0, T, L), returns
    raise ConfigError(f"unknown model {type(model).__name__}")


def _simulate_component(spec: SimSpec, n_paths: int, stream: int):
    """Like simulate_values for GBM/OU but drawing from a per-path substream,
    so mixture components are independent yet reproducible."""
    model, L, T = spec.model, spec.n_steps, spec.horizon
    h = T / L
    times = np.linspace(0.0, T, L + 1)
    z = _normal_matrix(spec.seed, n_paths, L, stream=stream)
    if isinstance(model, GBM):
        factors = 1.0 + model.mu * h + model.sigma * np.sqrt(h) * z
        return times, model.s0 * np.hstack([np.ones((n_paths, 1)),
                                            np.cumprod(factors, axis=1)])
    vals = np.empty((n_paths, L + 1))
    vals[:, 0] = model.g0
    for k in range(L):
        vals[:, k + 1] = (vals[:, k] * (1.0 - model.theta * h)
                          + model.sigma_tilde * np.sqrt(h) * z[:, k])
    return times, vals


def simulate_batch(spec: SimSpec, n_paths: int) -> list[Path]:
    """Simulate n_paths raw (non-augmented) paths."""
    times, vals = simulate_values(spec, n_paths)
    return [Path(times, vals[i]) for i in range(n_paths)]


def multichannel_batch(specs: list[SimSpec], n_paths: int) -> list[Path]:
    """Stack independent scalar processes as channels of one path batch and
    time-augment, giving len(specs) + 1 channels with channel 0 the clock.

    Channel j is driven solely by specs[j].seed: identical specs with
    identical seeds produce identical channels.
    """
    if not specs:
        raise ConfigError("multichannel_batch needs at least one spec")
    grid = (specs[0].n_steps, specs[0].horizon)
    for s in specs:
        if (s.n_steps, s.horizon) != grid:
            raise ConfigError("multichannel specs must share n_steps and horizon")
    channels = []
    times = None
    for s in specs:
        times, vals = simulate_values(s, n_paths)
        channels.append(vals)
    stacked = np.stack(channels, axis=2)  # (n_paths, n_points, k)
    out = []
    for i in range(n_paths):
        values = np.column_stack([times, stacked[i]])
        out.append(Path(times, values, time_channel=0))
    return out
