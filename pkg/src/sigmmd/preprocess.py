"""Path transforms applied before kernel computation.

Transforms operate on single paths or batches and compose through
Pipeline. Ordering rules are validated: lead-lag must come before time
augmentation (so a single time channel results), and each structural
transform appears at most once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .paths import Path


def time_augment(path: Path) -> Path:
    """Prepend the time grid as channel 0."""
    if path.time_channel is not None:
        raise ConfigError("path already has a time channel")
    values = np.column_stack([path.times, path.values])
    return Path(path.times, values, time_channel=0)


def lead_lag(path: Path) -> Path:
    """Interleave each channel into a (lead, lag) pair on the half-integer grid.

    Output has 2L+1 points for L input segments. At whole steps both
    components sit at X_{t_j}; at the following half step the lead component
    has already jumped to X_{t_{j+1}} while the lag component still holds
    X_{t_j}. Channels of a multichannel path are transformed jointly, lead
    block first.
    """
    if path.time_channel is not None:
        raise ConfigError("apply lead_lag before time augmentation")
    n = path.n_points
    times = np.empty(2 * n - 1)
    times[0::2] = path.times
    times[1::2] = 0.5 * (path.times[:-1] + path.times[1:])
    lead = np.empty((2 * n - 1, path.dim))
    lag = np.empty((2 * n - 1, path.dim))
    lead[0::2] = path.values
    lead[1::2] = path.values[1:]      # lead jumps ahead at half steps
    lag[0::2] = path.values
    lag[1::2] = path.values[:-1]      # lag catches up at the next whole step
    return Path(times, np.hstack([lead, lag]))


def terminal_stats(batch: list[Path]) -> tuple[np.ndarray, np.ndarray]:
    """Channelwise mean and population standard deviation of terminal values."""
    if not batch:
        raise ConfigError("empty batch")
    terminals = np.stack([p.values[-1] for p in batch])
    mu = terminals.mean(axis=0)
    sigma = terminals.std(axis=0)
    if np.any(sigma <= 0.0):
        raise DataError("degenerate batch: zero terminal standard deviation")
    return mu, sigma


def standardize(batch: list[Path],
                stats: tuple[np.ndarray, np.ndarray] | None = None) -> list[Path]:
    """Shift and scale every path, all time points and channels alike, by the
    batch terminal mean and standard deviation (or by precomputed stats from
    a calibration batch)."""
    mu, sigma = stats if stats is not None else terminal_stats(batch)
    return [Path(p.times, (p.values - mu) / sigma, time_channel=p.time_channel)
            for p in batch]


def scale(path: Path, c: float, skip_time_channel: bool = False) -> Path:
    """Multiply every channel by c. Whole-path scaling is what the
    level-reweighting identity assumes (scaling by c equals geometric level
    weights c^(2m) on the unscaled paths), so the clock channel scales too;
    pass skip_time_channel=True to rescale only the value channels."""
    if not c > 0:
        raise ConfigError("scale factor must be positive")
    values = path.values * c
    if skip_time_channel and path.time_channel is not None:
        values[:, path.time_channel] = path.values[:, path.time_channel]
    return Path(path.times, values, time_channel=path.time_channel)


def scale_batch(batch: list[Path], c: float, skip_time_channel: bool = False) -> list[Path]:
    return [scale(p, c, skip_time_channel) for p in batch]


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadLag:
    name: str = field(default="lead_lag", init=False)

    def apply(self, batch: list[Path]) -> list[Path]:
        return [lead_lag(p) for p in batch]


@dataclass(frozen=True)
class TimeAugment:
    name: str = field(default="time_augment", init=False)

    def apply(self, batch: list[Path]) -> list[Path]:
        return [time_augment(p) for p in batch]


@dataclass(frozen=True)
class Standardize:
    stats: tuple | None = None
    name: str = field(default="standardize", init=False)

    def apply(self, batch: list[Path]) -> list[Path]:
        return standardize(batch, self.stats)


@dataclass(frozen=True)
class Scale:
    c: float = 1.0
    skip_time_channel: bool = False
    name: str = field(default="scale", init=False)

    def apply(self, batch: list[Path]) -> list[Path]:
        return scale_batch(batch, self.c, self.skip_time_channel)


Step = LeadLag | TimeAugment | Standardize | Scale


@dataclass(frozen=True)
class Pipeline:
    """Ordered transform steps applied per batch."""

    steps: tuple[Step, ...] = ()

    def __post_init__(self):
        names = [s.name for s in self.steps]
        for structural in ("lead_lag", "time_augment", "standardize"):
            if names.count(structural) > 1:
                raise ConfigError(f"{structural} may appear at most once")
        if "lead_lag" in names and "time_augment" in names:
            if names.index("time_augment") < names.index("lead_lag"):
                raise ConfigError("time_augment must come after lead_lag")

    def apply(self, batch: list[Path]) -> list[Path]:
        for step in self.steps:
            batch = step.apply(batch)
        return batch

    def fit(self, calibration: list[Path]) -> "Pipeline":
        """Freeze standardization stats from a calibration batch so later
        applications reuse them instead of each batch's own terminals."""
        fitted = []
        batch = list(calibration)
        for step in self.steps:
            if isinstance(step, Standardize) and step.stats is None:
                mu, sigma = terminal_stats(batch)
                step = Standardize(stats=(mu, sigma))
            batch = step.apply(batch)
            fitted.append(step)
        return Pipeline(tuple(fitted))
