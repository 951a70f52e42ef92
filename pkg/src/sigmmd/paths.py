"""Piecewise-linear path container and basic path geometry."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidPathError


@dataclass(frozen=True)
class Path:
    """A piecewise-linear path: strictly increasing times and a value matrix.

    values has shape (n_points, dim); a 1-D array is promoted to a single
    channel. time_channel records which value channel carries the time grid
    after augmentation (None for raw paths) so later transforms can skip it.
    """

    times: np.ndarray
    values: np.ndarray
    time_channel: int | None = field(default=None)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if times.ndim != 1 or values.ndim != 2:
            raise InvalidPathError("times must be 1-D and values 2-D")
        if len(times) != len(values):
            raise InvalidPathError(
                f"times ({len(times)}) and values ({len(values)}) disagree in length")
        if len(times) < 2:
            raise InvalidPathError("a path needs at least two points")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise InvalidPathError("times and values must be finite")
        if np.any(np.diff(times) <= 0):
            raise InvalidPathError("times must be strictly increasing")
        if self.time_channel is not None and not 0 <= self.time_channel < values.shape[1]:
            raise InvalidPathError("time_channel out of range")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_points(self) -> int:
        return len(self.times)

    @property
    def n_segments(self) -> int:
        return len(self.times) - 1

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)


def total_variation(path: Path) -> float:
    """Sum of Euclidean norms of the increments."""
    return float(np.sum(np.linalg.norm(path.increments(), axis=1)))


def concat(first: Path, second: Path) -> Path:
    """Run `second` after `first`, translated so the junction matches.

    The second path's values are shifted to start at the first path's
    endpoint and its clock is shifted to continue the first path's clock.
    """
    if first.dim != second.dim:
        raise InvalidPathError("cannot concatenate paths of different dimension")
    times = np.concatenate([
        first.times,
        first.times[-1] + (second.times[1:] - second.times[0]),
    ])
    values = np.vstack([
        first.values,
        first.values[-1] + (second.values[1:] - second.values[0]),
    ])
    return Path(times, values, time_channel=first.time_channel)


def stack_values(batch: list[Path]) -> np.ndarray:
    """Stack equal-length paths into an (n, n_points, dim) array."""
    if not batch:
        raise InvalidPathError("empty batch")
    shape = batch[0].values.shape
    for p in batch:
        if p.values.shape != shape:
            raise InvalidPathError(
                "batch paths must share grid length and dimension to be stacked")
    return np.stack([p.values for p in batch])
