"""Static (state-space) kernels and their cross-Gram matrices.

Paths can be lifted through a kernel feature map before taking signatures;
the lifted path is never materialized. Its only representation is the
cross-Gram of kernel evaluations between the two paths' sample points,
which is all the PDE kernel backend needs.

Scaling the lifted path by c multiplies every inner product by c**2, so
feature-space scaling is exposed as a multiplier on the Gram entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .paths import Path


@dataclass(frozen=True)
class StaticKernel:
    """kind 'linear' is the plain inner product; 'rbf' is
    exp(-||x - y||^2 / sigma_rbf^2), with sigma_rbf entering squared."""

    kind: str = "linear"
    sigma_rbf: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ConfigError(f"unknown static kernel kind {self.kind!r}")
        if self.kind == "rbf" and not self.sigma_rbf > 0:
            raise ConfigError("sigma_rbf must be positive")


def linear_kernel() -> StaticKernel:
    return StaticKernel("linear")


def rbf_kernel(sigma_rbf: float) -> StaticKernel:
    return StaticKernel("rbf", sigma_rbf)


def evaluate(kernel: StaticKernel, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel value between two state vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kernel.kind == "linear":
        return float(np.dot(x, y))
    d2 = float(np.sum((x - y) ** 2))
    return float(np.exp(-d2 / kernel.sigma_rbf ** 2))


def gram_between(kernel: StaticKernel, xs: np.ndarray, ys: np.ndarray,
                 scale: float = 1.0) -> np.ndarray:
    """Kernel matrix between two point clouds (rows are states).

    `scale` multiplies entries by scale**2: the Gram of the lifted paths
    after feature-space scaling by `scale`.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if kernel.kind == "linear":
        g = xs @ ys.T
    else:
        d2 = (np.sum(xs ** 2, axis=1)[:, None] + np.sum(ys ** 2, axis=1)[None, :]
              - 2.0 * xs @ ys.T)
        np.maximum(d2, 0.0, out=d2)
        g = np.exp(-d2 / kernel.sigma_rbf ** 2)
    return scale ** 2 * g


def cross_gram(kernel: StaticKernel, x: Path, y: Path, scale: float = 1.0) -> np.ndarray:
    """Static Gram between the sample points of two paths,
    shape (x.n_points, y.n_points)."""
    return gram_between(kernel, x.values, y.values, scale=scale)
