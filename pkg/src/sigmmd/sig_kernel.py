"""Signature kernels with per-level weights, plus batched Gram computation.

Two interchangeable backends:

* truncated: exact signatures up to a depth, inner products weighted per
  level by phi(m). Supports arbitrary positive weight tables and exposes
  per-level structure. Works on raw (finite-dimensional) paths.
* pde: solves the Goursat problem d^2 k / ds dt = <dx_s, dy_t> k on the
  data grid, refined 2**dyadic_order times per cell, with an explicit
  second-order finite-difference update. The driving increments come from
  second-order mixed differences of a static kernel Gram, so feature-space
  lifts (e.g. RBF) are supported without materializing the lifted path.
  Geometric weights theta are realized by scaling the increment products
  by theta (equivalently pre-scaling both paths by sqrt(theta)), never by
  post-processing kernel values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .errors import ConfigError, NumericalError
from .paths import Path, stack_values
from .signature import batch_signature_levels, signature, _check_capacity
from .static_kernels import StaticKernel, linear_kernel

MAX_DYADIC_ORDER = 10


# ---------------------------------------------------------------------------
# per-level weight functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """phi(m) >= 0 per signature level.

    kinds: 'unit' (all ones), 'geometric' (theta**m), 'table' (explicit
    per-level entries, zero past the end). Positivity within the table is
    enforced; the well-definedness condition sum_m C**m phi(m) / (m!)**2
    < infinity holds for every C for all three kinds since the (m!)**-2
    factor dominates any geometric growth.
    """

    kind: str = "unit"
    theta: float = 1.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("unit", "geometric", "table"):
            raise ConfigError(f"unknown weight kind {self.kind!r}")
        if self.kind == "geometric" and not self.theta > 0:
            raise ConfigError("geometric weight theta must be positive")
        if self.kind == "table":
            if not self.table:
                raise ConfigError("table weights need at least one entry")
            if any(not t > 0 for t in self.table):
                raise ConfigError("table weights must be positive")

    def phi(self, m: int) -> float:
        if self.kind == "unit":
            return 1.0
        if self.kind == "geometric":
            return self.theta ** m
        return self.table[m] if m < len(self.table) else 0.0

    def phi_array(self, depth: int) -> np.ndarray:
        return np.array([self.phi(m) for m in range(depth + 1)])


def unit_weights() -> WeightFunction:
    return WeightFunction("unit")


def geometric_weights(theta: float) -> WeightFunction:
    return WeightFunction("geometric", theta=theta)


def table_weights(entries) -> WeightFunction:
    return WeightFunction("table", table=tuple(float(e) for e in entries))


def is_well_defined(weights: WeightFunction, growth: float = 1e6) -> bool:
    """Check sum_m growth**m phi(m) / (m!)**2 converges (log domain).

    The log-terms peak near m = sqrt(growth * theta) and then fall off as
    -2 m log m; sampling well past the peak confirms the decay without ever
    forming the astronomically large terms themselves. Finite tables are
    finite sums.
    """
    if weights.kind == "table":
        return True
    log_theta = 0.0 if weights.kind == "unit" else math.log(weights.theta)
    log_c = math.log(growth)

    def log_term(m: int) -> float:
        return m * (log_c + log_theta) - 2.0 * math.lgamma(m + 1)

    m_peak = math.exp((log_c + log_theta) / 2.0)
    m1 = max(64, int(4 * m_peak))
    return log_term(2 * m1) < log_term(m1) and log_term(2 * m1) < -100.0


# ---------------------------------------------------------------------------
# backend configurations and the Gram container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedBackend:
    depth: int = 10
    weights: WeightFunction = field(default_factory=unit_weights)

    def __post_init__(self):
        if self.depth < 0:
            raise ConfigError("depth must be nonnegative")


@dataclass(frozen=True)
class PDEBackend:
    static_kernel: StaticKernel = field(default_factory=linear_kernel)
    dyadic_order: int = 3
    weights: WeightFunction = field(default_factory=unit_weights)
    lift_scale: float = 1.0

    def __post_init__(self):
        if not 0 <= self.dyadic_order <= MAX_DYADIC_ORDER:
            raise ConfigError(f"dyadic_order must lie in [0, {MAX_DYADIC_ORDER}]")
        if not self.lift_scale > 0:
            raise ConfigError("lift_scale must be positive")
        if self.weights.kind == "table":
            raise ConfigError("table weights require the truncated backend")


@dataclass
class GramMatrix:
    entries: np.ndarray
    symmetric: bool = False

    @property
    def shape(self):
        return self.entries.shape


# ---------------------------------------------------------------------------
# truncated backend
# ---------------------------------------------------------------------------

def truncated_features(batch: list[Path], depth: int,
                       weights: WeightFunction | None = None) -> np.ndarray:
    """Stacked flat signature features, each level scaled by sqrt(phi(m)),
    so a plain matrix product of two feature stacks is the weighted Gram."""
    if not batch:
        raise ConfigError("empty batch")
    weights = weights or unit_weights()
    dim = batch[0].dim
    _check_capacity(dim, depth)
    sq = np.sqrt(weights.phi_array(depth))
    width = sum(dim ** m for m in range(depth + 1))
    out = np.empty((len(batch), width))
    by_len: dict[int, list[int]] = {}
    for i, p in enumerate(batch):
        if p.dim != dim:
            raise ConfigError("batch paths must share dimension")
        by_len.setdefault(p.n_segments, []).append(i)
    for idxs in by_len.values():
        inc = np.stack([batch[i].increments() for i in idxs])
        levels = batch_signature_levels(inc, depth)
        feats = np.hstack([sq[m] * levels[m] for m in range(depth + 1)])
        out[idxs, :] = feats
    return out


def truncated_kernel(x: Path, y: Path, depth: int,
                     weights: WeightFunction | None = None) -> float:
    """sum_{m<=depth} phi(m) <Sig_m(x), Sig_m(y)>."""
    weights = weights or unit_weights()
    sx, sy = signature(x, depth), signature(y, depth)
    return float(sum(weights.phi(m) * float(sx.level(m) @ sy.level(m))
                     for m in range(depth + 1)))


def scale_then_kernel_identity_check(x: Path, y: Path, c: float, depth: int = 8):
    """Return (k(c*x, c*y) with unit weights, k(x, y) with geometric c**2).

    The two must agree: scaling both paths by c multiplies the level-m
    inner product by c**(2m), exactly the geometric weight theta = c**2.
    """
    xs = Path(x.times, c * x.values, time_channel=x.time_channel)
    ys = Path(y.times, c * y.values, time_channel=y.time_channel)
    lhs = truncated_kernel(xs, ys, depth, unit_weights())
    rhs = truncated_kernel(x, y, depth, geometric_weights(c * c))
    return lhs, rhs


# ---------------------------------------------------------------------------
# PDE backend (Goursat problem, explicit second-order scheme)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _solve_pde(A, order):
    """Solve the Goursat problem for one pair given the increment-product
    matrix A (one entry per data-grid cell), refining each cell 2**order
    times per axis. Rolling two-row storage."""
    P, Q = A.shape
    f = 1 << order
    inv = 1.0 / (f * f)
    nt = Q * f
    prev = np.ones(nt + 1)
    cur = np.ones(nt + 1)
    for i in range(P * f):
        ai = i // f
        cur[0] = 1.0
        for j in range(nt):
            a = A[ai, j // f] * inv
            a2 = a * a / 12.0
            cur[j + 1] = ((cur[j] + prev[j + 1]) * (1.0 + 0.5 * a + a2)
                          - prev[j] * (1.0 - a2))
        prev, cur = cur, prev
    return prev[nt]


@njit(cache=True, parallel=True)
def _pde_gram_linear(incx, incy, mult, order, symmetric):
    n_x, p, d = incx.shape
    n_y, q, _ = incy.shape
    out = np.zeros((n_x, n_y))
    for n in prange(n_x):
        a = np.empty((p, q))
        start = n if symmetric else 0
        for m in range(start, n_y):
            for i in range(p):
                for j in range(q):
                    s = 0.0
                    for c in range(d):
                        s += incx[n, i, c] * incy[m, j, c]
                    a[i, j] = s * mult
            out[n, m] = _solve_pde(a, order)
    return out


@njit(cache=True, parallel=True)
def _pde_gram_rbf(valx, valy, sigma2, mult, order, symmetric):
    n_x, px, d = valx.shape
    n_y, py, _ = valy.shape
    out = np.zeros((n_x, n_y))
    for n in prange(n_x):
        g = np.empty((px, py))
        a = np.empty((px - 1, py - 1))
        start = n if symmetric else 0
        for m in range(start, n_y):
            for s in range(px):
                for t in range(py):
                    d2 = 0.0
                    for c in range(d):
                        diff = valx[n, s, c] - valy[m, t, c]
                        d2 += diff * diff
                    g[s, t] = mult * np.exp(-d2 / sigma2)
            for i in range(px - 1):
                for j in range(py - 1):
                    a[i, j] = g[i + 1, j + 1] - g[i + 1, j] - g[i, j + 1] + g[i, j]
            out[n, m] = _solve_pde(a, order)
    return out


def pde_kernel(static_gram: np.ndarray, dyadic_order: int = 3) -> float:
    """Signature kernel of two paths represented by their static cross-Gram.

    The PDE's driving term is the second-order mixed difference of the
    Gram; for the linear static kernel that difference is exactly
    <increment of x, increment of y> per cell.
    """
    g = np.ascontiguousarray(np.asarray(static_gram, dtype=float))
    if g.ndim != 2 or g.shape[0] < 2 or g.shape[1] < 2:
        raise ConfigError("static_gram must be at least 2x2")
    if not np.all(np.isfinite(g)):
        raise NumericalError("static_gram contains non-finite entries")
    if not 0 <= dyadic_order <= MAX_DYADIC_ORDER:
        raise ConfigError(f"dyadic_order must lie in [0, {MAX_DYADIC_ORDER}]")
    a = g[1:, 1:] - g[1:, :-1] - g[:-1, 1:] + g[:-1, :-1]
    value = float(_solve_pde(np.ascontiguousarray(a), dyadic_order))
    if not np.isfinite(value):
        raise NumericalError("PDE solve produced a non-finite kernel value")
    return value


def _pde_multiplier(backend: PDEBackend) -> float:
    theta = backend.weights.theta if backend.weights.kind == "geometric" else 1.0
    return theta * backend.lift_scale ** 2


def gram(batch_x: list[Path], batch_y: list[Path] | None,
         backend: TruncatedBackend | PDEBackend) -> GramMatrix:
    """Kernel matrix between two batches (symmetric if batch_y is None)."""
    symmetric = batch_y is None
    if isinstance(backend, TruncatedBackend):
        fx = truncated_features(batch_x, backend.depth, backend.weights)
        fy = fx if symmetric else truncated_features(batch_y, backend.depth,
                                                     backend.weights)
        entries = fx @ fy.T
    elif isinstance(backend, PDEBackend):
        mult = _pde_multiplier(backend)
        vx = stack_values(batch_x)
        vy = vx if symmetric else stack_values(batch_y)
        if backend.static_kernel.kind == "linear":
            entries = _pde_gram_linear(
                np.ascontiguousarray(np.diff(vx, axis=1)),
                np.ascontiguousarray(np.diff(vy, axis=1)),
                mult, backend.dyadic_order, symmetric)
        else:
            entries = _pde_gram_rbf(
                np.ascontiguousarray(vx), np.ascontiguousarray(vy),
                backend.static_kernel.sigma_rbf ** 2,
                mult, backend.dyadic_order, symmetric)
        if symmetric:
            lower = np.tril_indices(entries.shape[0], -1)
            entries[lower] = entries.T[lower]
    else:
        raise ConfigError(f"unknown kernel backend {type(backend).__name__}")
    if symmetric:
        entries = 0.5 * (entries + entries.T)
    if not np.all(np.isfinite(entries)):
        raise NumericalError("kernel Gram contains non-finite entries")
    return GramMatrix(entries, symmetric=symmetric)
