"""MMD estimators on kernel Grams and their per-level decomposition.

Estimators (for batches X of size N and Y of size M):

* biased:   (1/N^2) sum k(X_i,X_j) + (1/M^2) sum k(Y_i,Y_j)
            - (2/NM) sum k(X_i,Y_j); a squared RKHS norm, never negative.
* unbiased: same-batch sums taken over off-diagonal pairs with 1/(N(N-1));
            unbiased for MMD^2 but can go negative.
* paired_u: one-sample U-statistic over pairs (X_i, Y_i), N == M, with
            h(Z_i, Z_j) = k(X_i,X_j) + k(Y_i,Y_j) - k(X_i,Y_j) - k(X_j,Y_i).

For the truncated backend the weighted kernel splits across signature
levels, so the same contrasts are available per level: Lambda_m estimates
the level-m inner product of expected signatures and Gamma_m is its
phi-weighted centered combination. Summing Gamma_m over m <= depth
reproduces the Gram-based estimator exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .signature import SignatureTensor
from .sig_kernel import GramMatrix, WeightFunction, unit_weights

ESTIMATORS = ("biased", "unbiased", "paired_u")
LAMBDA_MODES = ("cross", "biased", "unbiased")


@dataclass(frozen=True)
class MMDEstimate:
    value: float
    estimator: str
    n_x: int
    n_y: int


def _entries(g) -> np.ndarray:
    return g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)


def mmd_biased(gram_xx, gram_yy, gram_xy) -> MMDEstimate:
    gxx, gyy, gxy = _entries(gram_xx), _entries(gram_yy), _entries(gram_xy)
    n, m = gxy.shape
    value = gxx.mean() + gyy.mean() - 2.0 * gxy.mean()
    return MMDEstimate(float(value), "biased", n, m)


def _offdiag_mean(g: np.ndarray) -> float:
    n = g.shape[0]
    if n < 2:
        raise ConfigError("unbiased estimators need at least two paths per batch")
    return (g.sum() - np.trace(g)) / (n * (n - 1))


def mmd_unbiased(gram_xx, gram_yy, gram_xy) -> MMDEstimate:
    gxx, gyy, gxy = _entries(gram_xx), _entries(gram_yy), _entries(gram_xy)
    n, m = gxy.shape
    value = _offdiag_mean(gxx) + _offdiag_mean(gyy) - 2.0 * gxy.mean()
    return MMDEstimate(float(value), "unbiased", n, m)


def mmd_paired_u(gram_xx, gram_yy, gram_xy) -> MMDEstimate:
    gxx, gyy, gxy = _entries(gram_xx), _entries(gram_yy), _entries(gram_xy)
    n = gxy.shape[0]
    if gxy.shape[0] != gxy.shape[1]:
        raise ConfigError("paired_u needs equally sized batches")
    if n < 2:
        raise ConfigError("paired_u needs at least two pairs")
    cross = gxy.sum() - np.trace(gxy)
    value = ((gxx.sum() - np.trace(gxx)) + (gyy.sum() - np.trace(gyy))
             - 2.0 * cross) / (n * (n - 1))
    return MMDEstimate(float(value), "paired_u", n, n)


def estimate(estimator: str, gram_xx, gram_yy, gram_xy) -> MMDEstimate:
    if estimator == "biased":
        return mmd_biased(gram_xx, gram_yy, gram_xy)
    if estimator == "unbiased":
        return mmd_unbiased(gram_xx, gram_yy, gram_xy)
    if estimator == "paired_u":
        return mmd_paired_u(gram_xx, gram_yy, gram_xy)
    raise ConfigError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")


# ---------------------------------------------------------------------------
# per-level contributions
# ---------------------------------------------------------------------------

def level_feature_matrix(sigs: list[SignatureTensor], m: int) -> np.ndarray:
    """Stack level m of a batch of signatures into an (n, d**m) matrix."""
    if not sigs:
        raise ConfigError("empty signature batch")
    return np.stack([s.level(m) for s in sigs])


def lambda_hat(sigs_a: list[SignatureTensor], sigs_b: list[SignatureTensor],
               m: int, mode: str = "cross") -> float:
    """Estimate <E Sig_m(A), E Sig_m(B)> from signature batches.

    mode 'cross' averages over all pairs (1/NM); the same-batch modes treat
    the two arguments as one sample: 'unbiased' averages off-diagonal pairs,
    'biased' includes the diagonal.
    """
    if mode not in LAMBDA_MODES:
        raise ConfigError(f"unknown lambda mode {mode!r}; choose from {LAMBDA_MODES}")
    g = level_feature_matrix(sigs_a, m) @ level_feature_matrix(sigs_b, m).T
    if mode == "cross" or mode == "biased":
        return float(g.mean())
    return float(_offdiag_mean(g))


def gamma_hat(sigs_x: list[SignatureTensor], sigs_y: list[SignatureTensor],
              m: int, weights: WeightFunction | None = None,
              mode: str = "unbiased") -> float:
    """Level-m contribution to the phi-weighted squared MMD:
    phi(m) * [Lambda_m(X,X) - 2 Lambda_m(X,Y) + Lambda_m(Y,Y)],
    with the same-batch terms estimated in the requested bias mode."""
    if mode not in ("biased", "unbiased"):
        raise ConfigError("gamma_hat mode must be 'biased' or 'unbiased'")
    weights = weights or unit_weights()
    same = mode
    lam_xx = lambda_hat(sigs_x, sigs_x, m, same)
    lam_yy = lambda_hat(sigs_y, sigs_y, m, same)
    lam_xy = lambda_hat(sigs_x, sigs_y, m, "cross")
    return weights.phi(m) * (lam_xx - 2.0 * lam_xy + lam_yy)


def truncated_phi_mmd(sigs_x: list[SignatureTensor], sigs_y: list[SignatureTensor],
                      depth: int, weights: WeightFunction | None = None,
                      mode: str = "unbiased"):
    """Truncated phi-MMD and its level contributions.

    Returns (value, levels) with value == levels.sum(); the value equals the
    matching Gram-based estimator computed with the truncated backend at the
    same depth and weights.
    """
    weights = weights or unit_weights()
    if sigs_x[0].depth < depth or sigs_y[0].depth < depth:
        raise ConfigError("signatures are shallower than the requested depth")
    levels = np.array([gamma_hat(sigs_x, sigs_y, m, weights, mode)
                       for m in range(depth + 1)])
    return float(levels.sum()), levels
