"""Independent reference implementations used to pin expected test values.

Everything in here is deliberately naive: fine-grid quadrature, direct
double-loop sums, explicit enumeration. The package code must agree with
these oracles, never the other way around.
"""

import itertools
import math

import numpy as np


# ---------------------------------------------------------------------------
# signature oracle: iterated integrals by quadrature on a refined grid
# ---------------------------------------------------------------------------

def _refine_grid(times, values, per_segment):
    """Linearly interpolate each segment into `per_segment` equal pieces."""
    ts = [np.asarray([times[0]])]
    vs = [values[:1]]
    for i in range(len(times) - 1):
        frac = np.linspace(0.0, 1.0, per_segment + 1)[1:]
        ts.append(times[i] + frac * (times[i + 1] - times[i]))
        vs.append(values[i] + frac[:, None] * (values[i + 1] - values[i]))
    return np.concatenate(ts), np.vstack(vs)


def quadrature_signature(times, values, depth, per_segment=256):
    """Signature levels of a piecewise-linear path by iterated quadrature.

    Trapezoid rule on a refined grid, Richardson-extrapolated over two
    refinements, so the result is accurate to well below 1e-10 for the
    small paths used in tests. Level m is returned as a flat array of
    length d**m in lexicographic word order.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))

    def run(per_seg):
        _, vs = _refine_grid(np.asarray(times, float), values, per_seg)
        d = vs.shape[1]
        dx = np.diff(vs, axis=0)
        prev = {(): np.ones(len(vs))}
        levels = [np.ones(1)]
        for m in range(1, depth + 1):
            cur = {}
            flat = np.empty(d ** m)
            for pos, word in enumerate(itertools.product(range(d), repeat=m)):
                f = prev[word[:-1]]
                avg = 0.5 * (f[:-1] + f[1:])
                integral = np.concatenate([[0.0], np.cumsum(avg * dx[:, word[-1]])])
                cur[word] = integral
                flat[pos] = integral[-1]
            prev = cur
            levels.append(flat)
        return levels

    coarse = run(per_segment)
    fine = run(2 * per_segment)
    return [(4.0 * f - c) / 3.0 for c, f in zip(coarse, fine)]


# ---------------------------------------------------------------------------
# series oracle for kernels of single-segment (linear) paths
# ---------------------------------------------------------------------------

def linear_path_kernel_series(inner, theta=1.0, terms=80):
    """sum_m theta^m * inner^m / (m!)^2, the phi-kernel of two linear paths."""
    total = 0.0
    for m in range(terms):
        total += (theta * inner) ** m / math.factorial(m) ** 2
    return total


# ---------------------------------------------------------------------------
# MMD estimator oracles: direct double loops over Gram matrices
# ---------------------------------------------------------------------------

def naive_mmd_biased(gxx, gyy, gxy):
    n, m = gxy.shape
    s = 0.0
    for i in range(n):
        for j in range(n):
            s += gxx[i, j] / (n * n)
    for i in range(m):
        for j in range(m):
            s += gyy[i, j] / (m * m)
    for i in range(n):
        for j in range(m):
            s -= 2.0 * gxy[i, j] / (n * m)
    return s


def naive_mmd_unbiased(gxx, gyy, gxy):
    n, m = gxy.shape
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += gxx[i, j] / (n * (n - 1))
    for i in range(m):
        for j in range(m):
            if i != j:
                s += gyy[i, j] / (m * (m - 1))
    for i in range(n):
        for j in range(m):
            s -= 2.0 * gxy[i, j] / (n * m)
    return s


def naive_mmd_paired_u(gxx, gyy, gxy):
    n = gxy.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                h = gxx[i, j] + gyy[i, j] - gxy[i, j] - gxy[j, i]
                s += h / (n * (n - 1))
    return s


def naive_gaussian_alt(gxx, gyy, gxy):
    """Plug-in U-statistic mean and asymptotic variance via conditional means."""
    n = gxy.shape[0]
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                h[i, j] = gxx[i, j] + gyy[i, j] - gxy[i, j] - gxy[j, i]
    u = h.sum() / (n * (n - 1))
    cond = h.sum(axis=1) / (n - 1)
    sigma2 = 4.0 * (np.mean(cond ** 2) - u ** 2)
    return u, sigma2


def enumerate_split_stats(pooled_gram, n1, stat_fn):
    """Statistic value for every unordered split of the pool into (n1, rest)."""
    n = pooled_gram.shape[0]
    seen = set()
    values = []
    for combo in itertools.combinations(range(n), n1):
        rest = tuple(i for i in range(n) if i not in combo)
        key = frozenset([combo, rest])
        if key in seen:
            continue
        seen.add(key)
        ia, ib = np.asarray(combo), np.asarray(rest)
        values.append(stat_fn(pooled_gram[np.ix_(ia, ia)],
                              pooled_gram[np.ix_(ib, ib)],
                              pooled_gram[np.ix_(ia, ib)]))
    return np.asarray(values)


# ---------------------------------------------------------------------------
# random path generation for property tests
# ---------------------------------------------------------------------------

def random_walk_arrays(rng, n_points, dim, total_variation=None):
    """Random piecewise-linear path arrays, optionally rescaled to a target TV."""
    times = np.sort(rng.uniform(0.0, 1.0, n_points))
    times[0], times[-1] = 0.0, 1.0
    while np.any(np.diff(times) <= 0):
        times = np.linspace(0.0, 1.0, n_points)
    steps = rng.normal(size=(n_points - 1, dim))
    values = np.vstack([np.zeros(dim), np.cumsum(steps, axis=0)])
    if total_variation is not None:
        tv = np.sum(np.linalg.norm(np.diff(values, axis=0), axis=1))
        values = values * (total_variation / tv)
    return times, values
