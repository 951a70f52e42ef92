"""Truncated path signatures: graded tensors of iterated integrals.

Levels are stored densely in lexicographic word order: level m of a
d-dimensional path is a flat array of length d**m whose entry for the word
(i_1, ..., i_m) sits at the row-major position of that multi-index. Level 0
is the scalar 1.

For a single linear segment with increment v the level-m block is
v^{tensor m} / m!; longer paths are assembled segment-by-segment with
Chen's identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import CapacityError, InvalidPathError
from .paths import Path

# Dense storage grows as d**depth; refuse anything past this many entries
# in the top level rather than silently truncating or thrashing memory.
MAX_TOP_LEVEL_ENTRIES = 2 ** 24


@dataclass(frozen=True)
class SignatureTensor:
    """Signature truncated at `depth`: levels[m] is flat with d**m entries."""

    dim: int
    depth: int
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.levels) != self.depth + 1:
            raise InvalidPathError("levels must run from 0 to depth inclusive")
        for m, lev in enumerate(self.levels):
            if lev.shape != (self.dim ** m,):
                raise InvalidPathError(f"level {m} has wrong length")

    def level(self, m: int) -> np.ndarray:
        return self.levels[m]


def _check_capacity(dim: int, depth: int):
    if depth < 0:
        raise InvalidPathError("depth must be nonnegative")
    if dim ** depth > MAX_TOP_LEVEL_ENTRIES:
        raise CapacityError(
            f"dense level {depth} of a {dim}-dimensional path has {dim ** depth} "
            f"entries, over the bound {MAX_TOP_LEVEL_ENTRIES}")


@numba.njit(cache=True, parallel=True)
def _horner_flat(inc, depth, offsets):
    # inc (n, L, d) contiguous; offsets[m] is where level m starts in the
    # flat layout, offsets[depth + 1] the total width
    n, n_segments, d = inc.shape
    width = offsets[depth + 1]
    out = np.zeros((n, width))
    for i in numba.prange(n):
        lev = out[i]
        lev[0] = 1.0
        powers = np.empty(width)
        powers[0] = 1.0
        for s in range(n_segments):
            for k in range(1, depth + 1):
                base_prev = offsets[k - 1]
                w_prev = offsets[k] - base_prev
                inv = 1.0 / k
                idx = offsets[k]
                for a in range(w_prev):
                    pa = powers[base_prev + a] * inv
                    for b in range(d):
                        powers[idx] = pa * inc[i, s, b]
                        idx += 1
            # in place is safe: level m reads only levels < m, still
            # pre-update because m runs downward
            for m in range(depth, 0, -1):
                for k in range(1, m + 1):
                    base_l = offsets[m - k]
                    w_l = offsets[m - k + 1] - base_l
                    base_p = offsets[k]
                    w_p = offsets[k + 1] - base_p
                    idx = offsets[m]
                    for a in range(w_l):
                        la = lev[base_l + a]
                        if la == 0.0:
                            idx += w_p
                            continue
                        for b in range(w_p):
                            lev[idx] += la * powers[base_p + b]
                            idx += 1
    return out


def level_offsets(dim: int, depth: int) -> np.ndarray:
    """Start index of each level in the flat feature layout; the final
    entry is the total width sum_{m<=depth} dim**m."""
    out = np.zeros(depth + 2, dtype=np.int64)
    for m in range(depth + 1):
        out[m + 1] = out[m] + dim ** m
    return out


def batch_signature_levels(increments: np.ndarray, depth: int) -> list[np.ndarray]:
    """Signature levels for a batch of paths given as (n, L, d) increments.

    Horner-style Chen update: appending a segment with increment v maps
    level m to sum_k levels[m-k] tensor v^{tensor k} / k!. Levels are
    updated in descending order so the right-hand side reads pre-update
    values only. Returns views into one flat (n, width) array.
    """
    n, n_segments, dim = increments.shape
    _check_capacity(dim, depth)
    offsets = level_offsets(dim, depth)
    flat = _horner_flat(np.ascontiguousarray(increments, dtype=np.float64),
                        depth, offsets)
    return [flat[:, offsets[m]:offsets[m + 1]] for m in range(depth + 1)]


def signature(path: Path, depth: int) -> SignatureTensor:
    """Exact signature of a piecewise-linear path, truncated at `depth`."""
    levels = batch_signature_levels(path.increments()[None, :, :], depth)
    return SignatureTensor(path.dim, depth, tuple(lev[0] for lev in levels))


def signatures(batch: list[Path], depth: int) -> list[SignatureTensor]:
    """Signatures for a batch; paths are grouped by length so the batched
    kernel runs once per distinct grid length."""
    if not batch:
        return []
    dim = batch[0].dim
    for p in batch:
        if p.dim != dim:
            raise InvalidPathError("batch paths must share dimension")
    out: list[SignatureTensor | None] = [None] * len(batch)
    by_len: dict[int, list[int]] = {}
    for i, p in enumerate(batch):
        by_len.setdefault(p.n_segments, []).append(i)
    for idxs in by_len.values():
        inc = np.stack([batch[i].increments() for i in idxs])
        levels = batch_signature_levels(inc, depth)
        for row, i in enumerate(idxs):
            out[i] = SignatureTensor(dim, depth, tuple(lev[row] for lev in levels))
    return out  # type: ignore[return-value]


def chen_product(a: SignatureTensor, b: SignatureTensor) -> SignatureTensor:
    """Truncated tensor-concatenation product: the signature of the
    concatenated path when a and b are signatures of consecutive pieces."""
    if a.dim != b.dim:
        raise InvalidPathError("tensor dimensions disagree")
    depth = min(a.depth, b.depth)
    levels = []
    for m in range(depth + 1):
        acc = np.zeros(a.dim ** m)
        for k in range(m + 1):
            acc += np.kron(a.levels[k], b.levels[m - k])
        levels.append(acc)
    return SignatureTensor(a.dim, depth, tuple(levels))


def level_norm(sig: SignatureTensor, m: int) -> float:
    """Euclidean norm of level m (the Hilbert-Schmidt norm of the tensor)."""
    return float(np.linalg.norm(sig.levels[m]))
