"""Hot loops for incremental likelihood evaluation.

The dominant cost of a coordinate update is the sum of ln(1 + delta/g) over
every (factor, feature) pair in the suffix of the likelihood product.  The
kernels replace one log call per element with one multiply by accumulating
running products of the factors (1 + delta/g) and taking a log only when the
product risks leaving the exponent range (checked every 32 elements).
Candidate deltas are processed four at a time so the reciprocal is shared.

The complement table is stored as a base array plus one scalar shift per
factor (commits then cost O(n) rather than O(suffix)); the dense kernel adds
the shift on the fly.

Correctness note: a product that still overflows inside a 32-element window
(possible only for pathologically small proposal values) poisons the result
with inf/nan; callers check finiteness and rerun the exact numpy path.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every import
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


_HI = 1e150
_LO = 1e-150


@njit(cache=True, fastmath=True)
def _dense_log_ratio_4(G, off, shift, t_lo, skip, d0, d1, d2, d3):
    """Sums of ln(1 + d/(G[idx]+shift[t])) over factors t >= t_lo.

    ``skip`` (sorted flat positions) marks elements to leave out; the loop
    runs branch-free between consecutive skip positions, in blocks of 32
    with one overflow check per block.
    """
    ns = skip.size
    sp = 0
    a0 = a1 = a2 = a3 = 0.0
    p0 = p1 = p2 = p3 = 1.0
    for t in range(t_lo, off.size - 1):
        sh = shift[t]
        lo = off[t]
        hi = off[t + 1]
        while sp < ns and skip[sp] < lo:
            sp += 1
        seg = lo
        while seg < hi:
            seg_end = hi
            if sp < ns and skip[sp] < hi:
                seg_end = skip[sp]
            idx = seg
            while idx < seg_end:
                blk = min(idx + 32, seg_end)
                for k in range(idx, blk):
                    inv = 1.0 / (G[k] + sh)
                    p0 *= 1.0 + d0 * inv
                    p1 *= 1.0 + d1 * inv
                    p2 *= 1.0 + d2 * inv
                    p3 *= 1.0 + d3 * inv
                idx = blk
                if (
                    p0 > _HI
                    or p0 < _LO
                    or p1 > _HI
                    or p1 < _LO
                    or p2 > _HI
                    or p2 < _LO
                    or p3 > _HI
                    or p3 < _LO
                ):
                    a0 += np.log(p0)
                    a1 += np.log(p1)
                    a2 += np.log(p2)
                    a3 += np.log(p3)
                    p0 = p1 = p2 = p3 = 1.0
            if seg_end == hi:
                break
            sp += 1
            seg = seg_end + 1
    a0 += np.log(p0)
    a1 += np.log(p1)
    a2 += np.log(p2)
    a3 += np.log(p3)
    return a0, a1, a2, a3


@njit(cache=True, fastmath=True)
def _array_log_ratio_4(vals, d0, d1, d2, d3):
    """Sums of ln(1 + d/vals[k]) for a plain value array."""
    a0 = a1 = a2 = a3 = 0.0
    p0 = p1 = p2 = p3 = 1.0
    cnt = 0
    for k in range(vals.size):
        inv = 1.0 / vals[k]
        p0 *= 1.0 + d0 * inv
        p1 *= 1.0 + d1 * inv
        p2 *= 1.0 + d2 * inv
        p3 *= 1.0 + d3 * inv
        cnt += 1
        if cnt == 32:
            if (
                p0 > _HI
                or p0 < _LO
                or p1 > _HI
                or p1 < _LO
                or p2 > _HI
                or p2 < _LO
                or p3 > _HI
                or p3 < _LO
            ):
                a0 += np.log(p0)
                a1 += np.log(p1)
                a2 += np.log(p2)
                a3 += np.log(p3)
                p0 = p1 = p2 = p3 = 1.0
            cnt = 0
    a0 += np.log(p0)
    a1 += np.log(p1)
    a2 += np.log(p2)
    a3 += np.log(p3)
    return a0, a1, a2, a3


def _batched(fn, deltas, *args):
    deltas = np.asarray(deltas, dtype=np.float64)
    out = np.empty(deltas.size, dtype=np.float64)
    for base in range(0, deltas.size, 4):
        chunk = deltas[base : base + 4]
        padded = np.zeros(4, dtype=np.float64)
        padded[: chunk.size] = chunk
        vals = fn(*args, padded[0], padded[1], padded[2], padded[3])
        out[base : base + 4] = vals[: chunk.size]
    return out


def dense_log_ratio(G, off, shift, t_lo, skip, deltas):
    """Vectorised-over-deltas dense sums; None when the fast path failed."""
    if not HAVE_NUMBA:
        return None
    out = _batched(_dense_log_ratio_4, deltas, G, off, shift, t_lo, skip)
    return out if np.all(np.isfinite(out)) else None


def array_log_ratio(vals, deltas):
    """Per-delta sums of ln(1 + d/vals); exact numpy fallback when needed."""
    deltas = np.asarray(deltas, dtype=np.float64)
    if HAVE_NUMBA and vals.size:
        out = _batched(_array_log_ratio_4, deltas, vals)
        if np.all(np.isfinite(out)):
            return out
    out = np.empty(deltas.size, dtype=np.float64)
    for idx, d in enumerate(deltas):
        out[idx] = float(np.log1p(d / vals).sum())
    return out
