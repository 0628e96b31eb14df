"""Numeric inner loops, compiled with numba when available.

Set ``COGSIMP_DISABLE_JIT=1`` to force the pure-numpy implementations.
Both variants are always importable so they can be compared directly.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("COGSIMP_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("jit disabled by COGSIMP_DISABLE_JIT")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def _codes(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)


# ---------------------------------------------------------------------------
# Levenshtein distance


def _levenshtein_loop(a, b):
    n = a.shape[0]
    m = b.shape[0]
    prev = np.arange(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


_levenshtein_jit = njit(cache=True)(_levenshtein_loop) if HAVE_NUMBA else None


def levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Row-vectorized DP: insertions resolved with a running minimum."""
    m = b.shape[0]
    if a.shape[0] == 0:
        return int(m)
    if m == 0:
        return int(a.shape[0])
    cols = np.arange(m + 1, dtype=np.int64)
    prev = cols.copy()
    for i in range(1, a.shape[0] + 1):
        sub = prev[:-1] + (b != a[i - 1])
        tmp = np.empty(m + 1, dtype=np.int64)
        tmp[0] = i
        tmp[1:] = np.minimum(sub, prev[1:] + 1)
        # cur[j] = min_k<=j tmp[k] + (j - k)
        prev = np.minimum.accumulate(tmp - cols) + cols
    return int(prev[m])


def levenshtein_jit(a: np.ndarray, b: np.ndarray) -> int:
    if _levenshtein_jit is None:
        raise RuntimeError("numba is not available")
    return int(_levenshtein_jit(a, b))


def levenshtein(s: str, t: str) -> int:
    """Character edit distance with unit costs."""
    a, b = _codes(s), _codes(t)
    if HAVE_NUMBA:
        return int(_levenshtein_jit(a, b))
    return levenshtein_numpy(a, b)


# ---------------------------------------------------------------------------
# Signed-rank null distribution: counts[s] = number of the 2**n sign
# assignments whose positive rank sum equals s.  Ranks are passed doubled so
# that average ranks of ties stay integral.


def _signed_rank_counts_loop(doubled_ranks):
    total = 0
    for r in doubled_ranks:
        total += r
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    reach = 0
    for r in doubled_ranks:
        for s in range(reach, -1, -1):
            c = counts[s]
            if c != 0:
                counts[s + r] += c
        reach += r
    return counts


_signed_rank_counts_jit = njit(cache=True)(_signed_rank_counts_loop) if HAVE_NUMBA else None


def signed_rank_counts_numpy(doubled_ranks: np.ndarray) -> np.ndarray:
    doubled_ranks = np.asarray(doubled_ranks, dtype=np.int64)
    counts = np.zeros(int(doubled_ranks.sum()) + 1, dtype=np.int64)
    counts[0] = 1
    reach = 0
    for r in doubled_ranks:
        r = int(r)
        shifted = counts[: reach + 1].copy()
        counts[r : r + reach + 1] += shifted
        reach += r
    return counts


def signed_rank_counts_jit(doubled_ranks: np.ndarray) -> np.ndarray:
    if _signed_rank_counts_jit is None:
        raise RuntimeError("numba is not available")
    return _signed_rank_counts_jit(np.asarray(doubled_ranks, dtype=np.int64))


def signed_rank_counts(doubled_ranks) -> np.ndarray:
    arr = np.asarray(doubled_ranks, dtype=np.int64)
    if HAVE_NUMBA:
        return _signed_rank_counts_jit(arr)
    return signed_rank_counts_numpy(arr)
