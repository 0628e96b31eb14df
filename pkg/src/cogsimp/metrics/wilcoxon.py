"""Wilcoxon signed-rank test with an exact null distribution for small samples."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .._kernels import signed_rank_counts

EXACT_MAX_N = 25


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="mergesort")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_signed_rank(xs: Sequence[float], ys: Sequence[float],
                         method: str = "auto") -> tuple[float, float]:
    """Return ``(W, two-sided p)`` with ``W = min(W+, W-)``.

    Zero differences are dropped.  ``method`` is ``"auto"`` (exact up to 25
    nonzero pairs), ``"exact"`` or ``"approx"`` (normal with tie and
    continuity corrections).
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d sequences of equal length")
    if len(x) == 0:
        raise ValueError("need at least one pair")
    d = x - y
    d = d[d != 0]
    n = len(d)
    if n == 0:
        raise ValueError("no nonzero differences")
    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "approx"
    if method == "exact":
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = signed_rank_counts(doubled)
        total = int(doubled.sum())
        w2 = int(round(2 * w))
        s = np.arange(total + 1)
        extreme = np.minimum(s, total - s) <= w2
        p = float(counts[extreme].sum()) / float(2 ** n)
        return w, min(1.0, p)
    if method != "approx":
        raise ValueError(f"unknown method {method!r}")

    mean = n * (n + 1) / 4
    _, tie_sizes = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24 - float(((tie_sizes ** 3) - tie_sizes).sum()) / 48
    if var <= 0:
        return w, 1.0
    z = (abs(w - mean) - 0.5) / math.sqrt(var)
    z = max(z, 0.0)
    p = math.erfc(z / math.sqrt(2))
    return w, min(1.0, p)
