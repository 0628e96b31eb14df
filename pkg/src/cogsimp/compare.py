"""Comparing datasets through how often, and how jointly, operations are applied."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import ALL_OPS, N_OPS, OperationProfile, OperationSet, TaggedInstance

MAX_JSD = math.sqrt(math.log(2))


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    labels: tuple[str, ...]
    values: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([""] + list(self.labels))
        for label, row in zip(self.labels, self.values):
            writer.writerow([label] + [f"{v:.6f}" for v in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "values": self.values.round(12).tolist()}


def _ops_of(item) -> OperationSet:
    if isinstance(item, TaggedInstance):
        return item.ops
    return OperationSet(item)


def occurrence_matrix(tagged: Iterable) -> np.ndarray:
    """Binary (instances x 9) matrix of operation occurrences."""
    rows = [_ops_of(t).to_mask() for t in tagged]
    if not rows:
        return np.zeros((0, N_OPS), dtype=np.int8)
    return np.vstack(rows)


def cooccurrence_correlation(x: np.ndarray) -> tuple[np.ndarray, frozenset[int]]:
    """Pearson correlations between columns; zero-variance columns get 0 off the diagonal."""
    x = np.asarray(x, dtype=float)
    centered = x - x.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    degenerate = frozenset(int(i) for i in np.flatnonzero(norms == 0))
    safe = np.where(norms == 0, 1.0, norms)
    corr = (centered.T @ centered) / np.outer(safe, safe)
    for i in degenerate:
        corr[i, :] = 0.0
        corr[:, i] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0), degenerate


def ops_histogram(tagged: Iterable) -> dict[int, int]:
    """Number of instances per operation count (only non-empty bins)."""
    counts = Counter(len(_ops_of(t)) for t in tagged)
    return dict(sorted(counts.items()))


def build_profile(tagged: Sequence, name: str) -> OperationProfile:
    tagged = list(tagged)
    if not tagged:
        raise ValueError(f"subset {name!r} is empty")
    x = occurrence_matrix(tagged)
    freqs = x.mean(axis=0)
    corr, degenerate = cooccurrence_correlation(x)
    return OperationProfile(
        subset_name=name,
        n_instances=len(tagged),
        freqs={op: float(freqs[op.value]) for op in ALL_OPS},
        corr=corr,
        degenerate_ops=frozenset(ALL_OPS[i] for i in degenerate),
        histogram=ops_histogram(tagged),
    )


def _kl_term(x: float, y: float) -> float:
    """x * log(x / m) with m = (x + y) / 2, without forming m (it can underflow)."""
    return 0.0 if x == 0 else x * (math.log(x) - math.log(x + y) + math.log(2))


def jsd_bernoulli(p: float, q: float) -> float:
    """Jensen-Shannon distance (natural log) between Bernoulli(p) and Bernoulli(q)."""
    for v in (p, q):
        if not 0.0 <= v <= 1.0 or math.isnan(v):
            raise ValueError(f"frequency {v} outside [0, 1]")
    if p == q:
        return 0.0
    kl_p = _kl_term(p, q) + _kl_term(1 - p, 1 - q)
    kl_q = _kl_term(q, p) + _kl_term(1 - q, 1 - p)
    return math.sqrt(max(0.0, (kl_p + kl_q) / 2))


def mean_jsd(a: OperationProfile, b: OperationProfile) -> float:
    return sum(jsd_bernoulli(a.freqs[op], b.freqs[op]) for op in ALL_OPS) / N_OPS


def l2_matrix_distance(a: OperationProfile, b: OperationProfile) -> float:
    """Frobenius norm of the difference of the two correlation matrices."""
    ca, cb = np.asarray(a.corr, dtype=float), np.asarray(b.corr, dtype=float)
    if ca.shape != (N_OPS, N_OPS) or cb.shape != (N_OPS, N_OPS):
        raise ValueError("correlation matrices must be 9x9")
    return float(np.sqrt(((ca - cb) ** 2).sum()))


METRICS = {"mean_jsd": mean_jsd, "l2": l2_matrix_distance}


def pairwise_distances(profiles: Sequence[OperationProfile], metric: str = "mean_jsd") -> DistanceMatrix:
    if len(profiles) < 2:
        raise ValueError("need at least two profiles")
    labels = tuple(p.subset_name for p in profiles)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate subset names: {sorted(l for l in labels if labels.count(l) > 1)}")
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    n = len(profiles)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = fn(profiles[i], profiles[j])
    return DistanceMatrix(labels, values)


def profile_to_json(p: OperationProfile) -> dict:
    return {
        "subset": p.subset_name,
        "n_instances": p.n_instances,
        "freqs": {op.name: p.freqs[op] for op in ALL_OPS},
        "corr": {"labels": [op.name for op in ALL_OPS], "values": np.round(p.corr, 12).tolist()},
        "degenerate_ops": [op.name for op in ALL_OPS if op in p.degenerate_ops],
        "histogram": {str(k): v for k, v in p.histogram.items()},
    }


def histograms_csv(profiles: Sequence[OperationProfile]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subset"] + [str(k) for k in range(N_OPS + 1)])
    for p in profiles:
        writer.writerow([p.subset_name] + [p.histogram.get(k, 0) for k in range(N_OPS + 1)])
    return buf.getvalue()


def dumps_profiles(profiles: Sequence[OperationProfile]) -> str:
    return json.dumps([profile_to_json(p) for p in profiles], indent=2, sort_keys=False) + "\n"
