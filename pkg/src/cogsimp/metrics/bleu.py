"""Corpus BLEU (n = 1..4, uniform weights, closest-reference brevity penalty)."""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from ..text import tokenize

MAX_N = 4


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(outputs: Sequence[str], reference_lists: Sequence[Sequence[str]]):
    """Return (matches[n], totals[n], hypothesis length, effective reference length)."""
    if len(outputs) != len(reference_lists):
        raise ValueError(f"length mismatch: {len(outputs)} outputs, {len(reference_lists)} reference lists")
    if not outputs:
        raise ValueError("BLEU needs at least one output")
    matches = [0] * MAX_N
    totals = [0] * MAX_N
    hyp_len = ref_len = 0
    for out, refs in zip(outputs, reference_lists):
        if not refs:
            raise ValueError("every output needs at least one reference")
        hyp = tokenize(out)
        ref_toks = [tokenize(r) for r in refs]
        hyp_len += len(hyp)
        ref_len += min((abs(len(r) - len(hyp)), len(r)) for r in ref_toks)[1]
        for n in range(1, MAX_N + 1):
            h = _ngrams(hyp, n)
            max_ref: Counter = Counter()
            for r in ref_toks:
                max_ref |= _ngrams(r, n)
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in h.items())
            totals[n - 1] += sum(h.values())
    return matches, totals, hyp_len, ref_len


def bleu(outputs: Sequence[str], reference_lists: Sequence[Sequence[str]]) -> float:
    """Corpus BLEU in [0, 1].

    Orders n >= 2 whose match count is zero are smoothed to (0 + 1) / (total + 1).
    """
    matches, totals, hyp_len, ref_len = bleu_stats(outputs, reference_lists)
    if hyp_len == 0 or matches[0] == 0:
        return 0.0
    log_p = 0.0
    for n in range(MAX_N):
        m, t = matches[n], totals[n]
        if n > 0 and m == 0:
            m, t = 1, t + 1
        log_p += math.log(m / t) / MAX_N
    bp = 1.0 if hyp_len > ref_len else math.exp(1 - ref_len / hyp_len)
    return bp * math.exp(log_p)


def identical_pct(sources: Sequence[str], outputs: Sequence[str]) -> float:
    """Percentage of outputs equal to their source after whitespace normalization."""
    if len(sources) != len(outputs):
        raise ValueError(f"length mismatch: {len(sources)} sources, {len(outputs)} outputs")
    if not sources:
        return 0.0
    same = sum(" ".join(s.split()) == " ".join(o.split()) for s, o in zip(sources, outputs))
    return 100.0 * same / len(sources)
