"""SARI: add/keep/delete n-gram scoring of a simplification against its source and references."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..text import tokenize

MAX_N = 4


@dataclass(frozen=True)
class SariScore:
    sari: float
    f1_add: float
    f1_keep: float
    p_delete: float
    per_sentence: tuple["SariScore", ...] | None = None

    def as_dict(self, per_sentence: bool = False) -> dict:
        out = {"sari": self.sari, "add": self.f1_add, "keep": self.f1_keep, "delete": self.p_delete}
        if per_sentence and self.per_sentence is not None:
            out["per_sentence"] = [s.as_dict() for s in self.per_sentence]
        return out


def sari_tokens(text: str) -> list[str]:
    return [t.lower() for t in tokenize(text)]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _ratio(num: float, den: float, both_empty: bool) -> float:
    if both_empty:
        return 1.0
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _scale(counter: Counter, k: int) -> Counter:
    return Counter({g: c * k for g, c in counter.items()})


def _ngram_components(s: Counter, c: Counter, r: Counter, k: int):
    """Precision/recall for one n-gram order.

    ``r`` sums reference counts; source and output counts are scaled by the
    number of references so a gram kept by a fraction of references earns
    that fraction.
    """
    s_rep, c_rep = _scale(s, k), _scale(c, k)

    keep_sys = s_rep & c_rep
    keep_good = keep_sys & r
    keep_ref = s_rep & r
    empty = not keep_sys and not keep_ref
    keep_p = _ratio(sum(keep_good[g] / keep_sys[g] for g in keep_good), len(keep_sys), empty)
    keep_r = _ratio(sum(keep_good[g] / keep_ref[g] for g in keep_good), len(keep_ref), empty)

    del_sys = s_rep - c_rep
    del_good = del_sys - r
    del_ref = s_rep - r
    empty = not del_sys and not del_ref
    del_p = _ratio(sum(del_good[g] / del_sys[g] for g in del_good), len(del_sys), empty)

    add_sys = set(c) - set(s)
    add_ref = set(r) - set(s)
    add_good = add_sys & add_ref
    empty = not add_sys and not add_ref
    add_p = _ratio(len(add_good), len(add_sys), empty)
    add_r = _ratio(len(add_good), len(add_ref), empty)
    return add_p, add_r, keep_p, keep_r, del_p


def sari_sentence(source: str, output: str, references: Sequence[str]) -> SariScore:
    if not references:
        raise ValueError("SARI needs at least one reference")
    s_tok, c_tok = sari_tokens(source), sari_tokens(output)
    r_toks = [sari_tokens(ref) for ref in references]
    k = len(references)
    sums = [0.0] * 5
    for n in range(1, MAX_N + 1):
        r = Counter()
        for toks in r_toks:
            r.update(ngrams(toks, n))
        for idx, v in enumerate(_ngram_components(ngrams(s_tok, n), ngrams(c_tok, n), r, k)):
            sums[idx] += v
    add_p, add_r, keep_p, keep_r, del_p = (v / MAX_N for v in sums)
    f_add = 100 * _f1(add_p, add_r)
    f_keep = 100 * _f1(keep_p, keep_r)
    p_del = 100 * del_p
    return SariScore((f_add + f_keep + p_del) / 3, f_add, f_keep, p_del)


def sari(sources: Sequence[str], outputs: Sequence[str],
         reference_lists: Sequence[Sequence[str]]) -> SariScore:
    """Corpus SARI as the mean of per-sentence scores; ``reference_lists[i]`` holds
    the references of instance ``i``."""
    if not (len(sources) == len(outputs) == len(reference_lists)):
        raise ValueError(f"length mismatch: {len(sources)} sources, {len(outputs)} outputs, "
                         f"{len(reference_lists)} reference lists")
    if not sources:
        raise ValueError("SARI needs at least one instance")
    per = tuple(sari_sentence(s, o, refs) for s, o, refs in zip(sources, outputs, reference_lists))
    n = len(per)
    f_add = sum(p.f1_add for p in per) / n
    f_keep = sum(p.f1_keep for p in per) / n
    p_del = sum(p.p_delete for p in per) / n
    return SariScore((f_add + f_keep + p_del) / 3, f_add, f_keep, p_del, per)
