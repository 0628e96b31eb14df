"""Per-instance and per-corpus descriptive statistics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

from .._kernels import levenshtein
from ..core import SimplificationInstance
from ..ingest import FrequencyTable
from ..text import CONTENT_UPOS, FUNCTION_WORDS, is_punct, tokenize


@dataclass(frozen=True)
class InstanceStats:
    token_length_ratio: float | None
    nbchars_ratio: float | None
    levenshtein_similarity: float | None
    wordrank_ratio: float | None = None
    deptree_depth_ratio: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def levenshtein_similarity(a: str, b: str) -> float:
    """100 * (1 - edit distance / longer length); two empty strings are identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 100.0
    return 100.0 * (1 - levenshtein(a, b) / longest)


def _content_words(sentences, parses, tok) -> list[str]:
    if parses is not None:
        return [t.surface.lower() for p in parses for t in p.tokens if t.upos in CONTENT_UPOS]
    return [w.lower() for s in sentences for w in tok(s)
            if not is_punct(w) and w.lower() not in FUNCTION_WORDS]


def _mean_log_rank(words: Sequence[str], table: FrequencyTable) -> float | None:
    if not words:
        return None
    return sum(math.log(table.rank(w)) for w in words) / len(words)


def instance_stats(si: SimplificationInstance, freq_table: FrequencyTable | None = None,
                   tokenizer: Callable[[str], list] = tokenize) -> InstanceStats:
    """Target/source ratios for one instance; fields needing a missing resource are None."""
    src, tgt = si.source_text, si.target_text
    s_tok = [t for t in tokenizer(src)]
    t_tok = [t for t in tokenizer(tgt)]
    tok_ratio = len(t_tok) / len(s_tok) if s_tok else None
    char_ratio = len(tgt) / len(src) if src else None
    lev = levenshtein_similarity(src, tgt)

    wordrank = None
    if freq_table is not None:
        a = _mean_log_rank(_content_words(si.source_sentences, si.source_parses, tokenizer), freq_table)
        b = _mean_log_rank(_content_words(si.target_sentences, si.target_parses, tokenizer), freq_table)
        if a and b is not None:
            wordrank = b / a

    depth = None
    if si.source_parses and si.target_parses:
        depth = max(p.depth() for p in si.target_parses) / max(p.depth() for p in si.source_parses)
    return InstanceStats(tok_ratio, char_ratio, lev, wordrank, depth)


def corpus_stats(instances: Iterable[SimplificationInstance], freq_table: FrequencyTable | None = None,
                 tokenizer: Callable[[str], list] = tokenize) -> dict:
    """Mean instance statistics plus unique/shared token counts."""
    instances = list(instances)
    src_vocab: set[str] = set()
    tgt_vocab: set[str] = set()
    columns: dict[str, list[float]] = {}
    for si in instances:
        src_vocab.update(tokenizer(si.source_text))
        tgt_vocab.update(tokenizer(si.target_text))
        for key, value in instance_stats(si, freq_table, tokenizer).as_dict().items():
            columns.setdefault(key, []).append(value)
    out = {
        "n_instances": len(instances),
        "unique_tokens_source": len(src_vocab),
        "unique_tokens_target": len(tgt_vocab),
        "shared_tokens": len(src_vocab & tgt_vocab),
    }
    for key in InstanceStats.__dataclass_fields__:
        values = columns.get(key)
        if values:
            out[key] = sum(values) / len(values)
    return out
