"""Rule-based assignment of operation tokens to simplification instances.

Every detector is precision oriented: rules that need a dependency parse
are skipped (and say so in the evidence) rather than guessed.
"""

from __future__ import annotations

import logging
from bisect import bisect_left
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import (
    AlignmentKind,
    OperationSet,
    OperationToken as Op,
    ParseToken,
    SimplificationInstance,
    TaggedInstance,
)
from .ingest import DEFAULT_MAX_PHRASE_LEN, CorefLayer, ParaphraseDB
from .text import (
    CONTENT_UPOS,
    EXCLUDED_UPOS,
    FUNCTION_WORDS,
    NOMINAL_UPOS,
    PERSONAL_PRONOUN_PERSON,
    THIRD_PERSON_PRONOUNS,
    is_punct,
    tokenize,
)

log = logging.getLogger(__name__)

SKIPPED_NO_PARSES = "skipped: no parses"

DEFAULT_EXAMPLE_CUES = ("for example", "e.g.", "such as", "for instance", "like")

CLAUSE_DEPRELS = frozenset({"conj", "advcl", "ccomp", "xcomp", "acl", "parataxis"})
PERSON_SHIFTS = frozenset({("3", "2"), ("3", "1"), ("2", "1")})
PASSIVE_DEPRELS = frozenset({"nsubj:pass", "aux:pass", "csubj:pass"})
CLAUSE_END = frozenset({".", ";", ":", "!", "?"})
EXPLAIN_WINDOW = 2


class TaggerError(ValueError):
    pass


@dataclass(frozen=True)
class TaggerConfig:
    del_ratio_threshold: float = 1.2
    del_pct_threshold: float = 0.30
    add_ratio_threshold: float = 1.0
    clause_match_jaccard: float = 0.3
    max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN

    def __post_init__(self):
        for name in ("del_ratio_threshold", "add_ratio_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("del_pct_threshold", "clause_match_jaccard"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.max_phrase_len < 1:
            raise ValueError("max_phrase_len must be positive")


@dataclass(frozen=True)
class TaggerResources:
    paraphrase_db: ParaphraseDB
    coref: Mapping[str, CorefLayer] | None = None
    example_cues: tuple[str, ...] = DEFAULT_EXAMPLE_CUES
    config: TaggerConfig = field(default_factory=TaggerConfig)

    def __post_init__(self):
        cues = tuple(c for c in self.example_cues if c.strip())
        if not cues:
            raise ValueError("example_cues must not be empty")
        object.__setattr__(self, "example_cues", cues)


@dataclass(frozen=True)
class Finding:
    """Outcome of one detector."""

    fired: bool
    evidence: tuple[str, ...] = ()
    skipped: bool = False
    kind: str | None = None


@dataclass(frozen=True)
class Consumed:
    """Token positions already explained by a rephrase or proximation match."""

    source: frozenset[int] = frozenset()
    target: frozenset[int] = frozenset()

    def __or__(self, other: "Consumed") -> "Consumed":
        return Consumed(self.source | other.source, self.target | other.target)


@dataclass(frozen=True)
class RephraseMatch:
    source_span: tuple[int, int]  # half-open token positions
    target_span: tuple[int, int]
    source_phrase: str
    target_phrase: str


# ---------------------------------------------------------------------------
# flattened view of one side


class _Side:
    """Tokens of all sentences of one side, with parse links when available."""

    __slots__ = ("surface", "lower", "ptok", "sent_of", "offsets", "has_parse", "lower_set")

    def __init__(self, sentences: Sequence[str], parses):
        self.surface: list[str] = []
        self.ptok: list[ParseToken | None] = []
        self.sent_of: list[int] = []
        self.offsets: list[int] = []
        self.has_parse = parses is not None
        if parses is not None:
            for k, sent in enumerate(parses):
                self.offsets.append(len(self.surface))
                for tok in sent.tokens:
                    self.surface.append(tok.surface)
                    self.ptok.append(tok)
                    self.sent_of.append(k)
        else:
            for k, sent in enumerate(sentences):
                self.offsets.append(len(self.surface))
                for tok in tokenize(sent):
                    self.surface.append(tok)
                    self.ptok.append(None)
                    self.sent_of.append(k)
        self.lower = [s.lower() for s in self.surface]
        self.lower_set = frozenset(w for w in self.lower if not is_punct(w))

    def __len__(self):
        return len(self.surface)

    def head(self, i: int) -> int | None:
        tok = self.ptok[i]
        if tok is None or tok.head == 0:
            return None
        return self.offsets[self.sent_of[i]] + tok.head - 1

    def children(self, i: int) -> list[int]:
        tok = self.ptok[i]
        off = self.offsets[self.sent_of[i]]
        out = []
        j = off
        while j < len(self.ptok) and self.sent_of[j] == self.sent_of[i]:
            if self.ptok[j].head == tok.index:
                out.append(j)
            j += 1
        return out

    def upos(self, i: int) -> str | None:
        tok = self.ptok[i]
        return tok.upos if tok is not None else None

    def lemma(self, i: int) -> str:
        tok = self.ptok[i]
        return (tok.lemma if tok is not None and tok.lemma != "_" else self.surface[i]).lower()

    def word_positions(self) -> list[int]:
        return [i for i, w in enumerate(self.lower) if not is_punct(w)]


class _Pair:
    __slots__ = ("si", "src", "tgt")

    def __init__(self, si: SimplificationInstance):
        self.si = si
        self.src = _Side(si.source_sentences, si.source_parses)
        self.tgt = _Side(si.target_sentences, si.target_parses)

    @property
    def parsed(self) -> bool:
        return self.src.has_parse and self.tgt.has_parse


def _pair(si) -> _Pair:
    return si if isinstance(si, _Pair) else _Pair(si)


# ---------------------------------------------------------------------------
# ratio


def _ws_count(sentences: Iterable[str]) -> int:
    return sum(len(s.split()) for s in sentences)


def token_length_ratio(si: SimplificationInstance) -> float:
    """|S| / |T| over whitespace tokens of all sentences of each side."""
    si = si.si if isinstance(si, _Pair) else si
    s, t = _ws_count(si.source_sentences), _ws_count(si.target_sentences)
    if s == 0 or t == 0:
        raise TaggerError(f"instance {si.id!r}: token length ratio needs two non-empty sides")
    return s / t


# ---------------------------------------------------------------------------
# proximation


def _persons(side: _Side) -> set[str]:
    return {tok.feats["Person"] for tok in side.ptok
            if tok.upos in ("PRON", "VERB", "AUX") and tok.feats.get("Person") in ("1", "2", "3")}


def _effective_tense(side: _Side, i: int) -> str | None:
    tok = side.ptok[i]
    if tok.feats.get("VerbForm", "Fin") == "Fin" and "Tense" in tok.feats:
        return tok.feats["Tense"]
    for c in side.children(i):
        ctok = side.ptok[c]
        if ctok.base_deprel == "aux" and ctok.feats.get("VerbForm", "Fin") == "Fin" and "Tense" in ctok.feats:
            return ctok.feats["Tense"]
    return None


def _is_passive(side: _Side, i: int) -> bool:
    if side.ptok[i].feats.get("Voice") == "Pass":
        return True
    return any(side.ptok[c].deprel in PASSIVE_DEPRELS for c in side.children(i))


def _verbs_by_lemma(side: _Side) -> dict[str, list[int]]:
    out: dict[str, list[int]] = defaultdict(list)
    for i, tok in enumerate(side.ptok):
        if tok.upos == "VERB":
            out[side.lemma(i)].append(i)
    return out


def _passive_span(side: _Side, i: int) -> set[int]:
    span = {i}
    for c in side.children(i):
        ctok = side.ptok[c]
        if ctok.deprel == "aux:pass":
            span.add(c)
        elif ctok.deprel == "obl:agent":
            span.update(g for g in side.children(c) if side.ptok[g].base_deprel == "case")
    return span


def _voice_matches(pair: _Pair) -> tuple[list[str], Consumed]:
    src, tgt = pair.src, pair.tgt
    tgt_verbs = _verbs_by_lemma(tgt)
    used: set[int] = set()
    notes: list[str] = []
    cs: set[int] = set()
    ct: set[int] = set()
    for i, tok in enumerate(src.ptok):
        if tok.upos not in ("VERB", "AUX") or not _is_passive(src, i):
            continue
        for j in tgt_verbs.get(src.lemma(i), ()):
            if j not in used and not _is_passive(tgt, j):
                used.add(j)
                cs |= _passive_span(src, i)
                ct.add(j)
                notes.append(f"passive {src.surface[i]!r} -> active {tgt.surface[j]!r} (lemma {src.lemma(i)})")
                break
    return notes, Consumed(frozenset(cs), frozenset(ct))


def _person_shift(pair: _Pair) -> str | None:
    sp, tp = _persons(pair.src), _persons(pair.tgt)
    for a, b in sorted(PERSON_SHIFTS):
        if a in sp - tp and b in tp - sp:
            return f"person shift {a}->{b}"
    if not {"1", "2"} & sp and {"1", "2"} & tp:
        return f"person shift: target introduces person {min({'1', '2'} & tp)}"
    return None


def _prox(pair: _Pair) -> tuple[Finding, Consumed]:
    if not pair.parsed:
        return Finding(False, (SKIPPED_NO_PARSES,), skipped=True), Consumed()
    notes: list[str] = []
    cs: set[int] = set()
    ct: set[int] = set()
    shift = _person_shift(pair)
    if shift:
        notes.append(shift)

    sv, tv = _verbs_by_lemma(pair.src), _verbs_by_lemma(pair.tgt)
    for lemma in sorted(sv.keys() & tv.keys()):
        for i, j in zip(sv[lemma], tv[lemma]):
            a, b = _effective_tense(pair.src, i), _effective_tense(pair.tgt, j)
            if a is not None and b is not None and a != b:
                notes.append(f"tense {a}->{b} on {lemma!r}")
                cs.add(i)
                ct.add(j)
            elif shift and pair.src.ptok[i].feats.get("Person") != pair.tgt.ptok[j].feats.get("Person"):
                cs.add(i)
                ct.add(j)

    voice_notes, voice = _voice_matches(pair)
    notes.extend(voice_notes)
    return Finding(bool(notes), tuple(notes)), voice | Consumed(frozenset(cs), frozenset(ct))


def detect_prox(si: SimplificationInstance) -> Finding:
    """Person-of-view shift, verb tense change, or passive to active conversion."""
    return _prox(_pair(si))[0]


# ---------------------------------------------------------------------------
# rephrasing


def _find_subsequence(hay: list[str], index: Mapping[str, list[int]], needle: list[str]) -> int:
    k = len(needle)
    for j in index.get(needle[0], ()):
        if hay[j:j + k] == needle:
            return j
    return -1


def _rephrase(pair: _Pair, db: ParaphraseDB, max_phrase_len: int) -> list[RephraseMatch]:
    src, tgt = pair.src.lower, pair.tgt.lower
    tset = set(tgt)
    first: dict[str, list[int]] = defaultdict(list)
    for j, w in enumerate(tgt):
        first[w].append(j)
    rules = db.rules
    limit = min(max_phrase_len, db.max_phrase_len)
    matches = []
    for i in range(len(src)):
        for length in range(1, limit + 1):
            if i + length > len(src):
                break
            words = src[i:i + length]
            if length == 1:
                if words[0] in tset or is_punct(words[0]):
                    continue
            elif all(w in tset for w in words):
                continue
            phrase = " ".join(words)
            paras = rules.get(phrase)
            if not paras:
                continue
            for para in sorted(paras):
                needle = para.split()
                j = _find_subsequence(tgt, first, needle)
                if j >= 0:
                    matches.append(RephraseMatch((i, i + length), (j, j + len(needle)), phrase, para))
    return matches


def detect_rephrase(si: SimplificationInstance, db: ParaphraseDB,
                    max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN) -> tuple[Finding, list[RephraseMatch]]:
    """Source words/phrases missing from the target whose paraphrase appears in it."""
    matches = _rephrase(_pair(si), db, max_phrase_len)
    notes = tuple(f"{m.source_phrase!r} -> {m.target_phrase!r}" for m in matches)
    return Finding(bool(matches), notes), matches


def _consumed_by(matches: Iterable[RephraseMatch]) -> Consumed:
    cs: set[int] = set()
    ct: set[int] = set()
    for m in matches:
        cs.update(range(*m.source_span))
        ct.update(range(*m.target_span))
    return Consumed(frozenset(cs), frozenset(ct))


# ---------------------------------------------------------------------------
# deletion


def _deletion(pair: _Pair, consumed: Consumed, config: TaggerConfig) -> Finding:
    ratio = token_length_ratio(pair.si)
    words = pair.src.word_positions()
    tset = pair.tgt.lower_set
    deleted = [i for i in words if pair.src.lower[i] not in tset and i not in consumed.source]
    pct = len(deleted) / len(words) if words else 0.0
    kind = {
        AlignmentKind.M_TO_ZERO: "Removal",
        AlignmentKind.M_TO_ONE: "Summarization",
    }.get(pair.si.alignment.kind, "Unspecified")
    if ratio >= config.del_ratio_threshold:
        return Finding(True, (f"token length ratio {ratio:.3f} >= {config.del_ratio_threshold}",), kind=kind)
    if pct > config.del_pct_threshold and ratio > 1:
        return Finding(True, (f"deleted {pct:.1%} of source words with ratio {ratio:.3f} > 1",), kind=kind)
    return Finding(False, kind=kind)


def detect_deletion(si: SimplificationInstance, consumed: Consumed = Consumed(),
                    config: TaggerConfig = TaggerConfig()) -> Finding:
    """Token-length-ratio rule, or deleted-word share rule; ``kind`` follows the alignment."""
    return _deletion(_pair(si), consumed, config)


# ---------------------------------------------------------------------------
# additions


def _new_word_positions(pair: _Pair, consumed: Consumed) -> list[int]:
    tgt = pair.tgt
    sset = pair.src.lower_set
    out = []
    for j, w in enumerate(tgt.lower):
        if is_punct(w) or w in sset or j in consumed.target:
            continue
        if tgt.has_parse:
            if tgt.ptok[j].upos in EXCLUDED_UPOS:
                continue
        elif w in FUNCTION_WORDS:
            continue
        out.append(j)
    return out


def new_content_words(si: SimplificationInstance, consumed: Consumed = Consumed()) -> set[str]:
    """Lowercased target content words absent from the source and not already explained."""
    pair = _pair(si)
    return {pair.tgt.lower[j] for j in _new_word_positions(pair, consumed)}


def _cue_spans(tgt: _Side, cues: Sequence[str]) -> list[tuple[str, int, int]]:
    spans = []
    for cue in cues:
        needle = [w.lower() for w in tokenize(cue)]
        k = len(needle)
        for j in range(len(tgt) - k + 1):
            if tgt.lower[j:j + k] != needle:
                continue
            if k == 1 and tgt.has_parse and tgt.ptok[j].upos == "VERB":
                continue
            end = j + k
            while end < len(tgt) and tgt.sent_of[end] == tgt.sent_of[j] and tgt.lower[end] not in CLAUSE_END:
                end += 1
            spans.append((cue, j, end))  # cue words belong to the example
    return spans


def _anchored_noun(pair: _Pair, j: int, src_lemmas: set[str]) -> int | None:
    tgt = pair.tgt
    sset = pair.src.lower_set
    k = tgt.head(j)
    while k is not None and tgt.lower[k] not in sset:
        k = tgt.head(k)
    if k is not None and tgt.ptok[k].upos in NOMINAL_UPOS and tgt.lemma(k) in src_lemmas:
        return k
    for m in range(max(0, j - EXPLAIN_WINDOW), min(len(tgt), j + EXPLAIN_WINDOW + 1)):
        if m == j or tgt.sent_of[m] != tgt.sent_of[j]:
            continue
        if tgt.ptok[m].upos in NOMINAL_UPOS and tgt.lemma(m) in src_lemmas:
            return m
    return None


def _addition(pair: _Pair, consumed: Consumed, cues: Sequence[str],
              config: TaggerConfig) -> dict[Op, tuple[str, ...]]:
    new = _new_word_positions(pair, consumed)
    if not new:
        return {}
    tgt = pair.tgt
    out: dict[Op, tuple[str, ...]] = {}
    classified: set[int] = set()

    example_notes = []
    for cue, start, end in _cue_spans(tgt, cues):
        inside = [j for j in new if start <= j < end]
        if inside:
            classified.update(inside)
            example_notes.append(f"cue {cue!r} introduces {[tgt.surface[j] for j in inside]}")
    if example_notes:
        out[Op.EXAMPLE] = tuple(example_notes)

    if tgt.has_parse:
        src = pair.src
        src_lemmas = {src.lemma(i) for i in range(len(src))} if src.has_parse else set(src.lower)
        explain_notes = []
        for j in new:
            if j in classified:
                continue
            anchor = _anchored_noun(pair, j, src_lemmas)
            if anchor is not None:
                classified.add(j)
                explain_notes.append(f"{tgt.surface[j]!r} tied to source noun {tgt.surface[anchor]!r}")
        if explain_notes:
            out[Op.EXPLAIN] = tuple(explain_notes)
    else:
        out[Op.EXPLAIN] = (SKIPPED_NO_PARSES,)

    remaining = [j for j in new if j not in classified]
    if remaining:
        ratio = token_length_ratio(pair.si)
        if ratio < config.add_ratio_threshold:
            out[Op.ADD] = (f"new words {[tgt.surface[j] for j in remaining]} with ratio {ratio:.3f} "
                           f"< {config.add_ratio_threshold}",)
    return out


def detect_addition(si: SimplificationInstance, consumed: Consumed = Consumed(),
                    cues: Sequence[str] = DEFAULT_EXAMPLE_CUES,
                    config: TaggerConfig = TaggerConfig()) -> dict[Op, tuple[str, ...]]:
    """Classify new target words as EXAMPLE, EXPLAIN, or (when unexplained) ADD.

    The returned map may carry a skip note under EXPLAIN without it firing;
    use :func:`fired_ops` to keep only real firings.
    """
    return _addition(_pair(si), consumed, cues, config)


def fired_ops(evidence: Mapping[Op, Sequence[str]]) -> set[Op]:
    return {op for op, notes in evidence.items() if notes and tuple(notes) != (SKIPPED_NO_PARSES,)}


# ---------------------------------------------------------------------------
# pronoun explicitation


def _third_person_count(side: _Side) -> int:
    if side.has_parse:
        return sum(1 for t in side.ptok
                   if t.upos == "PRON" and t.feats.get("Person") == "3"
                   and t.feats.get("PronType", "Prs") == "Prs")
    return sum(1 for w in side.lower if w in THIRD_PERSON_PRONOUNS)


def _noun_counts(side: _Side) -> Counter:
    if side.has_parse:
        return Counter(side.lemma(i) for i, t in enumerate(side.ptok) if t.upos in NOMINAL_UPOS)
    return Counter(
        w.lower() for w in side.surface
        if w[:1].isupper() and w.isalpha() and w.lower() not in FUNCTION_WORDS
        and w.lower() not in PERSONAL_PRONOUN_PERSON
    )


def _explicit(pair: _Pair, layer: CorefLayer | None) -> Finding:
    if layer is not None:
        for n, chain in enumerate(layer.chains):
            pron = [m for m in chain if m.side == "source" and m.is_pronoun]
            named = [m for m in chain if m.side == "target" and not m.is_pronoun]
            if pron and named:
                return Finding(True, (f"coref chain {n}: source pronoun resolved by target mention "
                                      f"(sent {named[0].sent}, tokens {named[0].start}..{named[0].end})",))
        return Finding(False)
    sp, tp = _third_person_count(pair.src), _third_person_count(pair.tgt)
    if sp <= tp:
        return Finding(False)
    sn, tn = _noun_counts(pair.src), _noun_counts(pair.tgt)
    grown = sorted(w for w, c in tn.items() if c > sn.get(w, 0))
    if grown:
        return Finding(True, (f"3rd-person pronouns {sp}->{tp}; noun {grown[0]!r} {sn.get(grown[0], 0)}->"
                              f"{tn[grown[0]]}",))
    return Finding(False)


def detect_explicit(si: SimplificationInstance, coref: CorefLayer | None = None) -> Finding:
    """Pronoun explicitation from a coreference layer, or a count-based fallback without one."""
    return _explicit(_pair(si), coref)


# ---------------------------------------------------------------------------
# reordering


def longest_increasing_subsequence(seq: Sequence) -> list[int]:
    """0-based positions of the lexicographically smallest strictly increasing
    subsequence of maximum length."""
    n = len(seq)
    # starting_len[i]: length of the longest increasing subsequence starting at i
    starting_len = [0] * n
    tails: list = []
    for i in range(n - 1, -1, -1):
        key = -seq[i]
        k = bisect_left(tails, key)
        if k == len(tails):
            tails.append(key)
        else:
            tails[k] = key
        starting_len[i] = k + 1
    need = len(tails)
    picked: list[int] = []
    last = None
    for i in range(n):
        if need == 0:
            break
        if starting_len[i] == need and (last is None or seq[i] > last):
            picked.append(i)
            last = seq[i]
            need -= 1
    return picked


def detect_sentence_reorder(permutation: Sequence[int]) -> set[int]:
    """1-based positions of ``permutation`` lying outside its canonical LIS."""
    n = len(permutation)
    if sorted(permutation) != list(range(1, n + 1)):
        raise TaggerError(f"not a permutation of 1..{n}: {list(permutation)}")
    keep = set(longest_increasing_subsequence(permutation))
    return {i + 1 for i in range(n) if i not in keep}


def _clauses(side: _Side) -> list[tuple[int, frozenset[str]]]:
    heads = []
    for i, tok in enumerate(side.ptok):
        if tok.head == 0:
            heads.append(i)
        elif tok.base_deprel in CLAUSE_DEPRELS:
            if tok.upos in ("VERB", "AUX") or any(
                    side.ptok[c].base_deprel in ("nsubj", "csubj", "cop") for c in side.children(i)):
                heads.append(i)
    head_set = set(heads)
    content: dict[int, set[str]] = {h: set() for h in heads}
    for i, tok in enumerate(side.ptok):
        k = i
        while k not in head_set:
            k = side.head(k)
        if tok.upos in CONTENT_UPOS:
            content[k].add(side.lemma(i))
    return [(h, frozenset(content[h])) for h in heads]


def _jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def _clause_reorder(pair: _Pair, threshold: float) -> str | None:
    sc, tc = _clauses(pair.src), _clauses(pair.tgt)
    scored = []
    for si_, (_, a) in enumerate(sc):
        for ti, (_, b) in enumerate(tc):
            j = _jaccard(a, b)
            if j >= threshold:
                scored.append((-j, si_, ti))
    scored.sort()
    used_s: set[int] = set()
    used_t: set[int] = set()
    matched = []
    for _, si_, ti in scored:
        if si_ not in used_s and ti not in used_t:
            used_s.add(si_)
            used_t.add(ti)
            matched.append((ti, si_))
    if len(matched) < 2:
        return None
    matched.sort()
    order = [si_ for _, si_ in matched]
    ranks = [sorted(order).index(x) + 1 for x in order]
    moved = detect_sentence_reorder(ranks)
    if not moved:
        return None
    heads = [pair.src.surface[sc[si_][0]] for si_ in order]
    return f"clause order changed: source clauses headed by {heads} in target order (LIS {len(order) - len(moved)}/{len(order)})"


def _svo_positions(side: _Side, v: int) -> dict[str, int]:
    roles = {"V": v}
    for c in side.children(v):
        rel = side.ptok[c].deprel
        if rel == "nsubj" and "S" not in roles:
            roles["S"] = c
        elif rel == "obj" and "O" not in roles:
            roles["O"] = c
    return roles


def _svo_reorder(pair: _Pair) -> str | None:
    sv, tv = _verbs_by_lemma(pair.src), _verbs_by_lemma(pair.tgt)
    for lemma in sorted(sv.keys() & tv.keys()):
        for i, j in zip(sv[lemma], tv[lemma]):
            a, b = _svo_positions(pair.src, i), _svo_positions(pair.tgt, j)
            common = a.keys() & b.keys()
            if len(common) < 2:
                continue
            sa = "".join(sorted(common, key=a.get))
            sb = "".join(sorted(common, key=b.get))
            if sa != sb:
                return f"{lemma!r}: {sa} order became {sb}"
    return None


def _intra_reorder(pair: _Pair, config: TaggerConfig) -> Finding:
    if not pair.parsed:
        return Finding(False, (SKIPPED_NO_PARSES,), skipped=True)
    notes = [n for n in (_clause_reorder(pair, config.clause_match_jaccard), _svo_reorder(pair)) if n]
    return Finding(bool(notes), tuple(notes))


def detect_intra_reorder(si: SimplificationInstance, config: TaggerConfig = TaggerConfig()) -> Finding:
    """Clause order or subject/verb/object order changed between source and target."""
    return _intra_reorder(_pair(si), config)


def detect_split(si: SimplificationInstance) -> Finding:
    a = si.alignment
    if a.kind is AlignmentKind.ONE_TO_N:
        return Finding(True, (f"alignment 1-to-{a.n}",))
    return Finding(False)


# ---------------------------------------------------------------------------
# driver


def _degenerate(si: SimplificationInstance) -> TaggedInstance | None:
    kind = si.alignment.kind
    if kind is AlignmentKind.M_TO_ZERO or not _ws_count(si.target_sentences):
        return TaggedInstance(si, OperationSet([Op.DEL]), {Op.DEL: ("Removal: no target sentences",)})
    if kind is AlignmentKind.ZERO_TO_N or not _ws_count(si.source_sentences):
        return TaggedInstance(si, OperationSet([Op.ADD]), {Op.ADD: ("no source sentences",)})
    return None


def tag(si: SimplificationInstance, resources: TaggerResources) -> TaggedInstance:
    degenerate = _degenerate(si)
    if degenerate is not None:
        return degenerate
    cfg = resources.config
    pair = _Pair(si)
    evidence: dict[Op, tuple[str, ...]] = {}

    prox, voice_consumed = _prox(pair)
    if prox.evidence:
        evidence[Op.PROX] = prox.evidence

    matches = _rephrase(pair, resources.paraphrase_db, cfg.max_phrase_len)
    if matches:
        evidence[Op.REPHRASE] = tuple(f"{m.source_phrase!r} -> {m.target_phrase!r}" for m in matches)
    consumed = _consumed_by(matches) | voice_consumed

    deletion = _deletion(pair, consumed, cfg)
    if deletion.fired:
        evidence[Op.DEL] = tuple(f"{deletion.kind}: {n}" for n in deletion.evidence)

    evidence.update(_addition(pair, consumed, resources.example_cues, cfg))

    layer = resources.coref.get(si.id) if resources.coref is not None else None
    explicit = _explicit(pair, layer)
    if explicit.fired:
        evidence[Op.EXPLICIT] = explicit.evidence

    reorder = _intra_reorder(pair, cfg)
    if reorder.evidence:
        evidence[Op.REORDER] = reorder.evidence

    split = detect_split(si)
    if split.fired:
        evidence[Op.SPLIT] = split.evidence

    return TaggedInstance(si, OperationSet(fired_ops(evidence)), evidence)


def tag_multi_reference(si: SimplificationInstance, resources: TaggerResources,
                        threshold: float = 0.5) -> OperationSet:
    """Keep an op only if it fires for strictly more than ``threshold`` of the references."""
    refs = si.references
    if not refs:
        raise TaggerError(f"instance {si.id!r} has no references")
    counts: Counter = Counter()
    for ref in refs:
        counts.update(tag(si.with_target(ref), resources).ops)
    k = len(refs)
    return OperationSet(op for op, c in counts.items() if c > threshold * k)


def apply_document_reorder(tagged: Sequence[TaggedInstance]) -> list[TaggedInstance]:
    """Mark instances whose sentences moved relative to their document's order."""
    groups: dict[str, list[int]] = defaultdict(list)
    for n, t in enumerate(tagged):
        si = t.instance
        if si is not None and si.doc_id is not None and si.source_position is not None \
                and si.target_position is not None:
            groups[si.doc_id].append(n)
    out = list(tagged)
    for doc, members in sorted(groups.items()):
        members.sort(key=lambda n: (tagged[n].instance.target_position, tagged[n].instance.source_position))
        src_pos = [tagged[n].instance.source_position for n in members]
        order = sorted(range(len(src_pos)), key=lambda k: (src_pos[k], k))
        perm = [0] * len(src_pos)
        for rank, k in enumerate(order, start=1):
            perm[k] = rank
        for pos in detect_sentence_reorder(perm):
            n = members[pos - 1]
            t = out[n]
            ev = dict(t.evidence)
            note = f"sentence moved in document {doc!r} (source position {src_pos[pos - 1]})"
            ev[Op.REORDER] = tuple(x for x in ev.get(Op.REORDER, ()) if x != SKIPPED_NO_PARSES) + (note,)
            out[n] = TaggedInstance(t.instance, OperationSet(set(t.ops) | {Op.REORDER}), ev)
    return out


_WORKER_RESOURCES: TaggerResources | None = None


def _init_worker(resources: TaggerResources) -> None:
    global _WORKER_RESOURCES
    _WORKER_RESOURCES = resources


def _tag_in_worker(si: SimplificationInstance) -> TaggedInstance:
    return tag(si, _WORKER_RESOURCES)


def tag_corpus(instances: Sequence[SimplificationInstance], resources: TaggerResources,
               threads: int = 1) -> list[TaggedInstance]:
    """Tag every instance, apply document-level reordering, and sort by id."""
    if threads > 1 and len(instances) > 1:
        chunk = max(1, len(instances) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                 initargs=(resources,)) as pool:
            tagged = list(pool.map(_tag_in_worker, instances, chunksize=chunk))
    else:
        tagged = [tag(si, resources) for si in instances]
    tagged = apply_document_reorder(tagged)
    return sorted(tagged, key=lambda t: t.id)
