"""Loaders for corpora, CoNLL-U parses, paraphrase tables, labels, coreference and word ranks."""

from __future__ import annotations

import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, TextIO

from .core import OperationSet, ParsedSentence, ParseToken, SimplificationInstance, TaggedInstance

log = logging.getLogger(__name__)

DEFAULT_MAX_PHRASE_LEN = 4


class IngestError(ValueError):
    """Raised for malformed input resources."""


def _lines(stream: TextIO | Iterable[str]) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(stream, start=1):
        yield lineno, line.rstrip("\n").rstrip("\r")


def _json_records(stream, what: str) -> Iterator[tuple[int, dict]]:
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{what} line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise IngestError(f"{what} line {lineno}: expected a JSON object")
        yield lineno, rec


# ---------------------------------------------------------------------------
# corpus


def _str_list(value, lineno: int, name: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise IngestError(f"corpus line {lineno}: {name} must be a list of strings")
    return tuple(value)


def load_corpus(stream, filter_degenerate: bool = True) -> list[SimplificationInstance]:
    """Read one instance per JSONL line.

    With ``filter_degenerate`` set, complete deletions (M-to-0) and complete
    additions (0-to-N) are dropped.
    """
    out = []
    seen: set[str] = set()
    for lineno, rec in _json_records(stream, "corpus"):
        try:
            sid = rec["id"]
            src = _str_list(rec["source_sentences"], lineno, "source_sentences")
            tgt = _str_list(rec["target_sentences"], lineno, "target_sentences")
        except KeyError as exc:
            raise IngestError(f"corpus line {lineno}: missing field {exc.args[0]!r}") from None
        if not isinstance(sid, str) or not sid:
            raise IngestError(f"corpus line {lineno}: id must be a non-empty string")
        if sid in seen:
            raise IngestError(f"corpus line {lineno}: duplicate id {sid!r}")
        seen.add(sid)
        refs = rec.get("references")
        if refs is not None:
            if not isinstance(refs, list):
                raise IngestError(f"corpus line {lineno}: references must be a list of lists")
            refs = tuple(_str_list(r, lineno, "references[]") for r in refs)
        positions = {}
        for key in ("source_position", "target_position"):
            if rec.get(key) is not None:
                if not isinstance(rec[key], int):
                    raise IngestError(f"corpus line {lineno}: {key} must be an integer")
                positions[key] = rec[key]
        try:
            si = SimplificationInstance(
                id=sid,
                source_sentences=src,
                target_sentences=tgt,
                references=refs,
                doc_id=rec.get("doc_id"),
                **positions,
            )
        except ValueError as exc:
            raise IngestError(f"corpus line {lineno}: {exc}") from None
        if filter_degenerate and si.alignment.degenerate:
            continue
        out.append(si)
    return out


def corpus_record(si: SimplificationInstance) -> dict:
    rec = {
        "id": si.id,
        "source_sentences": list(si.source_sentences),
        "target_sentences": list(si.target_sentences),
    }
    if si.references is not None:
        rec["references"] = [list(r) for r in si.references]
    for key in ("doc_id", "source_position", "target_position"):
        if getattr(si, key) is not None:
            rec[key] = getattr(si, key)
    return rec


# ---------------------------------------------------------------------------
# CoNLL-U


def _parse_feats(col: str) -> dict[str, str]:
    if col == "_" or not col:
        return {}
    feats = {}
    for item in col.split("|"):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"malformed FEATS item {item!r}")
        feats[key] = value
    return feats


def _build_sentence(sent_id: str, rows: list[tuple[int, list[str]]]) -> ParsedSentence:
    if not rows:
        raise IngestError(f"sentence {sent_id!r}: no tokens")
    tokens = []
    n = len(rows)
    for lineno, cols in rows:
        try:
            index = int(cols[0])
        except ValueError:
            raise IngestError(f"sentence {sent_id!r} line {lineno}: bad token id {cols[0]!r}") from None
        try:
            head = int(cols[6])
        except ValueError:
            raise IngestError(f"sentence {sent_id!r} line {lineno}: non-integer head {cols[6]!r}") from None
        if head < 0 or head > n:
            raise IngestError(f"sentence {sent_id!r} line {lineno}: head {head} out of range")
        try:
            feats = _parse_feats(cols[5])
            tokens.append(ParseToken(index, cols[1], cols[2], cols[3], feats, head, cols[7]))
        except ValueError as exc:
            raise IngestError(f"sentence {sent_id!r} line {lineno}: {exc}") from None
    try:
        return ParsedSentence(sent_id, tokens)
    except ValueError as exc:
        raise IngestError(str(exc)) from None


def parse_conllu(stream) -> list[ParsedSentence]:
    """Parse CoNLL-U text; multiword ranges and empty nodes are skipped."""
    if isinstance(stream, str):
        stream = stream.splitlines()
    sentences = []
    rows: list[tuple[int, list[str]]] = []
    sent_id = None
    count = 0
    in_block = False

    def flush():
        nonlocal rows, sent_id, count, in_block
        if in_block:
            count += 1
            sentences.append(_build_sentence(sent_id or f"s{count}", rows))
        rows, sent_id, in_block = [], None, False

    for lineno, line in _lines(stream):
        if not line.strip():
            flush()
            continue
        in_block = True
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() == "sent_id":
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise IngestError(
                f"sentence {sent_id or f's{count + 1}'!r} line {lineno}: expected 10 columns, got {len(cols)}")
        if "-" in cols[0] or "." in cols[0]:
            continue
        rows.append((lineno, cols))
    flush()
    return sentences


def format_conllu(sentences: Iterable[ParsedSentence]) -> str:
    out = []
    for sent in sentences:
        out.append(f"# sent_id = {sent.id}")
        for tok in sent.tokens:
            feats = "|".join(f"{k}={v}" for k, v in sorted(tok.feats.items())) or "_"
            out.append("\t".join([str(tok.index), tok.surface, tok.lemma, tok.upos, "_",
                                  feats, str(tok.head), tok.deprel, "_", "_"]))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def load_parse_sidecars(paths: Iterable[str | os.PathLike]) -> dict[str, dict[str, dict[int, ParsedSentence]]]:
    """Index parses whose ids follow ``<si_id>:<source|target>:<k>`` (k 0-based)."""
    index: dict[str, dict[str, dict[int, ParsedSentence]]] = defaultdict(lambda: {"source": {}, "target": {}})
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        files.extend(sorted(p.glob("*.conllu")) if p.is_dir() else [p])
    for f in files:
        with open(f, encoding="utf-8") as fh:
            for sent in parse_conllu(fh):
                parts = sent.id.rsplit(":", 2)
                if len(parts) != 3 or parts[1] not in ("source", "target") or not parts[2].isdigit():
                    log.warning("skipping parse with unrecognised sent_id %r in %s", sent.id, f)
                    continue
                index[parts[0]][parts[1]][int(parts[2])] = sent
    return dict(index)


def attach_parses(instances: Iterable[SimplificationInstance], index) -> list[SimplificationInstance]:
    """Attach sidecar parses; a side gets parses only if every sentence has one."""
    out = []
    for si in instances:
        entry = index.get(si.id)
        if not entry:
            out.append(si)
            continue
        sides = {}
        for side, sents in (("source", si.source_sentences), ("target", si.target_sentences)):
            found = entry.get(side, {})
            if sents and all(k in found for k in range(len(sents))):
                sides[side] = tuple(found[k] for k in range(len(sents)))
            else:
                sides[side] = None
        out.append(si.with_parses(sides["source"], sides["target"]))
    return out


# ---------------------------------------------------------------------------
# paraphrase table


@dataclass(frozen=True)
class ParaphraseDB:
    rules: Mapping[str, frozenset[str]]
    max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN
    skipped: int = 0

    def lookup(self, phrase: str) -> frozenset[str]:
        return self.rules.get(" ".join(phrase.lower().split()), frozenset())

    def __len__(self):
        return len(self.rules)

    def __contains__(self, phrase):
        return " ".join(phrase.lower().split()) in self.rules


def load_paraphrase_db(stream, max_phrase_len: int = DEFAULT_MAX_PHRASE_LEN,
                       min_score: float | None = None) -> ParaphraseDB:
    """Read ``source<TAB>target[<TAB>score]`` lines into a lowercased rule table."""
    if max_phrase_len < 1:
        raise ValueError("max_phrase_len must be positive")
    rules: dict[str, set[str]] = defaultdict(set)
    skipped = 0
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            skipped += 1
            continue
        src = " ".join(cols[0].lower().split())
        tgt = " ".join(cols[1].lower().split())
        if not src or not tgt or src == tgt:
            skipped += 1
            continue
        if len(src.split()) > max_phrase_len:
            skipped += 1
            continue
        if min_score is not None:
            try:
                score = float(cols[2])
            except (IndexError, ValueError):
                skipped += 1
                continue
            if score < min_score:
                continue
        rules[src].add(tgt)
    if skipped:
        log.warning("paraphrase table: skipped %d malformed or over-long lines", skipped)
    return ParaphraseDB({k: frozenset(v) for k, v in rules.items()}, max_phrase_len, skipped)


# ---------------------------------------------------------------------------
# gold labels / tagged output


def load_gold_labels(stream) -> dict[str, OperationSet]:
    labels: dict[str, OperationSet] = {}
    for lineno, rec in _json_records(stream, "labels"):
        sid = rec.get("id")
        ops = rec.get("ops")
        if not isinstance(sid, str) or not isinstance(ops, list):
            raise IngestError(f"labels line {lineno}: need string 'id' and list 'ops'")
        if sid in labels:
            raise IngestError(f"labels line {lineno}: duplicate id {sid!r}")
        try:
            labels[sid] = OperationSet(ops)
        except (ValueError, TypeError) as exc:
            raise IngestError(f"labels line {lineno}: {exc}") from None
    return labels


def load_tagged(stream) -> list[TaggedInstance]:
    """Read tagger JSONL output back (instances are not restored)."""
    out = []
    for lineno, rec in _json_records(stream, "tagged"):
        try:
            out.append(TaggedInstance(None, OperationSet(rec["ops"]), rec.get("evidence", {}), id=rec["id"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise IngestError(f"tagged line {lineno}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# coreference


@dataclass(frozen=True)
class Mention:
    side: str
    sent: int
    start: int
    end: int  # inclusive
    is_pronoun: bool


@dataclass(frozen=True)
class CorefLayer:
    chains: tuple[tuple[Mention, ...], ...] = ()

    def validate(self, si: SimplificationInstance, tokenizer=None) -> None:
        """Check every mention span against the instance's tokens."""
        from .text import tokenize

        tok = tokenizer or tokenize
        for chain in self.chains:
            for m in chain:
                sents = si.source_sentences if m.side == "source" else si.target_sentences
                parses = si.source_parses if m.side == "source" else si.target_parses
                if m.sent >= len(sents):
                    raise IngestError(f"{si.id}: mention sentence {m.sent} out of range")
                n = len(parses[m.sent]) if parses else len(tok(sents[m.sent]))
                if m.end >= n:
                    raise IngestError(f"{si.id}: mention span {m.start}..{m.end} exceeds {n} tokens")


def load_coref(stream) -> dict[str, CorefLayer]:
    layers = {}
    for lineno, rec in _json_records(stream, "coref"):
        sid = rec.get("id")
        chains_raw = rec.get("chains", [])
        if not isinstance(sid, str) or not isinstance(chains_raw, list):
            raise IngestError(f"coref line {lineno}: need string 'id' and list 'chains'")
        chains = []
        for chain in chains_raw:
            if not isinstance(chain, list) or len(chain) < 2:
                raise IngestError(f"coref line {lineno}: chains need at least two mentions")
            mentions = []
            for m in chain:
                try:
                    side, sent, start, end = m["side"], int(m["sent"]), int(m["start"]), int(m["end"])
                    is_pron = bool(m.get("is_pronoun", False))
                except (KeyError, TypeError, ValueError):
                    raise IngestError(f"coref line {lineno}: malformed mention {m!r}") from None
                if side not in ("source", "target"):
                    raise IngestError(f"coref line {lineno}: side must be source or target")
                if sent < 0 or start < 0 or end < start:
                    raise IngestError(f"coref line {lineno}: bad span {start}..{end}")
                mentions.append(Mention(side, sent, start, end, is_pron))
            chains.append(tuple(mentions))
        if sid in layers:
            raise IngestError(f"coref line {lineno}: duplicate id {sid!r}")
        layers[sid] = CorefLayer(tuple(chains))
    return layers


# ---------------------------------------------------------------------------
# word frequency ranks


@dataclass(frozen=True)
class FrequencyTable:
    ranks: Mapping[str, int] = field(default_factory=dict)

    @cached_property
    def default_rank(self) -> int:
        return max(self.ranks.values(), default=0) + 1

    def rank(self, word: str) -> int:
        return self.ranks.get(word.lower(), self.default_rank)

    def __len__(self):
        return len(self.ranks)


def load_frequency_table(stream) -> FrequencyTable:
    """Accept ``word<TAB>rank`` pairs or a bare list ordered by frequency."""
    ranks: dict[str, int] = {}
    position = 0
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        position += 1
        cols = line.split("\t")
        word = cols[0].strip().lower()
        if len(cols) >= 2 and cols[1].strip():
            try:
                rank = int(cols[1])
            except ValueError:
                raise IngestError(f"frequency line {lineno}: rank {cols[1]!r} is not an integer") from None
        else:
            rank = position
        if rank <= 0:
            raise IngestError(f"frequency line {lineno}: rank must be positive")
        ranks.setdefault(word, rank)
    return FrequencyTable(ranks)
