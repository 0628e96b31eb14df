"""Shared domain types: operation tokens, alignment shapes, parses and instances."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np


class OperationToken(enum.Enum):
    """The nine operation tokens, declared in canonical emission order."""

    PROX = 0
    REPHRASE = 1
    DEL = 2
    ADD = 3
    EXAMPLE = 4
    EXPLAIN = 5
    EXPLICIT = 6
    REORDER = 7
    SPLIT = 8

    @property
    def surface(self) -> str:
        return f"<{self.name}>"

    @classmethod
    def from_name(cls, name: str) -> "OperationToken":
        key = name.strip()
        if key.startswith("<") and key.endswith(">"):
            key = key[1:-1]
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown operation token {name!r}") from None

    def __lt__(self, other):
        if not isinstance(other, OperationToken):
            return NotImplemented
        return self.value < other.value


ALL_OPS: tuple[OperationToken, ...] = tuple(OperationToken)
N_OPS = len(ALL_OPS)

_SURFACE_RE = re.compile(r"<([A-Za-z_]+)>")


def canonical_order(ops: Iterable[OperationToken]) -> list[OperationToken]:
    """Sort operation tokens into canonical (declaration) order, dropping duplicates."""
    return sorted(set(ops), key=lambda op: op.value)


class OperationSet(frozenset):
    """Immutable set of :class:`OperationToken` that always iterates in canonical order."""

    def __new__(cls, ops: Iterable[OperationToken | str] = ()):
        members = []
        for op in ops:
            if isinstance(op, str):
                op = OperationToken.from_name(op)
            elif not isinstance(op, OperationToken):
                raise TypeError(f"not an operation token: {op!r}")
            members.append(op)
        return super().__new__(cls, members)

    def __iter__(self):
        return iter(canonical_order(frozenset.__iter__(self)))

    def __repr__(self):
        return f"OperationSet({[op.name for op in self]})"

    def ordered(self) -> list[OperationToken]:
        return list(self)

    def names(self) -> list[str]:
        return [op.name for op in self]

    def serialize(self) -> str:
        """Space-joined surface form, e.g. ``"<REPHRASE> <DEL>"``."""
        return " ".join(op.surface for op in self)

    @classmethod
    def parse(cls, text: str) -> "OperationSet":
        parts = text.split()
        ops = []
        for part in parts:
            if not _SURFACE_RE.fullmatch(part):
                raise ValueError(f"malformed operation token {part!r}")
            ops.append(OperationToken.from_name(part))
        return cls(ops)

    def to_mask(self) -> np.ndarray:
        mask = np.zeros(N_OPS, dtype=np.int8)
        for op in self:
            mask[op.value] = 1
        return mask


class AlignmentKind(enum.Enum):
    ONE_TO_ONE = "1-1"
    ONE_TO_N = "1-N"
    M_TO_ONE = "M-1"
    M_TO_N = "M-N"
    M_TO_ZERO = "M-0"
    ZERO_TO_N = "0-N"


@dataclass(frozen=True)
class AlignmentType:
    """Sentence alignment shape of an instance; built from sentence counts."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("sentence counts must be non-negative")
        if self.m == 0 and self.n == 0:
            raise ValueError("an alignment needs at least one sentence on some side")

    @classmethod
    def from_counts(cls, m: int, n: int) -> "AlignmentType":
        return cls(m, n)

    @property
    def kind(self) -> AlignmentKind:
        m, n = self.m, self.n
        if n == 0:
            return AlignmentKind.M_TO_ZERO
        if m == 0:
            return AlignmentKind.ZERO_TO_N
        if m == 1:
            return AlignmentKind.ONE_TO_ONE if n == 1 else AlignmentKind.ONE_TO_N
        return AlignmentKind.M_TO_ONE if n == 1 else AlignmentKind.M_TO_N

    @property
    def degenerate(self) -> bool:
        return self.kind in (AlignmentKind.M_TO_ZERO, AlignmentKind.ZERO_TO_N)

    def __str__(self):
        return f"{self.kind.name}({self.m},{self.n})"


@dataclass(frozen=True)
class ParseToken:
    index: int
    surface: str
    lemma: str
    upos: str
    feats: Mapping[str, str]
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"token index must be 1-based, got {self.index}")
        if self.head < 0 or self.head == self.index:
            raise ValueError(f"token {self.index} has invalid head {self.head}")
        object.__setattr__(self, "feats", MappingProxyType(dict(self.feats)))

    @property
    def base_deprel(self) -> str:
        return self.deprel.split(":", 1)[0]

    def __reduce__(self):
        return (ParseToken, (self.index, self.surface, self.lemma, self.upos,
                             dict(self.feats), self.head, self.deprel))


@dataclass(frozen=True)
class ParsedSentence:
    id: str
    tokens: tuple[ParseToken, ...]

    def __post_init__(self):
        toks = tuple(self.tokens)
        object.__setattr__(self, "tokens", toks)
        if not toks:
            raise ValueError(f"sentence {self.id!r} has no tokens")
        for pos, tok in enumerate(toks, start=1):
            if tok.index != pos:
                raise ValueError(f"sentence {self.id!r}: token ids must run 1..n")
            if tok.head > len(toks):
                raise ValueError(f"sentence {self.id!r}: head {tok.head} out of range")
        roots = sum(1 for tok in toks if tok.head == 0)
        if roots != 1:
            raise ValueError(f"sentence {self.id!r} has {roots} roots, expected 1")

    def __len__(self):
        return len(self.tokens)

    def children(self, index: int) -> list[ParseToken]:
        return [tok for tok in self.tokens if tok.head == index]

    def depth(self) -> int:
        """Number of tokens on the longest root-to-leaf path (root alone = 1)."""
        depths: dict[int, int] = {}
        for tok in self.tokens:
            path: list[int] = []
            j = tok.index
            while j != 0 and j not in depths:
                if j in path:
                    raise ValueError(f"sentence {self.id!r} contains a cycle")
                path.append(j)
                j = self.tokens[j - 1].head
            level = depths.get(j, 0)
            for k in reversed(path):
                level += 1
                depths[k] = level
        return max(depths.values())


@dataclass(frozen=True)
class SimplificationInstance:
    """One aligned source to target unit.

    ``doc_id``/``source_position``/``target_position`` are optional document
    coordinates used for cross-instance sentence reordering.
    """

    id: str
    source_sentences: tuple[str, ...]
    target_sentences: tuple[str, ...]
    source_parses: tuple[ParsedSentence, ...] | None = None
    target_parses: tuple[ParsedSentence, ...] | None = None
    references: tuple[tuple[str, ...], ...] | None = None
    doc_id: str | None = None
    source_position: int | None = None
    target_position: int | None = None
    alignment: AlignmentType = field(init=False)

    def __post_init__(self):
        src = tuple(self.source_sentences)
        tgt = tuple(self.target_sentences)
        object.__setattr__(self, "source_sentences", src)
        object.__setattr__(self, "target_sentences", tgt)
        if not src and not tgt:
            raise ValueError(f"instance {self.id!r}: both sides are empty")
        for name, sents in (("source_parses", src), ("target_parses", tgt)):
            parses = getattr(self, name)
            if parses is not None:
                parses = tuple(parses)
                if len(parses) != len(sents):
                    raise ValueError(
                        f"instance {self.id!r}: {len(parses)} {name} for {len(sents)} sentences")
                object.__setattr__(self, name, parses)
        if self.references is not None:
            object.__setattr__(self, "references", tuple(tuple(r) for r in self.references))
        object.__setattr__(self, "alignment", AlignmentType.from_counts(len(src), len(tgt)))

    @property
    def source_text(self) -> str:
        return " ".join(self.source_sentences)

    @property
    def target_text(self) -> str:
        return " ".join(self.target_sentences)

    def with_target(self, target_sentences, target_parses=None) -> "SimplificationInstance":
        return SimplificationInstance(
            id=self.id,
            source_sentences=self.source_sentences,
            target_sentences=tuple(target_sentences),
            source_parses=self.source_parses,
            target_parses=target_parses,
            doc_id=self.doc_id,
            source_position=self.source_position,
            target_position=self.target_position,
        )

    def with_parses(self, source_parses=None, target_parses=None) -> "SimplificationInstance":
        return SimplificationInstance(
            id=self.id,
            source_sentences=self.source_sentences,
            target_sentences=self.target_sentences,
            source_parses=source_parses,
            target_parses=target_parses,
            references=self.references,
            doc_id=self.doc_id,
            source_position=self.source_position,
            target_position=self.target_position,
        )


@dataclass(frozen=True)
class TaggedInstance:
    """Tagger output. ``evidence`` may also hold notes for ops that did not fire."""

    instance: SimplificationInstance | None
    ops: OperationSet
    evidence: Mapping[OperationToken, tuple[str, ...]]
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ops", OperationSet(self.ops))
        ev = {OperationToken.from_name(k) if isinstance(k, str) else k: tuple(v)
              for k, v in self.evidence.items()}
        object.__setattr__(self, "evidence", MappingProxyType(dict(sorted(ev.items()))))
        if not self.id and self.instance is not None:
            object.__setattr__(self, "id", self.instance.id)
        missing = [op.name for op in self.ops if not self.evidence.get(op)]
        if missing:
            raise ValueError(f"ops without evidence: {missing}")

    def __reduce__(self):
        return (TaggedInstance, (self.instance, self.ops, dict(self.evidence), self.id))

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "ops": self.ops.names(),
            "evidence": {op.name: list(notes) for op, notes in self.evidence.items()},
        }


@dataclass(frozen=True, eq=False)
class OperationProfile:
    subset_name: str
    n_instances: int
    freqs: Mapping[OperationToken, float]
    corr: np.ndarray
    degenerate_ops: frozenset[OperationToken]
    histogram: Mapping[int, int] = field(default_factory=dict)

    def freq_vector(self) -> np.ndarray:
        return np.array([self.freqs[op] for op in ALL_OPS], dtype=float)
