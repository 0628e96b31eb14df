"""Tokenization and closed word lists used when no parse is available."""

from __future__ import annotations

import importlib
import re
from typing import Callable

# abbreviations like "e.g." stay whole; contractions stay attached ("we're")
_TOKEN_RE = re.compile(
    r"[A-Za-z](?:\.[A-Za-z])+\.?"
    r"|\w+(?:['’]\w+)*"
    r"|[^\w\s]",
    re.UNICODE,
)
_WORD_RE = re.compile(r"\w", re.UNICODE)

Tokenizer = Callable[[str], list]


def tokenize(text: str) -> list[str]:
    """Split on whitespace and separate punctuation; case is preserved."""
    return _TOKEN_RE.findall(text)


def whitespace_tokenize(text: str) -> list[str]:
    return text.split()


def is_punct(token: str) -> bool:
    return _WORD_RE.search(token) is None


def normalize_ws(text: str) -> str:
    return " ".join(text.split())


def resolve_tokenizer(spec: str | None) -> Tokenizer:
    """Resolve ``default``, ``whitespace`` or a ``module:function`` import path."""
    if spec in (None, "", "default", "regex"):
        return tokenize
    if spec == "whitespace":
        return whitespace_tokenize
    module_name, sep, attr = spec.partition(":")
    if not sep:
        raise ValueError(f"tokenizer must be 'default', 'whitespace' or module:function, got {spec!r}")
    func = getattr(importlib.import_module(module_name), attr)
    if not callable(func):
        raise ValueError(f"{spec!r} is not callable")
    return func


EXCLUDED_UPOS = frozenset({"DET", "ADP", "AUX", "CCONJ", "SCONJ", "PART", "PRON", "PUNCT"})
CONTENT_UPOS = frozenset({"NOUN", "PROPN", "VERB", "ADJ", "ADV", "NUM"})
NOMINAL_UPOS = frozenset({"NOUN", "PROPN"})

# surface fallback for EXCLUDED_UPOS when a side has no parse
FUNCTION_WORDS = frozenset("""
a an the this that these those some any each every no all both either neither
of in on at by for with about against between into through during before after
above below to from up down out off over under again further than as via per
upon within without along across behind beyond among around toward towards
am is are was were be been being have has had having do does did doing
will would shall should can could may might must ought
and but or nor so yet if because while although though unless until since whether
not n't to 's '
i me my mine myself we us our ours ourselves you your yours yourself yourselves
he him his himself she her hers herself it its itself they them their theirs themselves
who whom whose which what that there here
""".split())

THIRD_PERSON_PRONOUNS = frozenset("""
he him his himself she her hers herself it its itself they them their theirs themselves
""".split())

PERSONAL_PRONOUN_PERSON = {
    **{w: "1" for w in "i me my mine myself we us our ours ourselves".split()},
    **{w: "2" for w in "you your yours yourself yourselves".split()},
    **{w: "3" for w in THIRD_PERSON_PRONOUNS},
}
