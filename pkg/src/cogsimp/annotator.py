"""Training-format emission: operation tokens bound to a mask (T5) or prepended (BART)."""

from __future__ import annotations

import enum
import re

from .core import OperationSet, OperationToken, SimplificationInstance

T5_MASK_1 = "<mask_1>"
T5_MASK_2 = "<mask_2>"
BART_MASK = "<mask>"

_LEADING_TOKEN = re.compile(r"<([^<>\s]+)>(?: |$)")


class AnnotationStyle(enum.Enum):
    T5 = "t5"
    BART = "bart"

    @classmethod
    def parse(cls, value) -> "AnnotationStyle":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown annotation style {value!r}; expected t5 or bart") from None


class AnnotationError(ValueError):
    pass


def emit_text(source_text: str, target_text: str, ops, style) -> tuple[str, str]:
    style = AnnotationStyle.parse(style)
    prefix = OperationSet(ops).serialize()
    if style is AnnotationStyle.T5:
        source = f"{T5_MASK_1} {source_text}"
        if prefix:
            target = f"{T5_MASK_1} {prefix} {T5_MASK_2} {target_text}"
        else:
            target = f"{T5_MASK_1} {T5_MASK_2} {target_text}"
    else:
        source = f"{BART_MASK} {source_text}"
        target = f"{prefix} {target_text}" if prefix else target_text
    return source, target


def emit(si: SimplificationInstance, ops, style) -> tuple[str, str]:
    """Return ``(modified_source, modified_target)`` for one instance."""
    if si.alignment.degenerate or not si.source_text.strip() or not si.target_text.strip():
        raise AnnotationError(f"instance {si.id!r} is degenerate and cannot be emitted for training")
    return emit_text(si.source_text, si.target_text, ops, style)


def _leading_ops(text: str) -> tuple[OperationSet, str]:
    ops = []
    pos = 0
    while True:
        m = _LEADING_TOKEN.match(text, pos)
        if not m:
            break
        name = m.group(1)
        try:
            ops.append(OperationToken.from_name(name))
        except ValueError:
            raise AnnotationError(f"unknown operation token <{name}>") from None
        pos = m.end()
    return OperationSet(ops), text[pos:]


def parse_annotated(line: str, style) -> tuple[OperationSet, str]:
    """Split an annotated target line into its operation tokens and residual text."""
    style = AnnotationStyle.parse(style)
    if style is AnnotationStyle.BART:
        return _leading_ops(line)
    if not line.startswith(T5_MASK_1):
        raise AnnotationError(f"T5 target must start with {T5_MASK_1}")
    rest = line[len(T5_MASK_1):].lstrip(" ")
    if rest.startswith(T5_MASK_2):
        return OperationSet(), rest[len(T5_MASK_2):].removeprefix(" ")
    marker = f" {T5_MASK_2}"
    cut = rest.find(marker)
    if cut < 0:
        raise AnnotationError(f"T5 target is missing {T5_MASK_2}")
    ops, leftover = _leading_ops(rest[:cut] + " ")
    if leftover.strip():
        raise AnnotationError(f"unexpected text before {T5_MASK_2}: {leftover.strip()!r}")
    return ops, rest[cut + len(marker):].removeprefix(" ")


def strip_source(line: str, style) -> str:
    """Remove the mask scaffolding from an emitted source line."""
    style = AnnotationStyle.parse(style)
    mask = T5_MASK_1 if style is AnnotationStyle.T5 else BART_MASK
    if not line.startswith(mask):
        raise AnnotationError(f"{style.value} source must start with {mask}")
    return line[len(mask):].removeprefix(" ")
