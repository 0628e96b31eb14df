"""Simplification-operation tagging, annotation, scoring and dataset comparison."""

from .core import (
    ALL_OPS,
    AlignmentKind,
    AlignmentType,
    OperationProfile,
    OperationSet,
    OperationToken,
    ParsedSentence,
    ParseToken,
    SimplificationInstance,
    TaggedInstance,
    canonical_order,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_OPS",
    "AlignmentKind",
    "AlignmentType",
    "OperationProfile",
    "OperationSet",
    "OperationToken",
    "ParseToken",
    "ParsedSentence",
    "SimplificationInstance",
    "TaggedInstance",
    "canonical_order",
]
