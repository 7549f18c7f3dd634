"""Exception hierarchy shared by all nlstplan modules."""

from __future__ import annotations


class NlstplanError(Exception):
    """Base class for all errors raised by this package."""


# geometry / index / sweep

class IncompatibleOperands(NlstplanError):
    """Predicate applied to a type pair it does not support."""


class EmptyInput(NlstplanError):
    """An operation that requires at least one element got none."""


class InvalidK(NlstplanError):
    """k-nearest-neighbor count below 1."""


# catalog

class MissingCatalog(NlstplanError):
    """Dataset directory has no catalog.json."""


class SchemaMismatch(NlstplanError):
    """Tuple arity or value kind disagrees with the declared schema."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class BadGeometry(NlstplanError):
    """Unparsable WKT / MPOINT text."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class UnknownRelation(NlstplanError):
    """Relation name not present in the database."""


# corpus

class NoTemplates(NlstplanError):
    """Template bank is empty."""


class Unrepairable(NlstplanError):
    """Corpus entry references an entity with no acceptable fuzzy match."""


# nlu

class UnknownEntity(NlstplanError):
    """An information span resolved to nothing in the knowledge base."""

    def __init__(self, span_text: str, suggestions: list[str]):
        super().__init__(f"unknown entity {span_text!r}")
        self.span_text = span_text
        self.suggestions = suggestions


class AmbiguousEntity(NlstplanError):
    """Two knowledge-base entries matched a span with equal score 1.0."""

    def __init__(self, span_text: str, candidates: list[str]):
        super().__init__(f"ambiguous entity {span_text!r}: {', '.join(candidates)}")
        self.span_text = span_text
        self.candidates = candidates


class InsufficientData(NlstplanError):
    """Classifier training set has a class with too few examples."""


# planner

class MissingSlot(NlstplanError):
    """Query type requires a slot the extraction does not provide."""

    def __init__(self, slot: str):
        super().__init__(f"missing slot: {slot}")
        self.slot = slot


class UnsupportedType(NlstplanError):
    """Extraction contradicts the predicted query type."""


class PlanSyntaxError(NlstplanError):
    """Plan text does not conform to the plan grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExecError(NlstplanError):
    """An operator failed during plan execution."""

    def __init__(self, operator: str, cause: Exception):
        super().__init__(f"operator {operator} failed: {cause}")
        self.operator = operator
        self.cause = cause


# cli / model io

class ModelLoadError(NlstplanError):
    """Classifier model file is missing fields or has a bad version tag."""
