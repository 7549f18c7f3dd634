"""Natural language understanding: tagging, entity extraction, type classification."""

from .classifier import TypeClassifier, classify, train_classifier
from .extract import ExtractionResult, fine_extract
from .tagging import TaggedSpan, coarse_tag, tokenize

__all__ = [
    "ExtractionResult", "TaggedSpan", "TypeClassifier", "classify",
    "coarse_tag", "fine_extract", "tokenize", "train_classifier",
]
