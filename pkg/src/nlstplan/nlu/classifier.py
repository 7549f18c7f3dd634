"""Query-type classification.

The default model is a linear bag-of-unigram+bigram classifier trained with
multinomial logistic regression (full-batch gradient descent, 200 epochs,
learning rate 0.1): deterministic, dependency-free, and plenty for a
template-generated corpus. Other models can implement the same interface.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..corpus import QueryType
from ..errors import InsufficientData, ModelLoadError

MODEL_VERSION = "nlstplan-classifier-1"
MIN_PER_CLASS = 10
EPOCHS = 200
LEARNING_RATE = 0.1

_TOKEN_RE = re.compile(r"\d{1,2}:\d{2}|\d{1,2}(?:am|pm)\b|\d+(?:\.\d+)?(?:km|m)\b|[a-z]+\d+|\d+(?:\.\d+)?|[a-z]+")
_TIME_RE = re.compile(r"^(?:\d{1,2}:\d{2}|\d{1,2}(?:am|pm))$")
_QTY_RE = re.compile(r"^\d+(?:\.\d+)?(?:km|m)$")
_NUM_RE = re.compile(r"^\d+(?:\.\d+)?$")


def _features(text: str) -> list[str]:
    toks = []
    for tok in _TOKEN_RE.findall(text.lower()):
        if _TIME_RE.match(tok):
            toks.append("<time>")
        elif _QTY_RE.match(tok):
            toks.append("<qty>")
        elif _NUM_RE.match(tok):
            toks.append("<num>")
        else:
            toks.append(tok)
    # boundary markers make "starts with count" / "ends on a relation"
    # separable for the linear model
    padded = ["<s>"] + toks + ["</s>"]
    return toks + [f"{a}\x1f{b}" for a, b in zip(padded, padded[1:])]


@dataclass
class TypeClassifier:
    classes: list[str]              # QueryType names in enumeration order
    vocab: dict[str, int]
    weights: np.ndarray             # shape (n_classes, n_features + 1); last column is bias

    def scores(self, nlq: str) -> np.ndarray:
        phi = np.zeros(len(self.vocab) + 1)
        phi[-1] = 1.0
        for feat in _features(nlq):
            idx = self.vocab.get(feat)
            if idx is not None:
                phi[idx] += 1.0
        return self.weights @ phi

    def save(self, path: str | Path) -> None:
        doc = {"version": MODEL_VERSION, "classes": self.classes,
               "vocab": self.vocab, "weights": self.weights.tolist()}
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TypeClassifier":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelLoadError(f"cannot read model {path}: {exc}") from exc
        if doc.get("version") != MODEL_VERSION:
            raise ModelLoadError(f"unsupported model version {doc.get('version')!r}")
        try:
            weights = np.array(doc["weights"], dtype=np.float64)
            return cls(doc["classes"], {k: int(v) for k, v in doc["vocab"].items()}, weights)
        except (KeyError, ValueError) as exc:
            raise ModelLoadError(f"malformed model file {path}: {exc}") from exc


def train_classifier(corpus, seed: int = 0) -> TypeClassifier:
    """Fit the default linear model on (nlq, query_type) corpus entries."""
    classes = [qt.value for qt in QueryType]
    counts = {c: 0 for c in classes}
    for entry in corpus:
        counts[entry.query_type.value] += 1
    lacking = [c for c, cnt in counts.items() if cnt < MIN_PER_CLASS]
    if lacking:
        raise InsufficientData(
            f"need >= {MIN_PER_CLASS} examples per class, short on: {', '.join(lacking)}")

    feats_per_entry = [_features(e.nlq) for e in corpus]
    vocab = {feat: i for i, feat in enumerate(sorted({f for fs in feats_per_entry for f in fs}))}

    n, v, c = len(corpus), len(vocab), len(classes)
    x = np.zeros((n, v + 1))
    x[:, -1] = 1.0
    y = np.zeros((n, c))
    class_index = {name: i for i, name in enumerate(classes)}
    for row, (entry, feats) in enumerate(zip(corpus, feats_per_entry)):
        for feat in feats:
            x[row, vocab[feat]] += 1.0
        y[row, class_index[entry.query_type.value]] = 1.0

    # seed kept for interface compatibility: zero init + full-batch descent
    # is already bit-reproducible
    _ = np.random.default_rng(seed)
    w = np.zeros((c, v + 1))
    for _epoch in range(EPOCHS):
        logits = x @ w.T
        logits -= logits.max(axis=1, keepdims=True)
        p = np.exp(logits)
        p /= p.sum(axis=1, keepdims=True)
        grad = (p - y).T @ x / n
        w -= LEARNING_RATE * grad
    return TypeClassifier(classes, vocab, w)


def classify(clf: TypeClassifier, nlq: str) -> tuple[QueryType, list[float]]:
    """Most likely query type; ties break by enumeration order."""
    scores = clf.scores(nlq)
    return QueryType(clf.classes[int(np.argmax(scores))]), scores.tolist()
