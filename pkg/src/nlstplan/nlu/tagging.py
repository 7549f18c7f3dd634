"""Coarse-grained tagging: numeric/temporal recognizers plus information spans.

Recognizers run in priority order TIME > QUANTITY > CARDINAL > NUMBER;
whatever content remains (stop words dropped) forms the information spans
that the fine-grained extractor grounds against the knowledge base.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import EmptyInput
from ..words import (
    DISTANCE_UNITS,
    NN_KEYWORDS,
    NUMBER_WORDS,
    SOFT_WORDS,
    STOPWORDS,
    parse_number_words,
    parse_time_token,
)

TIME = "TIME"
NUMBER = "NUMBER"
CARDINAL = "CARDINAL"
QUANTITY = "QUANTITY"
INFO = "INFO"

_TOKEN_RE = re.compile(
    r"\d{1,2}:\d{2}"          # 14:30
    r"|\d{1,2}(?:am|pm)\b"    # 6am / 11pm
    r"|\d+(?:\.\d+)?(?:km|m)\b"  # glued quantity 500m / 2km
    r"|[a-z]+\d+"             # word+digits identifier (train5)
    r"|\d+(?:\.\d+)?"         # plain number
    r"|[a-z]+"                # word
)

_TIME_TOKEN_RE = re.compile(r"^(?:\d{1,2}:\d{2}|\d{1,2}(?:am|pm))$")
_GLUED_QTY_RE = re.compile(r"^(\d+(?:\.\d+)?)(km|m)$")
_PLAIN_NUM_RE = re.compile(r"^\d+(?:\.\d+)?$")
_WORD_NUM_RE = re.compile(r"^[a-z]+\d+$")

# token distance within which a digit counts as a k-cardinal
NEAR_WINDOW = 3


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass
class TaggedSpan:
    text: str
    start: int
    end: int
    label: str
    tok_start: int
    tok_end: int  # exclusive
    value: object = field(default=None)

    @property
    def byte_range(self) -> tuple[int, int]:
        return (self.start, self.end)


def tokenize(text: str) -> list[Token]:
    low = text.lower()
    return [Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(low)]


def coarse_tag(nlq: str) -> tuple[list[TaggedSpan], list[TaggedSpan]]:
    """Tag nlq into (number list, information list)."""
    if not nlq or not nlq.strip():
        raise EmptyInput("cannot tag empty input")
    low = nlq.lower()
    tokens = tokenize(nlq)
    n = len(tokens)
    labels: list[str | None] = [None] * n
    values: list[object] = [None] * n

    # TIME: clock-like tokens, then bare-number pairs in "between X and Y"
    for i, tok in enumerate(tokens):
        if _TIME_TOKEN_RE.match(tok.text):
            parsed = parse_time_token(tok.text)
            if parsed is not None:
                labels[i] = TIME
                values[i] = parsed
    for i, tok in enumerate(tokens):
        if (tok.text == "between" and i + 3 < n
                and labels[i + 1] is None and _PLAIN_NUM_RE.match(tokens[i + 1].text)
                and tokens[i + 2].text == "and"
                and labels[i + 3] is None and _PLAIN_NUM_RE.match(tokens[i + 3].text)):
            # bare numerals in a between-pair read as epoch milliseconds
            for j in (i + 1, i + 3):
                labels[j] = TIME
                values[j] = int(float(tokens[j].text))

    spans: list[TaggedSpan] = []

    def emit(i: int, j: int, label: str, value: object) -> None:
        spans.append(TaggedSpan(text=low[tokens[i].start:tokens[j].end],
                                start=tokens[i].start, end=tokens[j].end,
                                label=label, tok_start=i, tok_end=j + 1, value=value))

    # QUANTITY: number + unit word, or a glued token
    for i, tok in enumerate(tokens):
        if labels[i] is not None:
            continue
        m = _GLUED_QTY_RE.match(tok.text)
        if m:
            labels[i] = QUANTITY
            values[i] = float(m.group(1)) * DISTANCE_UNITS[m.group(2)]
            emit(i, i, QUANTITY, values[i])
            continue
        if (_PLAIN_NUM_RE.match(tok.text) and i + 1 < n and labels[i + 1] is None
                and tokens[i + 1].text in DISTANCE_UNITS):
            meters = float(tok.text) * DISTANCE_UNITS[tokens[i + 1].text]
            labels[i] = labels[i + 1] = QUANTITY
            values[i] = meters
            emit(i, i + 1, QUANTITY, meters)

    # CARDINAL: number-word runs, and digits adjacent to nearest/closest
    nn_positions = [i for i, tok in enumerate(tokens) if tok.text in NN_KEYWORDS]
    i = 0
    while i < n:
        if labels[i] is None and tokens[i].text in NUMBER_WORDS:
            j = i
            while j + 1 < n and labels[j + 1] is None and tokens[j + 1].text in NUMBER_WORDS:
                j += 1
            while j >= i:
                parsed = parse_number_words([t.text for t in tokens[i:j + 1]])
                if parsed is not None:
                    break
                j -= 1
            if j >= i and parsed is not None:
                for idx in range(i, j + 1):
                    labels[idx] = CARDINAL
                emit(i, j, CARDINAL, parsed)
                i = j + 1
                continue
        i += 1
    # a digit is a k-cardinal when the keyword follows it closely ("5 nearest
    # pois", "5 pois are closest") or directly precedes it ("nearest 5");
    # digits after the keyword phrase ("neighbors to the train 5") are object
    # suffixes, not cardinals
    for i, tok in enumerate(tokens):
        if labels[i] is None and _PLAIN_NUM_RE.match(tok.text):
            if any(1 <= p - i <= NEAR_WINDOW or i - p == 1 for p in nn_positions):
                labels[i] = CARDINAL
                emit(i, i, CARDINAL, int(float(tok.text)))

    # NUMBER: remaining numerics
    for i, tok in enumerate(tokens):
        if labels[i] is None and _PLAIN_NUM_RE.match(tok.text):
            labels[i] = NUMBER
            val = float(tok.text)
            emit(i, i, NUMBER, int(val) if val.is_integer() else val)

    # TIME spans are emitted late so the list stays position-sorted below
    for i, tok in enumerate(tokens):
        if labels[i] == TIME:
            emit(i, i, TIME, values[i])

    # INFO: maximal runs of remaining content words; hard stop words break a
    # run, soft connectives ("of") survive inside but are trimmed at edges
    i = 0
    while i < n:
        if labels[i] is not None or tokens[i].text in STOPWORDS or tokens[i].text in SOFT_WORDS:
            i += 1
            continue
        j = i
        last_content = i
        while j + 1 < n and labels[j + 1] is None and tokens[j + 1].text not in STOPWORDS:
            j += 1
            if tokens[j].text not in SOFT_WORDS:
                last_content = j
        emit(i, last_content, INFO, None)
        i = j + 1

    spans.sort(key=lambda s: s.start)
    number_list = [s for s in spans if s.label in (TIME, NUMBER, CARDINAL, QUANTITY)]
    info_list = [s for s in spans if s.label == INFO]
    return number_list, info_list
