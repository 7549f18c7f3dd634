"""Fine-grained extraction: ground tagged spans in the knowledge base.

Information spans are segmented greedily (longest match first) against the
relation and location knowledge bases; value-level matches outrank
relation-level ones. A number right after an entity mention binds to a
specific tuple ("train 5" -> the vehicle named train5), while cardinals
near "nearest"/"closest"/"similar" bind to k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..catalog import KnowledgeBase, LocationKBEntry, MovingObjectKBEntry
from ..errors import AmbiguousEntity, UnknownEntity
from ..geo import Period
from ..words import (
    AGG_KEYWORDS,
    IGNORABLE,
    NN_KEYWORDS,
    PREDICATE_CUES,
    SIM_KEYWORDS,
    SOFT_WORDS,
)
from .tagging import CARDINAL, NUMBER, QUANTITY, TIME, NEAR_WINDOW, TaggedSpan, tokenize


@dataclass
class ExtractionResult:
    relations: list[str] = field(default_factory=list)
    locations: list[LocationKBEntry] = field(default_factory=list)
    objects: list[tuple[str, int]] = field(default_factory=list)
    object_names: list[str] = field(default_factory=list)
    k: int | None = None
    distance: tuple[float, str] | None = None  # normalized to meters
    period: Period | None = None
    nn_flag: bool = False
    agg_flag: str | None = None
    predicate: str | None = None

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.distance is not None and self.distance[0] <= 0:
            raise ValueError("distance must be positive")


def _resolve_phrase(kb: KnowledgeBase, phrase: str):
    """Best knowledge-base match for a phrase, or None.

    Exact value-level entries win over exact relation entries; fuzzy results
    follow kb ordering (score desc, id asc). Two exact value matches or two
    exact relation matches are ambiguous.
    """
    values = kb.lookup_values(phrase)
    exact_values = [e for e, score in values if score == 1.0]
    if len(exact_values) > 1:
        raise AmbiguousEntity(phrase, [e.surface_name for e in exact_values])
    if exact_values:
        return exact_values[0]
    rels = [e for e, kind, score in kb.lookup(phrase) if kind == "relation" and score == 1.0]
    if len(rels) > 1:
        raise AmbiguousEntity(phrase, [e.relation_id for e in rels])
    if rels:
        return rels[0]
    if values:
        return values[0][0]
    fuzzy = kb.lookup(phrase)
    return fuzzy[0][0] if fuzzy else None


def fine_extract(lists: tuple[list[TaggedSpan], list[TaggedSpan]],
                 kb: KnowledgeBase) -> ExtractionResult:
    number_list, info_list = lists
    result = ExtractionResult()

    times = sorted((s for s in number_list if s.label == TIME), key=lambda s: s.start)
    if len(times) >= 2:
        result.period = Period(int(times[0].value), int(times[1].value))

    quantities = [s for s in number_list if s.label == QUANTITY]
    if quantities:
        result.distance = (float(quantities[0].value), "m")

    numbers = {s.tok_start: s for s in number_list if s.label == NUMBER}
    consumed_numbers: set[int] = set()
    keyword_positions: list[int] = []

    rel_aliases: dict[str, set[str]] = {
        e.relation_id: set(e.surface_names) for e in kb.relations
    }

    for span in info_list:
        toks = tokenize(span.text)
        roles: list[str] = []
        for rel_idx, tok in enumerate(toks):
            word = tok.text
            if word in SOFT_WORDS:
                roles.append("soft")
            elif word in NN_KEYWORDS:
                result.nn_flag = True
                keyword_positions.append(span.tok_start + rel_idx)
                roles.append("keyword")
            elif word in SIM_KEYWORDS:
                keyword_positions.append(span.tok_start + rel_idx)
                roles.append("keyword")
            elif word in AGG_KEYWORDS:
                if result.agg_flag is None:
                    result.agg_flag = AGG_KEYWORDS[word]
                roles.append("keyword")
            elif word in PREDICATE_CUES:
                if result.predicate is None:
                    result.predicate = PREDICATE_CUES[word]
                roles.append("keyword")
            elif word in IGNORABLE:
                roles.append("keyword")
            else:
                roles.append("entity")

        # maximal runs of entity tokens (soft words allowed inside)
        i = 0
        while i < len(toks):
            if roles[i] != "entity":
                i += 1
                continue
            j = i
            while j + 1 < len(toks) and roles[j + 1] in ("entity", "soft"):
                j += 1
            while roles[j] == "soft":
                j -= 1
            _ground_run(result, kb, toks, roles, i, j, span, numbers,
                        consumed_numbers, rel_aliases)
            i = j + 1

    _bind_k(result, number_list, numbers, consumed_numbers, keyword_positions)
    return result


def _ground_run(result: ExtractionResult, kb: KnowledgeBase, toks, roles,
                start: int, stop: int, span: TaggedSpan,
                numbers: dict[int, TaggedSpan], consumed_numbers: set[int],
                rel_aliases: dict[str, set[str]]) -> None:
    i = start
    while i <= stop:
        if roles[i] == "soft":
            i += 1
            continue
        match = None
        match_len = 0
        for length in range(stop - i + 1, 0, -1):
            seg = toks[i:i + length]
            if seg[0].text in SOFT_WORDS or seg[-1].text in SOFT_WORDS:
                continue
            phrase = " ".join(t.text for t in seg)

            if i + length - 1 == stop:
                bound = _try_object_number(kb, phrase, span, stop, numbers, consumed_numbers)
                if bound is not None:
                    match, match_len = bound, length
                    break
            match = _resolve_phrase(kb, phrase)
            if match is not None:
                match_len = length
                break
        if match is None:
            phrase = " ".join(t.text for t in toks[i:stop + 1] if t.text not in SOFT_WORDS)
            raise UnknownEntity(span.text, kb.suggest(phrase))

        i += match_len
        if isinstance(match, LocationKBEntry):
            # absorb a trailing type word: "city of london district"
            if i <= stop and toks[i].text in rel_aliases.get(match.relation_id, ()):
                i += 1
            if match.location_id not in [l.location_id for l in result.locations]:
                result.locations.append(match)
        elif isinstance(match, MovingObjectKBEntry):
            key = (match.relation_id, match.tuple_id)
            if key not in result.objects:
                result.objects.append(key)
                result.object_names.append(match.surface_name.lower())
        else:  # relation entry
            if match.relation_id not in result.relations:
                result.relations.append(match.relation_id)


def _try_object_number(kb: KnowledgeBase, phrase: str, span: TaggedSpan, stop: int,
                       numbers: dict[int, TaggedSpan], consumed_numbers: set[int]):
    """Value-level binding for '<mention> <number>' like "train 5"."""
    next_tok = span.tok_start + stop + 1
    num_span = numbers.get(next_tok)
    if num_span is None or next_tok in consumed_numbers:
        return None
    num_text = str(num_span.value)
    for candidate in (f"{phrase}{num_text}", f"{phrase} {num_text}"):
        hits = kb.find_value(candidate)
        if len(hits) > 1:
            raise AmbiguousEntity(candidate, [e.surface_name for e in hits])
        if hits:
            consumed_numbers.add(next_tok)
            return hits[0]
    fuzzy = kb.lookup_values(f"{phrase}{num_text}")
    if fuzzy:
        consumed_numbers.add(next_tok)
        return fuzzy[0][0]
    return None


def _bind_k(result: ExtractionResult, number_list: list[TaggedSpan],
            numbers: dict[int, TaggedSpan], consumed_numbers: set[int],
            keyword_positions: list[int]) -> None:
    def near_keyword(span: TaggedSpan) -> bool:
        return any(span.tok_start - NEAR_WINDOW <= p <= span.tok_end - 1 + NEAR_WINDOW
                   for p in keyword_positions)

    for span in number_list:
        if span.label == CARDINAL and near_keyword(span):
            result.k = int(span.value)
            return
    for span in number_list:
        if (span.label == NUMBER and span.tok_start not in consumed_numbers
                and near_keyword(span)):
            result.k = int(span.value)
            return
