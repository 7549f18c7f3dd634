"""End-to-end translation: tag, extract, classify, map, optimize, execute.

This module is shared by the HTTP service, the CLI, and the eval harness so
all three produce identical payloads for identical inputs.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass

from . import corpus as corpus_mod
from .catalog import Database, format_value
from .corpus import QueryType
from .errors import (
    AmbiguousEntity,
    EmptyInput,
    MissingSlot,
    NlstplanError,
    PlanSyntaxError,
    UnknownEntity,
    UnsupportedType,
    Unrepairable,
)
from .geo import Period
from .nlu import ExtractionResult, TypeClassifier, classify, coarse_tag, fine_extract
from .nlu.tagging import TaggedSpan
from .optimizer import choose_plan, enumerate_candidates, estimate_filter_rate
from .plan import PhysicalPlan, execute, map_query, render_plan, to_tree
from .plan.ops import Feed, Filter, walk

FILTER_RATE_SAMPLE = 200

# which extraction fields count as ground-truth slots, per query type
TYPE_SLOTS: dict[QueryType, frozenset[str]] = {
    QueryType.BasicSpatial: frozenset({"relation", "location"}),
    QueryType.TimeInterval: frozenset({"relation", "period"}),
    QueryType.Range: frozenset({"relation", "location", "distance_m"}),
    QueryType.NearestNeighbor: frozenset({"relation", "location", "object", "k", "period"}),
    QueryType.Join: frozenset({"relation", "relation2", "predicate", "location"}),
    QueryType.Similarity: frozenset({"relation", "object", "k"}),
    QueryType.Aggregation: frozenset({"relation", "agg", "location", "distance_m", "period"}),
}


@dataclass
class Translation:
    nlq: str
    spans: tuple[list[TaggedSpan], list[TaggedSpan]]
    extraction: ExtractionResult
    query_type: QueryType
    scores: list[float]
    plan: PhysicalPlan
    elapsed_ms: float


def translate(nlq: str, db: Database, clf: TypeClassifier) -> Translation:
    """NLQ to baseline physical plan; raises typed errors on user mistakes."""
    t0 = time.perf_counter()
    spans = coarse_tag(nlq)
    extraction = fine_extract(spans, db.kb)
    qtype, scores = classify(clf, nlq)
    plan = map_query(qtype, extraction, db)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return Translation(nlq, spans, extraction, qtype, scores, plan, elapsed_ms)


def recovered_slots(extraction: ExtractionResult, qtype: QueryType) -> dict:
    """Extraction rendered in the corpus bound-slot format (for comparisons)."""
    out: dict = {}
    if extraction.relations:
        out["relation"] = extraction.relations[0]
    if len(extraction.relations) > 1:
        out["relation2"] = extraction.relations[1]
    if extraction.locations:
        out["location"] = extraction.locations[0].surface_name.lower()
    if extraction.object_names:
        out["object"] = extraction.object_names[0]
    if extraction.k is not None:
        out["k"] = extraction.k
    if extraction.distance is not None:
        out["distance_m"] = extraction.distance[0]
    if extraction.period is not None:
        out["period"] = [extraction.period.start, extraction.period.end]
    if extraction.agg_flag:
        out["agg"] = extraction.agg_flag
    if extraction.predicate:
        out["predicate"] = extraction.predicate
    allowed = TYPE_SLOTS[qtype]
    return {key: value for key, value in out.items() if key in allowed}


def extraction_from_slots(slots: dict, qtype: QueryType, db: Database) -> ExtractionResult:
    """Rebuild an extraction from corpus ground-truth slots."""
    ex = ExtractionResult()
    if "relation" in slots:
        ex.relations.append(str(slots["relation"]))
    if "relation2" in slots:
        ex.relations.append(str(slots["relation2"]))
    if "location" in slots:
        hits = [e for e in db.kb.find_value(str(slots["location"]))
                if hasattr(e, "geometry")]
        if not hits:
            raise UnknownEntity(str(slots["location"]), db.kb.suggest(str(slots["location"])))
        ex.locations.append(hits[0])
    if "object" in slots:
        hits = [e for e in db.kb.find_value(str(slots["object"])) if hasattr(e, "trajectory")]
        if not hits:
            raise UnknownEntity(str(slots["object"]), db.kb.suggest(str(slots["object"])))
        ex.objects.append((hits[0].relation_id, hits[0].tuple_id))
        ex.object_names.append(hits[0].surface_name.lower())
    if "k" in slots:
        ex.k = int(slots["k"])
    if "distance_m" in slots:
        ex.distance = (float(slots["distance_m"]), "m")
    if "period" in slots:
        start, end = slots["period"]
        ex.period = Period(int(start), int(end))
    if "agg" in slots:
        ex.agg_flag = str(slots["agg"])
    if "predicate" in slots:
        ex.predicate = str(slots["predicate"])
    ex.nn_flag = qtype == QueryType.NearestNeighbor
    return ex


def error_category(exc: Exception) -> str | None:
    if isinstance(exc, (UnknownEntity, AmbiguousEntity, Unrepairable)):
        return "entity"
    if isinstance(exc, (MissingSlot, UnsupportedType)):
        return "unsupported-type"
    if isinstance(exc, (EmptyInput, PlanSyntaxError, ValueError)):
        return "syntax"
    return None


def _serialize_spans(spans: tuple[list[TaggedSpan], list[TaggedSpan]]) -> list[dict]:
    number_list, info_list = spans
    return [{"text": s.text, "label": s.label, "start": s.start, "end": s.end}
            for s in sorted(number_list + info_list, key=lambda s: s.start)]


def _serialize_extraction(ex: ExtractionResult) -> dict:
    return {
        "relations": list(ex.relations),
        "locations": [{"id": loc.location_id, "name": loc.surface_name, "kind": loc.kind}
                      for loc in ex.locations],
        "objects": [{"relation": rel, "tuple": tid, "name": name}
                    for (rel, tid), name in zip(ex.objects, ex.object_names)],
        "k": ex.k,
        "distance_m": ex.distance[0] if ex.distance else None,
        "period": [ex.period.start, ex.period.end] if ex.period else None,
        "nearest_neighbor": ex.nn_flag,
        "aggregate": ex.agg_flag,
        "predicate": ex.predicate,
    }


def serialize_result(rs) -> dict:
    return {
        "schema": [{"name": a.name, "kind": a.kind} for a in rs.schema],
        "rows": [[format_value(v) for v in row] for row in rs.rows],
    }


def _first_filter_over_feed(plan: PhysicalPlan):
    for node in walk(plan.root):
        if isinstance(node, Filter) and isinstance(node.child, Feed):
            return node.predicate, node.child.relation
    return None


def build_query_response(db: Database, nlq: str, clf: TypeClassifier,
                         optimize: bool = False, seed: int = 7,
                         sample_fraction: float = 0.1,
                         suggestion_source=None) -> dict:
    """The QueryResponse payload: trace + plan + results, or a structured
    user error with suggestions."""
    from .service import to_geojson  # deferred: service imports this module

    response: dict = {"id": uuid.uuid4().hex, "db": db.name, "nlq": nlq}
    try:
        tr = translate(nlq, db, clf)
    except NlstplanError as exc:
        category = error_category(exc)
        if category is None:
            raise
        suggestions = list(getattr(exc, "suggestions", []) or [])
        if not suggestions:
            source = suggestion_source or (lambda: _example_queries(db, seed))
            suggestions = source()
        response["error"] = {"category": category, "message": str(exc),
                             "suggestions": suggestions[:3]}
        return response
    except ValueError as exc:
        response["error"] = {"category": "syntax", "message": str(exc),
                             "suggestions": (suggestion_source or (lambda: _example_queries(db, seed)))()[:3]}
        return response

    response["trace"] = {
        "tagged_spans": _serialize_spans(tr.spans),
        "extraction": _serialize_extraction(tr.extraction),
        "query_type": tr.query_type.value,
        "scores": {qt.value: s for qt, s in zip(QueryType, tr.scores)},
    }

    chosen = tr.plan
    optimizer_report = None
    if optimize:
        selectivity = 1.0
        probe = _first_filter_over_feed(tr.plan)
        if probe is not None:
            pred, rel_name = probe
            selectivity = estimate_filter_rate(pred, db.relation(rel_name),
                                               FILTER_RATE_SAMPLE, seed)
        cands = enumerate_candidates(tr.plan, db, selectivity)
        chosen, estimates = choose_plan(cands, db, sample_fraction, seed)
        optimizer_report = {
            "selectivity": selectivity,
            "candidates": [{"plan": render_plan(e.plan), "sampled_ms": e.sampled_ms,
                            "predicted_ms": e.predicted_ms, "chosen": e.chosen,
                            "uses_index": e.plan.uses_index} for e in estimates],
        }

    baseline_rs, baseline_ms = execute(tr.plan, db)
    if chosen == tr.plan:
        result_rs, optimized_ms = baseline_rs, None
        if optimize:
            optimized_ms = baseline_ms
    else:
        result_rs, optimized_ms = execute(chosen, db)

    response["plan_text"] = render_plan(chosen)
    response["operator_tree"] = to_tree(chosen.root)
    response["results"] = serialize_result(result_rs)
    response["results"]["geojson"] = to_geojson(result_rs)
    response["timing"] = {"baseline_ms": baseline_ms, "optimized_ms": optimized_ms,
                          "translation_ms": tr.elapsed_ms}
    if tr.plan.warnings:
        response["warnings"] = list(tr.plan.warnings)
    if optimizer_report is not None:
        response["optimizer_report"] = optimizer_report
    return response


def _example_queries(db: Database, seed: int) -> list[str]:
    try:
        return [e.nlq for e in corpus_mod.generate(db, 3, seed)]
    except NlstplanError:
        return []
