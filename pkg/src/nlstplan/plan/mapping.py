"""Per-type mapping rules from an extraction to a baseline physical plan.

The baseline plans are unindexed (plain feeds); the optimizer derives
indexed variants separately. Mapping is deterministic: the same extraction
always yields the same plan, which is what makes end-to-end precision
checkable against ground-truth slots.
"""

from __future__ import annotations

from ..catalog import UT_SUFFIX, Database, Relation
from ..corpus import QueryType
from ..errors import MissingSlot, UnsupportedType
from ..geo import Point, Region
from ..nlu import ExtractionResult
from .ops import (
    Aggregate,
    AttrRef,
    Consume,
    Contains,
    Count,
    DeftimeIntersects,
    DistanceLe,
    Feed,
    Filter,
    GeomLit,
    Intersects,
    KNearest,
    PhysicalOp,
    PhysicalPlan,
    Predicate,
    SimilarityOp,
    SpatialJoin,
    plan_of,
)

STATIC_KINDS = ("point", "line", "region")


def _static_attr(rel: Relation) -> str:
    attr = rel.first_attr_of_kind(*STATIC_KINDS)
    if attr is None:
        raise UnsupportedType(f"relation {rel.name} has no spatial attribute")
    return attr.name


def _mpoint_attr(rel: Relation) -> str:
    attr = rel.first_attr_of_kind("mpoint")
    if attr is None:
        raise UnsupportedType(f"relation {rel.name} has no trajectory attribute")
    return attr.name


def _numeric_attr(rel: Relation) -> str:
    attr = rel.first_attr_of_kind("int", "real")
    if attr is None:
        raise UnsupportedType(f"relation {rel.name} has no numeric attribute")
    return attr.name


def _location_filter(rel: Relation, geometry) -> Predicate:
    """Kind-driven spatial predicate: point-in-region containment uses
    contains, everything else falls back to intersects."""
    attr = _static_attr(rel)
    kind = rel.attr(attr).kind
    if isinstance(geometry, Point) and kind == "region":
        return Contains(AttrRef(attr), GeomLit(geometry))
    if isinstance(geometry, Region) and kind == "point":
        return Contains(GeomLit(geometry), AttrRef(attr))
    return Intersects(AttrRef(attr), GeomLit(geometry))


def _object_name(db: Database, rel_id: str, tuple_id: int) -> str:
    rel = db.relation(rel_id)
    name_attr = rel.name_attr
    if name_attr is None:
        raise UnsupportedType(f"relation {rel_id} has no name attribute")
    return str(rel.value(tuple_id, name_attr.name)).lower()


def _require(ex: ExtractionResult, slot: str):
    value = {"relation": ex.relations[0] if ex.relations else None,
             "relation2": ex.relations[1] if len(ex.relations) > 1 else None,
             "location": ex.locations[0] if ex.locations else None,
             "object": ex.objects[0] if ex.objects else None,
             "period": ex.period,
             "distance": ex.distance}.get(slot)
    if value is None:
        raise MissingSlot(slot)
    return value


def map_query(qtype: QueryType, ex: ExtractionResult, db: Database) -> PhysicalPlan:
    """Build the baseline plan for a classified, extracted query."""
    if qtype == QueryType.BasicSpatial:
        rel = db.relation(_require(ex, "relation"))
        loc = _require(ex, "location")
        root = Consume(Filter(_location_filter(rel, loc.geometry), Feed(rel.name)))
        return plan_of(root)

    if qtype == QueryType.TimeInterval:
        rel = db.relation(_require(ex, "relation"))
        period = _require(ex, "period")
        pred = DeftimeIntersects(_mpoint_attr(rel), period)
        return plan_of(Consume(Filter(pred, Feed(rel.name))))

    if qtype == QueryType.Range:
        rel = db.relation(_require(ex, "relation"))
        loc = _require(ex, "location")
        distance = _require(ex, "distance")
        pred = DistanceLe(AttrRef(_static_attr(rel)), GeomLit(loc.geometry), float(distance[0]))
        return plan_of(Consume(Filter(pred, Feed(rel.name))))

    if qtype == QueryType.NearestNeighbor:
        return _map_nearest(ex, db)

    if qtype == QueryType.Join:
        return _map_join(ex, db)

    if qtype == QueryType.Similarity:
        return _map_similarity(ex, db)

    if qtype == QueryType.Aggregation:
        return _map_aggregation(ex, db)

    raise UnsupportedType(f"unhandled query type {qtype}")


def _ut_source(db: Database, rel_name: str) -> str:
    companion = rel_name + UT_SUFFIX
    if db.ut_alias.get("UTOrdered") == companion:
        return "UTOrdered"
    return companion


def _map_nearest(ex: ExtractionResult, db: Database) -> PhysicalPlan:
    warnings: tuple[str, ...] = ()
    k = ex.k
    if k is None:
        k = 1
        warnings = ("k missing from the query; defaulted to 1",)

    if ex.objects:
        rel_id, tuple_id = ex.objects[0]
        obj_rel = db.relation(rel_id)
        obj_name = _object_name(db, rel_id, tuple_id)
        if ex.relations and ex.relations[0] != rel_id:
            # static candidates ranked around a moving query object
            cand = db.relation(ex.relations[0])
            op: PhysicalOp = Feed(cand.name)
            op = KNearest(_static_attr(cand), obj_name, k, op, ex.period)
            return plan_of(Consume(op), warnings)
        attr = _mpoint_attr(obj_rel)
        op = Feed(_ut_source(db, rel_id))
        if ex.period is not None:
            op = Filter(DeftimeIntersects(attr, ex.period), op)
        op = KNearest(attr, obj_name, k, op)
        return plan_of(Consume(op), warnings)

    if ex.relations and ex.locations:
        cand = db.relation(ex.relations[0])
        loc = ex.locations[0]
        op = Feed(cand.name)
        op = KNearest(_static_attr(cand), loc.surface_name.lower(), k, op, ex.period)
        return plan_of(Consume(op), warnings)

    raise MissingSlot("object")


def _map_join(ex: ExtractionResult, db: Database) -> PhysicalPlan:
    _require(ex, "relation")
    _require(ex, "relation2")
    left = db.relation(ex.relations[0])
    right = db.relation(ex.relations[1])
    lattr, rattr = _static_attr(left), _static_attr(right)
    predname = ex.predicate
    if predname is None:
        lkind, rkind = left.attr(lattr).kind, right.attr(rattr).kind
        predname = "contains" if (lkind == "point" and rkind == "region") else "intersects"
    if ex.distance is not None:
        predname = f"dist<={int(ex.distance[0])}"

    right_op: PhysicalOp = Feed(right.name)
    if ex.locations:
        right_op = Filter(_location_filter(right, ex.locations[0].geometry), right_op)
    root = Consume(SpatialJoin(lattr, rattr, predname, Feed(left.name), right_op))
    return plan_of(root)


def _map_similarity(ex: ExtractionResult, db: Database) -> PhysicalPlan:
    rel_id, tuple_id = _require(ex, "object")
    if ex.relations and ex.relations[0] != rel_id:
        raise UnsupportedType(
            f"similarity candidates {ex.relations[0]} do not hold trajectories of {rel_id}")
    rel = db.relation(rel_id)
    attr = _mpoint_attr(rel)
    n = ex.k if ex.k is not None else 1
    obj_name = _object_name(db, rel_id, tuple_id)
    return plan_of(Consume(SimilarityOp(attr, obj_name, n, Feed(rel.name))))


def _map_aggregation(ex: ExtractionResult, db: Database) -> PhysicalPlan:
    if ex.agg_flag is None:
        raise MissingSlot("aggregate")
    rel = db.relation(_require(ex, "relation"))
    op: PhysicalOp = Feed(rel.name)
    if ex.locations and ex.distance is not None:
        pred = DistanceLe(AttrRef(_static_attr(rel)), GeomLit(ex.locations[0].geometry),
                          float(ex.distance[0]))
        op = Filter(pred, op)
    elif ex.locations:
        op = Filter(_location_filter(rel, ex.locations[0].geometry), op)
    elif ex.period is not None:
        op = Filter(DeftimeIntersects(_mpoint_attr(rel), ex.period), op)
    if ex.agg_flag == "count":
        return plan_of(Count(op))
    return plan_of(Aggregate(ex.agg_flag, _numeric_attr(rel), op))
