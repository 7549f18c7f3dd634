"""Tuple-at-a-time evaluation of physical operator trees.

Streams carry (tuple-id, row) pairs so index scans, tie-breaking, and
self-exclusion in the kNN sweep all stay deterministic. Elapsed time covers
execution only; translation is measured by the caller.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..catalog import AttributeDef, Database
from ..errors import ExecError, IncompatibleOperands, NlstplanError, UnknownRelation
from ..geo import (
    Line,
    MovingPoint,
    Period,
    Point,
    Region,
    UnitPoint,
    contains,
    deftime,
    geometry_distance,
    intersects,
    knearest_sweep,
    mpoint_at,
    representative_point,
    sync_distance,
)
from .ops import (
    Aggregate,
    And,
    AttrRef,
    Consume,
    Contains,
    Count,
    DeftimeIntersects,
    DistanceLe,
    Feed,
    Filter,
    Intersects,
    KNearest,
    Or,
    PhysicalOp,
    PhysicalPlan,
    Predicate,
    Project,
    SimilarityOp,
    SpatialJoin,
    WindowIntersects,
)


@dataclass(frozen=True)
class KnnLink:
    query_point: Point
    neighbor_point: Point
    rank: int
    distance: float


@dataclass
class ResultSet:
    schema: tuple[AttributeDef, ...]
    rows: list[tuple]
    knn_links: list[KnnLink] | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultSet):
            return NotImplemented
        return ([a.name for a in self.schema] == [a.name for a in other.schema]
                and self.rows == other.rows)

    def column(self, name: str) -> list:
        idx = [a.name for a in self.schema].index(name)
        return [row[idx] for row in self.rows]


@dataclass
class _Stream:
    schema: tuple[AttributeDef, ...]
    source: str | None  # relation the rows come from, when unambiguous
    rows: Iterable[tuple[int | None, tuple]]


@dataclass
class _Context:
    db: Database
    links: list[KnnLink] = field(default_factory=list)


def _fail(op: PhysicalOp, exc: Exception) -> ExecError:
    if isinstance(exc, ExecError):
        return exc
    return ExecError(type(op).__name__.lower(), exc)


def _contains_value(a, b) -> bool:
    if not isinstance(a, Region):
        raise IncompatibleOperands(f"contains needs a region, got {type(a).__name__}")
    if isinstance(b, Point):
        return contains(a, b)
    if isinstance(b, Line):
        return all(contains(a, p) for seg in b.segments for p in seg)
    if isinstance(b, Region):
        return all(contains(a, p) for p in b.outer)
    raise IncompatibleOperands(f"contains not defined for {type(b).__name__}")


def _eval_arg(arg, row: tuple, index: dict[str, int]):
    if isinstance(arg, AttrRef):
        if arg.name not in index:
            raise UnknownRelation(f"no attribute {arg.name!r} in stream")
        return row[index[arg.name]]
    return arg.value


def eval_predicate(pred: Predicate, row: tuple, index: dict[str, int]) -> bool:
    if isinstance(pred, Contains):
        return _contains_value(_eval_arg(pred.a, row, index), _eval_arg(pred.b, row, index))
    if isinstance(pred, Intersects):
        return intersects(_eval_arg(pred.a, row, index), _eval_arg(pred.b, row, index))
    if isinstance(pred, DeftimeIntersects):
        value = row[index[pred.attr]] if pred.attr in index else None
        if not isinstance(value, MovingPoint):
            raise IncompatibleOperands(f"deftime needs a trajectory attribute, got {pred.attr!r}")
        return any(p.intersects(pred.period) for p in deftime(value))
    if isinstance(pred, DistanceLe):
        a = _eval_arg(pred.a, row, index)
        b = _eval_arg(pred.b, row, index)
        return geometry_distance(a, b) <= pred.limit
    if isinstance(pred, And):
        return eval_predicate(pred.left, row, index) and eval_predicate(pred.right, row, index)
    if isinstance(pred, Or):
        return eval_predicate(pred.left, row, index) or eval_predicate(pred.right, row, index)
    raise IncompatibleOperands(f"cannot evaluate predicate {pred!r}")


def _index_of(schema: tuple[AttributeDef, ...]) -> dict[str, int]:
    return {a.name: i for i, a in enumerate(schema)}


def _run(op: PhysicalOp, ctx: _Context) -> _Stream:
    try:
        if isinstance(op, Feed):
            rel = ctx.db.relation(op.relation)
            return _Stream(rel.attributes, rel.name, enumerate(rel.tuples))

        if isinstance(op, WindowIntersects):
            rel = ctx.db.relation(op.relation)
            index = None
            for attr_name, idx in rel.indexes.items():
                if f"{rel.name}_{attr_name}_rtree" == op.index_id:
                    index = idx
                    break
            if index is None:
                raise UnknownRelation(f"no index {op.index_id!r} on relation {op.relation}")
            ids = sorted(index.window(op.window))
            return _Stream(rel.attributes, rel.name,
                           ((tid, rel.tuples[tid]) for tid in ids))

        if isinstance(op, Filter):
            child = _run(op.child, ctx)
            index = _index_of(child.schema)
            rows = ((tid, row) for tid, row in child.rows
                    if eval_predicate(op.predicate, row, index))
            return _Stream(child.schema, child.source, rows)

        if isinstance(op, KNearest):
            return _run_knearest(op, ctx)

        if isinstance(op, SpatialJoin):
            return _run_join(op, ctx)

        if isinstance(op, SimilarityOp):
            return _run_similarity(op, ctx)

        if isinstance(op, Project):
            child = _run(op.child, ctx)
            index = _index_of(child.schema)
            missing = [a for a in op.attrs if a not in index]
            if missing:
                raise UnknownRelation(f"cannot project missing attributes {missing}")
            cols = [index[a] for a in op.attrs]
            schema = tuple(child.schema[c] for c in cols)
            rows = ((tid, tuple(row[c] for c in cols)) for tid, row in child.rows)
            return _Stream(schema, child.source, rows)
    except NlstplanError as exc:
        raise _fail(op, exc) from exc
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise _fail(op, exc) from exc
    raise ExecError(type(op).__name__.lower(), ValueError("not a stream operator"))


def _resolve_query_entity(ctx: _Context, name: str):
    hits = ctx.db.kb.find_value(name) if ctx.db.kb else []
    if not hits:
        raise UnknownRelation(f"unknown object {name!r}")
    return sorted(hits, key=lambda e: e.entry_id)[0]


def _name_column(ctx: _Context, stream: _Stream) -> int | None:
    """Column index of the stream's name attribute, used to keep the query
    object out of its own candidate set."""
    if stream.source is None:
        return None
    try:
        rel = ctx.db.relation(stream.source)
    except UnknownRelation:
        return None
    name_attr = rel.name_attr
    if name_attr is None:
        return None
    index = _index_of(stream.schema)
    return index.get(name_attr.name)


def _sweep_period(op: KNearest, q: MovingPoint | None) -> Period:
    if op.period is not None:
        return op.period
    node = op.child
    while isinstance(node, Filter):
        if isinstance(node.predicate, DeftimeIntersects):
            return node.predicate.period
        node = node.child
    if q is not None and q.units:
        spans = deftime(q)
        return Period(spans[0].start, spans[-1].end)
    return Period(0, 1)


def _stationary(point: Point, period: Period) -> MovingPoint:
    return MovingPoint((UnitPoint(period, point, point),))


def _merge_adjacent_intervals(items: list, q: MovingPoint,
                              xs, ys, ids) -> list:
    """Fuse per-object intervals that meet end-to-start (across sweep pieces);
    rank and distance are recomputed exactly at the merged midpoint."""
    import numpy as np

    from ..geo.knearest import NearestInterval

    by_object: dict[int, list] = {}
    for iv in items:
        by_object.setdefault(iv.object_id, []).append(iv)

    out: list = []
    for cid, ivs in by_object.items():
        ivs.sort(key=lambda iv: iv.start)
        chain = [ivs[0]]
        runs = []
        for iv in ivs[1:]:
            if abs(iv.start - chain[-1].end) <= 1e-9 :
                chain.append(iv)
            else:
                runs.append(chain)
                chain = [iv]
        runs.append(chain)
        for chain in runs:
            if len(chain) == 1:
                out.append(chain[0])
                continue
            start, end = chain[0].start, chain[-1].end
            mid = (start + end) / 2
            qp = mpoint_at(q, mid)
            pos = int(np.nonzero(ids == cid)[0][0])
            dx, dy = xs - qp.x, ys - qp.y
            dists = np.hypot(dx, dy)
            d_c = float(dists[pos])
            rank = int(np.sum(dists < d_c) + np.sum((dists == d_c) & (ids < cid))) + 1
            out.append(NearestInterval(cid, start, end, rank, d_c))
    out.sort(key=lambda iv: (iv.start, iv.rank, iv.object_id))
    return out


def _knearest_static_fast(statics: list[tuple[int, Point]], q: MovingPoint,
                          period: Period, k: int) -> list:
    """Exact sweep over stationary candidates, pruned piecewise.

    The query trajectory is cut into short pieces; within a piece the k-th
    nearest distance can vary by at most the piece's path length, so only
    candidates within (endpoint k-th distance + path length) of the piece
    segment can ever reach the top k there. Each piece sweeps its survivors
    only, then per-object intervals are stitched back together.
    """
    import numpy as np

    from ..geo import atperiods

    q_clip = atperiods(q, period)
    if not q_clip.units or not statics:
        return []
    ids = np.array([cid for cid, _pt in statics], dtype=np.int64)
    xs = np.array([pt.x for _cid, pt in statics])
    ys = np.array([pt.y for _cid, pt in statics])
    points = {cid: pt for cid, pt in statics}

    target_len = 600.0  # meters of query path per pruning piece
    collected: list = []
    for unit in q_clip.units:
        length = math.hypot(unit.p1.x - unit.p0.x, unit.p1.y - unit.p0.y)
        n_pieces = max(1, math.ceil(length / target_len))
        duration = unit.period.duration_ms
        n_pieces = min(n_pieces, duration)  # keep integer-ms pieces non-empty
        bounds = [unit.period.start + (duration * i) // n_pieces for i in range(n_pieces + 1)]
        for lo, hi in zip(bounds, bounds[1:]):
            if lo >= hi:
                continue
            piece = Period(lo, hi)
            p0 = unit.position_at(lo)
            frac = (hi - unit.period.start) / duration
            p1 = Point(unit.p0.x + frac * (unit.p1.x - unit.p0.x),
                       unit.p0.y + frac * (unit.p1.y - unit.p0.y))
            kth = math.inf
            for ex, ey in ((p0.x, p0.y), (p1.x, p1.y)):
                d = np.hypot(xs - ex, ys - ey)
                kth = min(kth, float(np.partition(d, min(k, len(d)) - 1)[min(k, len(d)) - 1]))
            bound = kth + math.hypot(p1.x - p0.x, p1.y - p0.y) + 1e-9
            seg_d = _segment_distances(xs, ys, p0, p1)
            keep = np.nonzero(seg_d <= bound)[0]
            piece_candidates = [(int(ids[i]), _stationary(points[int(ids[i])], piece))
                                for i in keep]
            collected.extend(knearest_sweep(piece_candidates, atperiods(q, piece), piece, k))
    return _merge_adjacent_intervals(collected, q_clip, xs, ys, ids)


def _segment_distances(xs, ys, a: Point, b: Point):
    import numpy as np

    dx, dy = b.x - a.x, b.y - a.y
    sq = dx * dx + dy * dy
    if sq == 0.0:
        return np.hypot(xs - a.x, ys - a.y)
    t = np.clip(((xs - a.x) * dx + (ys - a.y) * dy) / sq, 0.0, 1.0)
    return np.hypot(xs - (a.x + t * dx), ys - (a.y + t * dy))


def _run_knearest(op: KNearest, ctx: _Context) -> _Stream:
    child = _run(op.child, ctx)
    rows = list(child.rows)
    index = _index_of(child.schema)

    entity = _resolve_query_entity(ctx, op.obj)
    if getattr(entity, "trajectory", None) is not None:
        q = entity.trajectory
        period = _sweep_period(op, q)
    else:
        period = _sweep_period(op, None)
        q = _stationary(representative_point(entity.geometry), period)

    if op.attr not in index:
        raise UnknownRelation(f"no attribute {op.attr!r} in knearest input")
    col = index[op.attr]
    kind = child.schema[col].kind
    name_col = _name_column(ctx, child)
    obj_name = entity.surface_name.lower()

    statics: list[tuple[int, Point]] = []
    candidates: list[tuple[int, MovingPoint]] = []
    by_candidate: dict[int, tuple] = {}
    for tid, row in rows:
        if name_col is not None and str(row[name_col]).lower() == obj_name:
            continue  # the query object is not its own neighbor
        value = row[col]
        cid = tid if tid is not None else len(by_candidate)
        by_candidate[cid] = row
        if kind == "mpoint":
            candidates.append((cid, value))
        else:
            pt = value if isinstance(value, Point) else representative_point(value)
            statics.append((cid, pt))

    if statics and not candidates and op.k >= 1:
        # all-stationary candidates: pruned piecewise sweep, exact and fast
        intervals = _knearest_static_fast(statics, q, period, op.k)
    else:
        candidates.extend((cid, _stationary(pt, period)) for cid, pt in statics)
        candidates.sort(key=lambda c: c[0])
        intervals = knearest_sweep(candidates, q, period, op.k)

    schema = child.schema + (AttributeDef("knn_rank", "int"), AttributeDef("knn_start", "real"),
                             AttributeDef("knn_end", "real"), AttributeDef("knn_dist", "real"))
    out_rows: list[tuple[int | None, tuple]] = []
    for iv in intervals:
        row = by_candidate[iv.object_id]
        out_rows.append((iv.object_id, row + (iv.rank, iv.start, iv.end, iv.dist_at_mid)))
        mid = iv.midpoint
        qp = mpoint_at(q, mid)
        value = row[col]
        np_ = mpoint_at(value, mid) if isinstance(value, MovingPoint) else (
            value if isinstance(value, Point) else representative_point(value))
        if qp is not None and np_ is not None:
            ctx.links.append(KnnLink(qp, np_, iv.rank, iv.dist_at_mid))
    return _Stream(schema, child.source, out_rows)


def _join_predicate_holds(predname: str, lval, rval) -> bool:
    if predname == "intersects":
        return intersects(lval, rval)
    if predname == "contains":
        return _contains_value(rval, lval)
    if predname.startswith("dist<="):
        return geometry_distance(lval, rval) <= float(predname[6:])
    raise IncompatibleOperands(f"unknown join predicate {predname!r}")


def _run_join(op: SpatialJoin, ctx: _Context) -> _Stream:
    left = _run(op.left, ctx)
    right = _run(op.right, ctx)
    lindex, rindex = _index_of(left.schema), _index_of(right.schema)
    if op.left_attr not in lindex:
        raise UnknownRelation(f"no attribute {op.left_attr!r} in left join input")
    if op.right_attr not in rindex:
        raise UnknownRelation(f"no attribute {op.right_attr!r} in right join input")
    lcol, rcol = lindex[op.left_attr], rindex[op.right_attr]

    lprefix = (left.source or "left") + "_"
    rprefix = (right.source or "right") + "_"
    schema = tuple(AttributeDef(lprefix + a.name, a.kind) for a in left.schema) + \
        tuple(AttributeDef(rprefix + a.name, a.kind) for a in right.schema)

    right_rows = list(right.rows)

    def rows() -> Iterator[tuple[int | None, tuple]]:
        for _ltid, lrow in left.rows:
            lval = lrow[lcol]
            for _rtid, rrow in right_rows:
                if _join_predicate_holds(op.predicate, lval, rrow[rcol]):
                    yield None, lrow + rrow

    return _Stream(schema, None, rows())


def _run_similarity(op: SimilarityOp, ctx: _Context) -> _Stream:
    child = _run(op.child, ctx)
    index = _index_of(child.schema)
    if op.attr not in index:
        raise UnknownRelation(f"no attribute {op.attr!r} in similarity input")
    col = index[op.attr]

    entity = _resolve_query_entity(ctx, op.obj)
    q = getattr(entity, "trajectory", None)
    if q is None:
        raise IncompatibleOperands(f"object {op.obj!r} has no trajectory")
    name_col = _name_column(ctx, child)
    obj_name = entity.surface_name.lower()

    scored: list[tuple[float, int, tuple]] = []
    for tid, row in child.rows:
        if name_col is not None and str(row[name_col]).lower() == obj_name:
            continue
        dist = sync_distance(q, row[col])
        if math.isinf(dist):
            continue
        scored.append((dist, tid if tid is not None else len(scored), row))
    scored.sort(key=lambda s: (s[0], s[1]))

    schema = child.schema + (AttributeDef("sim_dist", "real"),)
    out = [(tid, row + (dist,)) for dist, tid, row in scored[:op.n]]
    return _Stream(schema, child.source, out)


def run_plan(plan: PhysicalPlan, db: Database) -> ResultSet:
    ctx = _Context(db)
    root = plan.root
    try:
        if isinstance(root, Consume):
            stream = _run(root.child, ctx)
            rows = [row for _tid, row in stream.rows]
            return ResultSet(stream.schema, rows, ctx.links or None)
        if isinstance(root, Count):
            stream = _run(root.child, ctx)
            n = sum(1 for _ in stream.rows)
            return ResultSet((AttributeDef("count", "int"),), [(n,)])
        if isinstance(root, Aggregate):
            stream = _run(root.child, ctx)
            index = _index_of(stream.schema)
            if root.attr not in index:
                raise UnknownRelation(f"no attribute {root.attr!r} to aggregate")
            col = index[root.attr]
            values = [row[col] for _tid, row in stream.rows]
            schema = (AttributeDef(f"{root.fn}_{root.attr}", "real"),)
            if not values:
                return ResultSet(schema, [])
            if root.fn == "avg":
                return ResultSet(schema, [(sum(values) / len(values),)])
            if root.fn == "max":
                return ResultSet(schema, [(max(values),)])
            if root.fn == "min":
                return ResultSet(schema, [(min(values),)])
            raise IncompatibleOperands(f"unknown aggregate {root.fn!r}")
    except NlstplanError as exc:
        raise _fail(root, exc) from exc
    except (KeyError, IndexError, TypeError) as exc:
        raise _fail(root, exc) from exc
    raise ExecError(type(root).__name__.lower(), ValueError("plan root must be a terminal"))


def execute(plan: PhysicalPlan, db: Database) -> tuple[ResultSet, float]:
    """Run the plan; returns the result set and wall-clock execution ms."""
    t0 = time.perf_counter()
    result = run_plan(plan, db)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return result, elapsed_ms
