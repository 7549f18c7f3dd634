"""Cost-based plan choice: filter-rate estimation, indexed-candidate
enumeration, and sampled-execution timing.

The cost model is empirical: every candidate runs on a small per-relation
sample and the measured time is extrapolated linearly by the sample
fraction. Indexed variants are only enumerated when the predicate retains
a small fraction of the relation, which is when a window scan pays off.
"""

from __future__ import annotations

import math
import random
import time
import zlib
from dataclasses import dataclass

from .catalog import Database, Relation, _build_indexes
from .geo import Rect, mbr
from .plan.exec import eval_predicate, run_plan
from .plan.ops import (
    AttrRef,
    Contains,
    DistanceLe,
    Feed,
    Filter,
    GeomLit,
    Intersects,
    PhysicalOp,
    PhysicalPlan,
    Predicate,
    SpatialJoin,
    WindowIntersects,
    children_of,
    plan_of,
)

SELECTIVITY_THRESHOLD = 0.2
MIN_SAMPLE_TUPLES = 50
TIE_MARGIN = 0.05


@dataclass(frozen=True)
class CandidateSet:
    baseline: PhysicalPlan
    indexed: tuple[PhysicalPlan, ...]

    def all_plans(self) -> tuple[PhysicalPlan, ...]:
        return (self.baseline, *self.indexed)


@dataclass
class CostEstimate:
    plan: PhysicalPlan
    sampled_ms: float
    sample_fraction: float
    chosen: bool = False

    @property
    def predicted_ms(self) -> float:
        return self.sampled_ms / self.sample_fraction


def estimate_filter_rate(pred: Predicate, rel: Relation, sample_size: int,
                         seed: int) -> float:
    """Fraction of sampled tuples satisfying pred; exact when the relation
    is no larger than the sample."""
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    n = len(rel.tuples)
    if n == 0:
        return 0.0
    index = {a.name: i for i, a in enumerate(rel.attributes)}
    if n <= sample_size:
        chosen = rel.tuples
    else:
        rng = random.Random(seed)
        chosen = [rel.tuples[i] for i in sorted(rng.sample(range(n), sample_size))]
    matches = sum(1 for row in chosen if eval_predicate(pred, row, index))
    return matches / len(chosen)


def _window_for(pred: Predicate) -> Rect | None:
    """MBR a window scan must cover so the residual filter stays exact."""
    if isinstance(pred, (Contains, Intersects)):
        for a, b in ((pred.a, pred.b), (pred.b, pred.a)):
            if isinstance(a, AttrRef) and isinstance(b, GeomLit):
                return mbr(b.value)
    if isinstance(pred, DistanceLe):
        for a, b in ((pred.a, pred.b), (pred.b, pred.a)):
            if isinstance(a, AttrRef) and isinstance(b, GeomLit):
                return mbr(b.value).expand(pred.limit)
    return None


def _pred_attr(pred: Predicate) -> str | None:
    for arg in (getattr(pred, "a", None), getattr(pred, "b", None)):
        if isinstance(arg, AttrRef):
            return arg.name
    return None


def _indexed_variants(op: PhysicalOp, db: Database) -> list[PhysicalOp]:
    """Rewrites of one operator subtree: each Filter-over-Feed with a spatial
    predicate on an indexed attribute becomes windowintersects + residual."""
    variants: list[PhysicalOp] = []
    if isinstance(op, Filter) and isinstance(op.child, Feed):
        rel = db.relation(op.child.relation)
        attr = _pred_attr(op.predicate)
        window = _window_for(op.predicate)
        if attr is not None and window is not None and attr in rel.indexes:
            source = WindowIntersects(f"{rel.name}_{attr}_rtree", rel.name, window)
            variants.append(Filter(op.predicate, source))

    # recurse: one variant per rewritten child position
    kids = children_of(op)
    for pos, child in enumerate(kids):
        for new_child in _indexed_variants(child, db):
            if isinstance(op, SpatialJoin):
                left, right = kids
                if pos == 0:
                    variants.append(SpatialJoin(op.left_attr, op.right_attr, op.predicate,
                                                new_child, right))
                else:
                    variants.append(SpatialJoin(op.left_attr, op.right_attr, op.predicate,
                                                left, new_child))
            else:
                variants.append(type(op)(**{**op.__dict__, "child": new_child}))
    return variants


def enumerate_candidates(baseline: PhysicalPlan, db: Database,
                         selectivity: float) -> CandidateSet:
    """Indexed rewrites of the baseline, one per applicable index; empty when
    the predicate keeps too much of the relation for an index to help."""
    if selectivity > SELECTIVITY_THRESHOLD:
        return CandidateSet(baseline, ())
    indexed = tuple(plan_of(root, baseline.warnings)
                    for root in _indexed_variants(baseline.root, db))
    return CandidateSet(baseline, indexed)


def _sampled_database(db: Database, fraction: float, seed: int) -> Database:
    relations = {}
    for name, rel in db.relations.items():
        n = len(rel.tuples)
        take = min(n, max(MIN_SAMPLE_TUPLES, math.ceil(fraction * n)))
        if take >= n:
            tuples = list(rel.tuples)
        else:
            rng = random.Random(seed ^ zlib.crc32(name.encode()))
            tuples = [rel.tuples[i] for i in sorted(rng.sample(range(n), take))]
        sampled = Relation(rel.name, rel.attributes, tuples)
        _build_indexes(sampled)
        relations[name] = sampled
    out = Database(name=db.name, epoch=db.epoch, relations=relations,
                   base_names=list(db.base_names), kb=db.kb,
                   ut_alias=dict(db.ut_alias))
    return out


def choose_plan(cands: CandidateSet, db: Database, sample_fraction: float,
                seed: int) -> tuple[PhysicalPlan, list[CostEstimate]]:
    """Time every candidate on sampled data, extrapolate linearly, and pick
    the cheapest (prefer the indexed plan on a tie within 5%)."""
    if not 0 < sample_fraction <= 1:
        raise ValueError("sample_fraction must be in (0, 1]")
    sample_db = _sampled_database(db, sample_fraction, seed)
    estimates: list[CostEstimate] = []
    for plan in cands.all_plans():
        t0 = time.perf_counter()
        run_plan(plan, sample_db)
        sampled_ms = (time.perf_counter() - t0) * 1000.0
        estimates.append(CostEstimate(plan, sampled_ms, sample_fraction))

    best = min(estimates, key=lambda e: e.predicted_ms)
    chosen = best
    for est in estimates:
        if est.plan.uses_index and not best.plan.uses_index:
            if est.predicted_ms <= best.predicted_ms * (1 + TIE_MARGIN):
                chosen = est
                break
    chosen.chosen = True
    return chosen.plan, estimates
