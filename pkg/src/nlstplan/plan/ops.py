"""Physical operator trees and filter predicate expressions.

All nodes are frozen dataclasses, so plans compare structurally; the plan
text round-trip (render then parse) relies on that equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..geo import Geometry, Period, Rect

# ---------------------------------------------------------------- predicates


@dataclass(frozen=True)
class AttrRef:
    name: str


@dataclass(frozen=True)
class GeomLit:
    value: Geometry


@dataclass(frozen=True)
class NumLit:
    value: float


PredArg = AttrRef | GeomLit


@dataclass(frozen=True)
class Contains:
    """contains(a, b): does a (region side) contain b."""

    a: PredArg
    b: PredArg


@dataclass(frozen=True)
class Intersects:
    a: PredArg
    b: PredArg


@dataclass(frozen=True)
class DeftimeIntersects:
    """deftime(.attr) intersects [start, end)"""

    attr: str
    period: Period


@dataclass(frozen=True)
class DistanceLe:
    a: PredArg
    b: PredArg
    limit: float


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = Contains | Intersects | DeftimeIntersects | DistanceLe | And | Or

# ------------------------------------------------------------------ operators


@dataclass(frozen=True)
class Feed:
    relation: str


@dataclass(frozen=True)
class WindowIntersects:
    index_id: str
    relation: str
    window: Rect


@dataclass(frozen=True)
class Filter:
    predicate: Predicate
    child: "PhysicalOp"


@dataclass(frozen=True)
class KNearest:
    attr: str
    obj: str
    k: int
    child: "PhysicalOp"
    period: Period | None = None  # only for static-candidate sweeps


@dataclass(frozen=True)
class SpatialJoin:
    left_attr: str
    right_attr: str
    predicate: str  # "intersects" | "contains" | "dist<=<num>"
    left: "PhysicalOp"
    right: "PhysicalOp"


@dataclass(frozen=True)
class SimilarityOp:
    attr: str
    obj: str
    n: int
    child: "PhysicalOp"


@dataclass(frozen=True)
class Project:
    attrs: tuple[str, ...]
    child: "PhysicalOp"


@dataclass(frozen=True)
class Consume:
    child: "PhysicalOp"


@dataclass(frozen=True)
class Count:
    child: "PhysicalOp"


@dataclass(frozen=True)
class Aggregate:
    fn: str  # avg | max | min
    attr: str
    child: "PhysicalOp"


PhysicalOp = (Feed | WindowIntersects | Filter | KNearest | SpatialJoin
              | SimilarityOp | Project | Consume | Count | Aggregate)

TERMINALS = (Consume, Count, Aggregate)
SOURCES = (Feed, WindowIntersects)


@dataclass(frozen=True)
class PhysicalPlan:
    root: PhysicalOp
    source_relations: tuple[str, ...]
    uses_index: bool
    warnings: tuple[str, ...] = field(default=(), compare=False)


def children_of(op: PhysicalOp) -> tuple[PhysicalOp, ...]:
    if isinstance(op, SpatialJoin):
        return (op.left, op.right)
    if isinstance(op, SOURCES):
        return ()
    return (op.child,)


def walk(op: PhysicalOp):
    yield op
    for child in children_of(op):
        yield from walk(child)


def plan_of(root: PhysicalOp, warnings: tuple[str, ...] = ()) -> PhysicalPlan:
    """Wrap a finished operator tree, deriving sources and index usage."""
    sources = []
    uses_index = False
    for node in walk(root):
        if isinstance(node, Feed):
            sources.append(node.relation)
        elif isinstance(node, WindowIntersects):
            sources.append(node.relation)
            uses_index = True
    return PhysicalPlan(root, tuple(sources), uses_index, warnings)


def to_tree(op: PhysicalOp) -> dict:
    """Nested JSON view of the operator tree (for the UI and the service)."""
    from .text import render_predicate  # local import to avoid a cycle

    node: dict = {"kind": type(op).__name__.replace("Op", "").lower()}
    if isinstance(op, Feed):
        node["relation"] = op.relation
    elif isinstance(op, WindowIntersects):
        node.update(index=op.index_id, relation=op.relation,
                    window=[op.window.xmin, op.window.ymin, op.window.xmax, op.window.ymax])
    elif isinstance(op, Filter):
        node["predicate"] = render_predicate(op.predicate)
    elif isinstance(op, KNearest):
        node.update(attr=op.attr, object=op.obj, k=op.k)
    elif isinstance(op, SpatialJoin):
        node.update(left_attr=op.left_attr, right_attr=op.right_attr, predicate=op.predicate)
    elif isinstance(op, SimilarityOp):
        node.update(attr=op.attr, object=op.obj, n=op.n)
    elif isinstance(op, Project):
        node["attrs"] = list(op.attrs)
    elif isinstance(op, Aggregate):
        node.update(fn=op.fn, attr=op.attr)
    node["children"] = [to_tree(c) for c in children_of(op)]
    return node
