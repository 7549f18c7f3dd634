"""Physical plans: operator trees, canonical text, mapping rules, execution."""

from .exec import KnnLink, ResultSet, execute, run_plan
from .mapping import map_query
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
    GeomLit,
    Intersects,
    KNearest,
    NumLit,
    Or,
    PhysicalOp,
    PhysicalPlan,
    Predicate,
    Project,
    SimilarityOp,
    SpatialJoin,
    WindowIntersects,
    children_of,
    plan_of,
    to_tree,
    walk,
)
from .text import parse_plan, render_plan, render_predicate

__all__ = [
    "Aggregate", "And", "AttrRef", "Consume", "Contains", "Count",
    "DeftimeIntersects", "DistanceLe", "Feed", "Filter", "GeomLit",
    "Intersects", "KNearest", "KnnLink", "NumLit", "Or", "PhysicalOp",
    "PhysicalPlan", "Predicate", "Project", "ResultSet", "SimilarityOp",
    "SpatialJoin", "WindowIntersects", "children_of", "execute", "map_query",
    "parse_plan", "plan_of", "render_plan", "render_predicate", "run_plan",
    "to_tree", "walk",
]
