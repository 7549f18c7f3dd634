"""Spatial/temporal types, predicates, R-tree index, and the kNN sweep."""

from .knearest import NearestInterval, knearest_sweep, sync_distance
from .predicates import (
    contains,
    distance,
    geometry_distance,
    intersects,
    mbr,
    representative_point,
)
from .rtree import RTree, rtree_bulk_load
from .types import (
    Geometry,
    InstantMs,
    Line,
    MovingPoint,
    Period,
    Point,
    Rect,
    Region,
    UnitPoint,
    atperiods,
    deftime,
    mpoint_at,
)
from .wkt import from_wkt, to_wkt

__all__ = [
    "Geometry", "InstantMs", "Line", "MovingPoint", "NearestInterval", "Period",
    "Point", "RTree", "Rect", "Region", "UnitPoint", "atperiods", "contains",
    "deftime", "distance", "from_wkt", "geometry_distance", "intersects",
    "knearest_sweep", "mbr", "mpoint_at", "representative_point",
    "rtree_bulk_load", "sync_distance", "to_wkt",
]
