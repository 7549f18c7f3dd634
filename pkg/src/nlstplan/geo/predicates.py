"""Geometric and temporal predicates over the core value types.

Conventions fixed here once for the whole engine: points on a region
boundary count as inside, and period intersection is half-open.
"""

from __future__ import annotations

import math

from ..errors import IncompatibleOperands
from .types import Geometry, Line, MovingPoint, Period, Point, Rect, Region

_EPS = 1e-9


def distance(a: Point, b: Point) -> float:
    """Euclidean distance in plane units."""
    return math.hypot(a.x - b.x, a.y - b.y)


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
    if abs(cross) > _EPS * max(1.0, abs(b.x - a.x) + abs(b.y - a.y)):
        return False
    dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)
    if dot < -_EPS:
        return False
    sq_len = (b.x - a.x) ** 2 + (b.y - a.y) ** 2
    return dot <= sq_len + _EPS


def _ray_crossings(p: Point, ring: tuple[Point, ...]) -> int:
    """Crossings of the ray from p toward +x with the ring edges."""
    count = 0
    for a, b in zip(ring, ring[1:]):
        if (a.y > p.y) != (b.y > p.y):
            x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if x_at > p.x:
                count += 1
    return count


def _point_in_ring(p: Point, ring: tuple[Point, ...], boundary_inside: bool) -> bool:
    for a, b in zip(ring, ring[1:]):
        if _on_segment(p, a, b):
            return boundary_inside
    return _ray_crossings(p, ring) % 2 == 1


def contains(r: Region, p: Point) -> bool:
    """True iff p lies in the outer ring and outside every hole.

    Boundary points (outer or hole boundary) count as inside.
    """
    box = r.bbox
    if not (box.xmin <= p.x <= box.xmax and box.ymin <= p.y <= box.ymax):
        return False
    for a, b in zip(r.outer, r.outer[1:]):
        if _on_segment(p, a, b):
            return True
    if _ray_crossings(p, r.outer) % 2 == 0:
        return False
    for hole in r.holes:
        # Hole boundary still belongs to the region.
        on_hole_boundary = any(_on_segment(p, a, b) for a, b in zip(hole, hole[1:]))
        if on_hole_boundary:
            return True
        if _ray_crossings(p, hole) % 2 == 1:
            return False
    return True


def _segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool:
    def orient(a: Point, b: Point, c: Point) -> float:
        return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)

    d1, d2 = orient(b1, b2, a1), orient(b1, b2, a2)
    d3, d4 = orient(a1, a2, b1), orient(a1, a2, b2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    # Touching / collinear cases: an endpoint lying on the other segment.
    return (_on_segment(a1, b1, b2) or _on_segment(a2, b1, b2)
            or _on_segment(b1, a1, a2) or _on_segment(b2, a1, a2))


def _segments(g: Line | Region) -> list[tuple[Point, Point]]:
    if isinstance(g, Line):
        return list(g.segments)
    out = []
    for ring in g.rings:
        out.extend(zip(ring, ring[1:]))
    return out


def _line_intersects_region(line: Line, region: Region) -> bool:
    if not line.bbox.intersects(region.bbox):
        return False
    for a, b in line.segments:
        if contains(region, a) or contains(region, b):
            return True
    region_segs = _segments(region)
    for a, b in line.segments:
        for c, d in region_segs:
            if _segments_intersect(a, b, c, d):
                return True
    return False


def _region_intersects_region(r1: Region, r2: Region) -> bool:
    if not r1.bbox.intersects(r2.bbox):
        return False
    for a, b in _segments(r1):
        for c, d in _segments(r2):
            if _segments_intersect(a, b, c, d):
                return True
    return contains(r2, r1.outer[0]) or contains(r1, r2.outer[0])


def intersects(a, b) -> bool:
    """Shared-point test for periods and geometry pairs.

    Periods use half-open semantics: [2,5) and [5,8) do not intersect.
    """
    if isinstance(a, Period) and isinstance(b, Period):
        return a.intersects(b)
    if isinstance(a, Point) and isinstance(b, Point):
        return a == b
    if isinstance(a, Point) and isinstance(b, Region):
        return contains(b, a)
    if isinstance(a, Region) and isinstance(b, Point):
        return contains(a, b)
    if isinstance(a, Line) and isinstance(b, Line):
        if not a.bbox.intersects(b.bbox):
            return False
        return any(_segments_intersect(s1, e1, s2, e2)
                   for s1, e1 in a.segments for s2, e2 in b.segments)
    if isinstance(a, Line) and isinstance(b, Region):
        return _line_intersects_region(a, b)
    if isinstance(a, Region) and isinstance(b, Line):
        return _line_intersects_region(b, a)
    if isinstance(a, Region) and isinstance(b, Region):
        return _region_intersects_region(a, b)
    raise IncompatibleOperands(f"intersects not defined for {type(a).__name__} x {type(b).__name__}")


def _dist_point_segment(p: Point, a: Point, b: Point) -> float:
    dx, dy = b.x - a.x, b.y - a.y
    sq = dx * dx + dy * dy
    if sq == 0.0:
        return distance(p, a)
    t = max(0.0, min(1.0, ((p.x - a.x) * dx + (p.y - a.y) * dy) / sq))
    return math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))


def geometry_distance(a: Geometry, b: Geometry) -> float:
    """Minimum Euclidean distance between two geometries (0 when they meet)."""
    if isinstance(a, Point) and isinstance(b, Point):
        return distance(a, b)
    if isinstance(a, Point):
        a, b = b, a
    if isinstance(b, Point):
        if isinstance(a, Region) and contains(a, b):
            return 0.0
        return min(_dist_point_segment(b, s, e) for s, e in _segments(a))
    # line/region x line/region: check overlap first, then segment pairs
    try:
        if intersects(a, b):
            return 0.0
    except IncompatibleOperands:
        pass
    best = math.inf
    for s1, e1 in _segments(a):
        for s2, e2 in _segments(b):
            best = min(best, _dist_point_segment(s1, s2, e2), _dist_point_segment(e1, s2, e2),
                       _dist_point_segment(s2, s1, e1), _dist_point_segment(e2, s1, e1))
    return best


def mbr(g: Geometry | MovingPoint) -> Rect:
    """Minimum bounding rectangle of a geometry or trajectory."""
    if isinstance(g, Point):
        return Rect(g.x, g.y, g.x, g.y)
    if isinstance(g, (Line, Region)):
        return g.bbox
    if isinstance(g, MovingPoint):
        pts = [p for u in g.units for p in (u.p0, u.p1)]
        if not pts:
            raise ValueError("empty moving point has no bounding rectangle")
    else:
        raise IncompatibleOperands(f"mbr not defined for {type(g).__name__}")
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    return Rect(min(xs), min(ys), max(xs), max(ys))


def representative_point(g: Geometry) -> Point:
    """A stable anchor point: the point itself, a polyline midpoint, or the
    outer-ring vertex centroid of a region."""
    if isinstance(g, Point):
        return g
    if isinstance(g, Line):
        segs = g.segments
        mid = segs[len(segs) // 2]
        return Point((mid[0].x + mid[1].x) / 2, (mid[0].y + mid[1].y) / 2)
    verts = g.outer[:-1]
    return Point(sum(p.x for p in verts) / len(verts), sum(p.y for p in verts) / len(verts))
