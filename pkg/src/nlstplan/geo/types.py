"""Spatial and temporal value types.

Coordinates are planar (datasets are pre-projected, 1 unit = 1 meter);
time is integer milliseconds since the dataset epoch (day 0, 00:00).
All values are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Line:
    """Polyline stored as an ordered tuple of (start, end) segments."""

    segments: tuple[tuple[Point, Point], ...]

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ValueError("line needs at least one segment")
        for a, b in self.segments:
            if a == b:
                raise ValueError(f"zero-length segment at {a}")

    @cached_property
    def bbox(self) -> "Rect":
        pts = [p for seg in self.segments for p in seg]
        return Rect(min(p.x for p in pts), min(p.y for p in pts),
                    max(p.x for p in pts), max(p.y for p in pts))


@dataclass(frozen=True)
class Region:
    """Polygon: first ring is the outer boundary, the rest are holes.

    Rings are closed (first vertex equals last vertex).
    """

    rings: tuple[tuple[Point, ...], ...]

    def __post_init__(self):
        if len(self.rings) == 0:
            raise ValueError("region needs at least one ring")
        for ring in self.rings:
            if len(ring) < 4 or ring[0] != ring[-1]:
                raise ValueError("ring must be closed with at least 3 distinct vertices")
            if len(set(ring[:-1])) < 3:
                raise ValueError("ring must have at least 3 distinct vertices")
        if _ring_self_intersects(self.rings[0]):
            raise ValueError("outer ring is self-intersecting")

    @property
    def outer(self) -> tuple[Point, ...]:
        return self.rings[0]

    @property
    def holes(self) -> tuple[tuple[Point, ...], ...]:
        return self.rings[1:]

    @cached_property
    def bbox(self) -> "Rect":
        return Rect(min(p.x for p in self.outer), min(p.y for p in self.outer),
                    max(p.x for p in self.outer), max(p.y for p in self.outer))


def _ring_self_intersects(ring: tuple[Point, ...]) -> bool:
    # Proper crossing between non-adjacent edges; shared endpoints are fine.
    n = len(ring) - 1
    for i in range(n):
        a1, a2 = ring[i], ring[i + 1]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            b1, b2 = ring[j], ring[j + 1]
            if _segments_cross_properly(a1, a2, b1, b2):
                return True
    return False


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _segments_cross_properly(a1: Point, a2: Point, b1: Point, b2: Point) -> bool:
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


InstantMs = int  # integer milliseconds since the dataset epoch, >= 0


@dataclass(frozen=True, slots=True)
class Period:
    """Half-open time interval [start, end) in epoch milliseconds."""

    start: InstantMs
    end: InstantMs

    def __post_init__(self):
        if self.start < 0:
            raise ValueError("period start must be >= 0")
        if self.start >= self.end:
            raise ValueError(f"period start must precede end, got [{self.start}, {self.end})")

    def contains_instant(self, t: float) -> bool:
        return self.start <= t < self.end

    def intersects(self, other: "Period") -> bool:
        return self.start < other.end and other.start < self.end

    def intersection(self, other: "Period") -> "Period | None":
        s, e = max(self.start, other.start), min(self.end, other.end)
        return Period(s, e) if s < e else None

    @property
    def duration_ms(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class UnitPoint:
    """Linear motion from p0 at period.start to p1 at period.end."""

    period: Period
    p0: Point
    p1: Point

    def position_at(self, t: float) -> Point:
        """Interpolated position; t must lie in [start, end)."""
        frac = (t - self.period.start) / (self.period.end - self.period.start)
        return Point(self.p0.x + frac * (self.p1.x - self.p0.x),
                     self.p0.y + frac * (self.p1.y - self.p0.y))


@dataclass(frozen=True)
class MovingPoint:
    """Trajectory: units sorted by start time with pairwise disjoint periods."""

    units: tuple[UnitPoint, ...]

    def __post_init__(self):
        for prev, cur in zip(self.units, self.units[1:]):
            if prev.period.end > cur.period.start:
                raise ValueError("moving point units must be sorted and disjoint")

    def __len__(self) -> int:
        return len(self.units)


@dataclass(frozen=True, slots=True)
class Rect:
    """Minimum bounding rectangle (closed on all sides)."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError(f"degenerate rect ({self.xmin},{self.ymin},{self.xmax},{self.ymax})")

    def intersects(self, other: "Rect") -> bool:
        return (self.xmin <= other.xmax and other.xmin <= self.xmax
                and self.ymin <= other.ymax and other.ymin <= self.ymax)

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.xmin, other.xmin), min(self.ymin, other.ymin),
                    max(self.xmax, other.xmax), max(self.ymax, other.ymax))

    def expand(self, d: float) -> "Rect":
        return Rect(self.xmin - d, self.ymin - d, self.xmax + d, self.ymax + d)


Geometry = Point | Line | Region


def mpoint_at(m: MovingPoint, t: float) -> Point | None:
    """Position of m at instant t, or None when no unit covers t."""
    units = m.units
    lo, hi = 0, len(units)
    while lo < hi:
        mid = (lo + hi) // 2
        period = units[mid].period
        if period.end <= t:
            lo = mid + 1
        elif period.start > t:
            hi = mid
        else:
            return units[mid].position_at(t)
    return None


def deftime(m: MovingPoint) -> list[Period]:
    """Minimal list of maximal periods covered by m's units."""
    out: list[Period] = []
    for unit in m.units:
        if out and out[-1].end == unit.period.start:
            out[-1] = Period(out[-1].start, unit.period.end)
        else:
            out.append(unit.period)
    return out


def atperiods(m: MovingPoint, p: Period) -> MovingPoint:
    """Restriction of m to p, clipping units with interpolated endpoints."""
    clipped: list[UnitPoint] = []
    for unit in m.units:
        inter = unit.period.intersection(p)
        if inter is None:
            continue
        if inter == unit.period:
            clipped.append(unit)
            continue
        p0 = unit.position_at(inter.start)
        # position_at uses the half-open convention, but the clipped end value
        # is the limit from the left, which the same interpolation gives.
        frac = (inter.end - unit.period.start) / unit.period.duration_ms
        p1 = Point(unit.p0.x + frac * (unit.p1.x - unit.p0.x),
                   unit.p0.y + frac * (unit.p1.y - unit.p0.y))
        clipped.append(UnitPoint(inter, p0, p1))
    return MovingPoint(tuple(clipped))
