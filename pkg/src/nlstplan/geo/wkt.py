"""Text encodings for geometry and trajectory values.

WKT subset: POINT (x y), LINESTRING (x y, ...), POLYGON ((ring), (hole)...).
Trajectories: MPOINT ((t0 t1 x0 y0 x1 y1), ...) with times in integer ms.
"""

from __future__ import annotations

import re

from ..errors import BadGeometry
from .types import Geometry, Line, MovingPoint, Period, Point, Region, UnitPoint


def _fmt(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def to_wkt(g: Geometry | MovingPoint) -> str:
    if isinstance(g, Point):
        return f"POINT ({_fmt(g.x)} {_fmt(g.y)})"
    if isinstance(g, Line):
        pts = [g.segments[0][0]] + [seg[1] for seg in g.segments]
        body = ", ".join(f"{_fmt(p.x)} {_fmt(p.y)}" for p in pts)
        return f"LINESTRING ({body})"
    if isinstance(g, Region):
        rings = []
        for ring in g.rings:
            rings.append("(" + ", ".join(f"{_fmt(p.x)} {_fmt(p.y)}" for p in ring) + ")")
        return f"POLYGON ({', '.join(rings)})"
    if isinstance(g, MovingPoint):
        units = ", ".join(
            f"({u.period.start} {u.period.end} {_fmt(u.p0.x)} {_fmt(u.p0.y)} {_fmt(u.p1.x)} {_fmt(u.p1.y)})"
            for u in g.units)
        return f"MPOINT ({units})"
    raise BadGeometry(f"cannot serialize {type(g).__name__}")


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_POINT_RE = re.compile(rf"^POINT\s*\(\s*({_NUM})\s+({_NUM})\s*\)$")


def _split_groups(body: str, text: str) -> list[str]:
    """Split '(...), (...)' into the parenthesized group contents."""
    groups = []
    depth = 0
    start = None
    for i, ch in enumerate(body):
        if ch == "(":
            if depth == 0:
                start = i + 1
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise BadGeometry(f"unbalanced parentheses in {text!r}")
            if depth == 0:
                groups.append(body[start:i])
        elif depth == 0 and not ch.isspace() and ch != ",":
            raise BadGeometry(f"unexpected {ch!r} in {text!r}")
    if depth != 0:
        raise BadGeometry(f"unbalanced parentheses in {text!r}")
    return groups


def _parse_coords(body: str, text: str) -> list[Point]:
    pts = []
    for chunk in body.split(","):
        parts = chunk.split()
        if len(parts) != 2:
            raise BadGeometry(f"bad coordinate pair {chunk!r} in {text!r}")
        try:
            pts.append(Point(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise BadGeometry(f"bad coordinate in {text!r}: {exc}") from exc
    return pts


def from_wkt(text: str) -> Geometry | MovingPoint:
    """Parse any of the supported encodings; raises BadGeometry."""
    s = text.strip()
    upper = s.upper()
    try:
        if upper.startswith("POINT"):
            m = _POINT_RE.match(s)
            if not m:
                raise BadGeometry(f"bad POINT text {text!r}")
            return Point(float(m.group(1)), float(m.group(2)))
        if upper.startswith("LINESTRING"):
            body = s[len("LINESTRING"):].strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise BadGeometry(f"bad LINESTRING text {text!r}")
            pts = _parse_coords(body[1:-1], text)
            if len(pts) < 2:
                raise BadGeometry(f"LINESTRING needs at least 2 points: {text!r}")
            return Line(tuple(zip(pts, pts[1:])))
        if upper.startswith("POLYGON"):
            body = s[len("POLYGON"):].strip()
            if not (body.startswith("(") and body.endswith(")")):
                raise BadGeometry(f"bad POLYGON text {text!r}")
            rings = [tuple(_parse_coords(g, text)) for g in _split_groups(body[1:-1], text)]
            if not rings:
                raise BadGeometry(f"POLYGON needs at least one ring: {text!r}")
            return Region(tuple(rings))
        if upper.startswith("MPOINT"):
            return _parse_mpoint(s, text)
    except BadGeometry:
        raise
    except ValueError as exc:
        raise BadGeometry(f"invalid geometry {text!r}: {exc}") from exc
    raise BadGeometry(f"unrecognized geometry text {text!r}")


def _parse_mpoint(s: str, text: str) -> MovingPoint:
    body = s[len("MPOINT"):].strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise BadGeometry(f"bad MPOINT text {text!r}")
    units = []
    for group in _split_groups(body[1:-1], text):
        parts = group.split()
        if len(parts) != 6:
            raise BadGeometry(f"MPOINT unit needs 6 numbers, got {group!r}")
        t0, t1 = int(parts[0]), int(parts[1])
        x0, y0, x1, y1 = (float(v) for v in parts[2:])
        units.append(UnitPoint(Period(t0, t1), Point(x0, y0), Point(x1, y1)))
    return MovingPoint(tuple(units))
