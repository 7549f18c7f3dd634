#!/usr/bin/env python3
"""Regenerate the bundled synthetic datasets (deterministic, seeded).

Writes TSV + catalog.json for two desk-scale city datasets into
src/nlstplan/data/datasets/. Plane units are meters on a 10 km x 10 km
grid; times are ms since day 0, 00:00.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path

import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nlstplan.catalog import format_value
from nlstplan.geo import Line, MovingPoint, Period, Point, Region, UnitPoint
from nlstplan.words import (
    AGG_KEYWORDS,
    DISTANCE_UNITS,
    IGNORABLE,
    NN_KEYWORDS,
    NUMBER_WORDS,
    PREDICATE_CUES,
    SIM_KEYWORDS,
    STOPWORDS,
)

_RESERVED = (STOPWORDS | IGNORABLE | NN_KEYWORDS | SIM_KEYWORDS | NUMBER_WORDS
             | set(AGG_KEYWORDS) | set(PREDICATE_CUES) | set(DISTANCE_UNITS))


def check_names(names: list[str]) -> None:
    """Entity names must not contain tokens the tagger treats specially."""
    for name in names:
        for token in name.split():
            if token in _RESERVED and token != "of":
                raise SystemExit(f"name {name!r}: token {token!r} collides with the tagging lexicon")

OUT = Path(__file__).resolve().parents[1] / "src" / "nlstplan" / "data" / "datasets"

EXTENT = 10_000.0
MS_PER_MIN = 60_000

ADJECTIVES = [
    "amber", "azure", "bronze", "coral", "crimson", "dusty", "ebony", "emerald",
    "frosty", "golden", "hazel", "indigo", "ivory", "jade", "lilac", "maroon",
    "misty", "olive", "onyx", "pearl", "plum", "ruby", "rustic", "sable",
    "saffron", "sandy", "scarlet", "silver", "smoky", "snowy", "sunny", "tawny",
    "teal", "umber", "velvet", "violet", "walnut", "windy", "wooden", "woven",
    "copper", "brassy", "cobalt", "dapple", "fable", "gilded", "marble",
    "mellow", "noble", "quiet",
]
NOUNS = [
    "falcon", "heron", "badger", "otter", "raven", "sparrow", "willow", "cedar",
    "maple", "aspen", "birch", "clover", "fern", "holly", "ivy", "juniper",
    "laurel", "lotus", "orchid", "poppy", "thistle", "tulip", "acorn", "barrel",
    "bell", "candle", "compass", "crown", "lantern", "anchor", "arrow",
    "feather", "garland", "hammer", "kettle", "ladder", "mirror", "needle",
    "quill", "saddle",
]
POI_SUFFIXES = ["cafe", "market", "hall", "inn", "bakery"]

ROAD_PREFIXES = [
    "high", "mill", "king", "queen", "bridge", "market", "church", "station",
    "castle", "garden", "harbor", "meadow", "orchard", "tower", "abbey",
    "forge", "granite", "hollow", "summit", "vale",
]
ROAD_TYPES = ["street", "road", "avenue", "lane"]

FASTFOOD_ADJ = ["happy", "jolly", "lucky", "merry", "swift", "cozy", "crispy", "spicy", "tasty", "zesty"]
FASTFOOD_NOUN = ["wing", "bean", "spoon", "fork", "skillet", "griddle"]
FASTFOOD_SUFFIX = ["grill", "kitchen", "diner", "burger", "pizzeria"]


def star_polygon(rng: random.Random, cx: float, cy: float, rmin: float, rmax: float,
                 nverts: int) -> Region:
    """Simple (star-shaped around the center) polygon: never self-intersects."""
    pts = []
    for i in range(nverts):
        ang = 2 * math.pi * i / nverts + rng.uniform(-0.25, 0.25) / nverts
        r = rng.uniform(rmin, rmax)
        x = min(max(cx + r * math.cos(ang), 0.0), EXTENT)
        y = min(max(cy + r * math.sin(ang), 0.0), EXTENT)
        pts.append(Point(round(x, 1), round(y, 1)))
    ring = tuple(pts) + (pts[0],)
    return Region((ring,))


def polyline(rng: random.Random, n_pts: int, step: float) -> Line:
    x = rng.uniform(500, EXTENT - 500)
    y = rng.uniform(500, EXTENT - 500)
    pts = [Point(round(x, 1), round(y, 1))]
    heading = rng.uniform(0, 2 * math.pi)
    for _ in range(n_pts - 1):
        heading += rng.uniform(-0.7, 0.7)
        x = min(max(x + step * math.cos(heading), 0.0), EXTENT)
        y = min(max(y + step * math.sin(heading), 0.0), EXTENT)
        p = Point(round(x, 1), round(y, 1))
        if p != pts[-1]:
            pts.append(p)
    return Line(tuple(zip(pts, pts[1:])))


def line_length(line: Line) -> float:
    return round(sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in line.segments), 1)


def trajectory(rng: random.Random, start_ms: int, n_units: int) -> MovingPoint:
    units = []
    t = start_ms
    x = rng.uniform(500, EXTENT - 500)
    y = rng.uniform(500, EXTENT - 500)
    for _ in range(n_units):
        dur = rng.randrange(20, 41) * MS_PER_MIN
        ang = rng.uniform(0, 2 * math.pi)
        dist = rng.uniform(800, 2500)
        nx = min(max(x + dist * math.cos(ang), 0.0), EXTENT)
        ny = min(max(y + dist * math.sin(ang), 0.0), EXTENT)
        units.append(UnitPoint(Period(t, t + dur),
                               Point(round(x, 1), round(y, 1)),
                               Point(round(nx, 1), round(ny, 1))))
        t += dur
        x, y = nx, ny
    return MovingPoint(tuple(units))


def write_relation(path: Path, name: str, header: list[str], rows: list[list]) -> None:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(format_value(v) for v in row))
    (path / f"{name}.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_minicity() -> None:
    rng = random.Random(20240501)
    path = OUT / "minicity"
    path.mkdir(parents=True, exist_ok=True)

    district_names = [
        "old town", "north harbor", "south bank", "west gate", "mill quarter",
        "garden heights", "stone market", "river bend", "east meadow",
        "king yard", "copper hill", "low field",
    ]
    check_names(district_names)
    districts = []
    for i, dn in enumerate(district_names):
        cx = 1500 + (i % 4) * 2300 + rng.uniform(-400, 400)
        cy = 1500 + (i // 4) * 3000 + rng.uniform(-400, 400)
        districts.append([dn, star_polygon(rng, cx, cy, 900, 1700, rng.randrange(6, 11)),
                          rng.randrange(8_000, 220_000)])

    check_names([f"{a} {n} {s}" for a in ADJECTIVES for n in NOUNS[:1] for s in POI_SUFFIXES[:1]])
    check_names([f"{ADJECTIVES[0]} {n} {s}" for n in NOUNS for s in POI_SUFFIXES])
    pois = []
    for adj in ADJECTIVES:
        for noun in NOUNS:
            for suf in POI_SUFFIXES:
                pois.append([f"{adj} {noun} {suf}",
                             Point(round(rng.uniform(0, EXTENT), 1), round(rng.uniform(0, EXTENT), 1))])
    assert len(pois) == 10_000

    roads = []
    for prefix in ROAD_PREFIXES:
        for rtype in ROAD_TYPES:
            line = polyline(rng, rng.randrange(4, 9), rng.uniform(500, 1200))
            roads.append([f"{prefix} {rtype}", line, line_length(line)])

    rivers = []
    for rn in ["river alder", "river spry", "river dunn"]:
        line = polyline(rng, 12, 1000)
        rivers.append([rn, line, line_length(line)])

    universities = []
    for un in ["royal institute", "grand academy", "merit college",
               "harbor polytechnic", "crown seminary"]:
        universities.append([un, star_polygon(rng, rng.uniform(1500, 8500), rng.uniform(1500, 8500),
                                              250, 500, rng.randrange(5, 8)),
                             rng.randrange(2_000, 40_000)])

    vehicles = []
    for i in range(1, 25):
        start = 5 * 60 * MS_PER_MIN + (i - 1) * 7 * MS_PER_MIN  # from 05:00, staggered
        traj = trajectory(rng, start, rng.randrange(10, 15))
        vehicles.append([f"train{i}", traj.units[0].period.start, traj])

    write_relation(path, "districts", ["name", "area", "population"], districts)
    write_relation(path, "pois", ["name", "pos"], pois)
    write_relation(path, "roads", ["name", "route", "length_m"], roads)
    write_relation(path, "rivers", ["name", "course", "length_m"], rivers)
    write_relation(path, "universities", ["name", "campus", "students"], universities)
    write_relation(path, "vehicles", ["name", "departure", "UTrip"], vehicles)

    catalog = {
        "name": "minicity",
        "epoch": "day0",
        "relations": [
            {"name": "districts", "file": "districts.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "area", "kind": "region", "indexed": True},
                {"name": "population", "kind": "int", "indexed": False}]},
            {"name": "pois", "file": "pois.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "pos", "kind": "point", "indexed": True}]},
            {"name": "roads", "file": "roads.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "route", "kind": "line", "indexed": True},
                {"name": "length_m", "kind": "real", "indexed": False}]},
            {"name": "rivers", "file": "rivers.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "course", "kind": "line", "indexed": True},
                {"name": "length_m", "kind": "real", "indexed": False}]},
            {"name": "universities", "file": "universities.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "campus", "kind": "region", "indexed": True},
                {"name": "students", "kind": "int", "indexed": False}]},
            {"name": "vehicles", "file": "vehicles.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "departure", "kind": "instant", "indexed": False},
                {"name": "UTrip", "kind": "mpoint", "indexed": False}]},
        ],
    }
    (path / "catalog.json").write_text(json.dumps(catalog, indent=2) + "\n", encoding="utf-8")


def make_minicity_london() -> None:
    rng = random.Random(20240502)
    path = OUT / "minicity-london"
    path.mkdir(parents=True, exist_ok=True)

    whole_city = Region(((Point(0, 0), Point(EXTENT, 0), Point(EXTENT, EXTENT),
                          Point(0, EXTENT), Point(0, 0)),))
    district_names = [
        "city of london", "westminster", "camden", "hackney", "islington",
        "greenwich", "brixton", "soho", "chelsea",
    ]
    check_names(district_names + ["london"])
    districts = [["london", whole_city, 8_900_000]]
    for i, dn in enumerate(district_names):
        cx = 1600 + (i % 3) * 3300 + rng.uniform(-350, 350)
        cy = 1600 + (i // 3) * 3300 + rng.uniform(-350, 350)
        districts.append([dn, star_polygon(rng, cx, cy, 900, 1600, rng.randrange(6, 11)),
                          rng.randrange(50_000, 400_000)])

    check_names([f"{a} {n} {s}" for a in FASTFOOD_ADJ for n in FASTFOOD_NOUN for s in FASTFOOD_SUFFIX])
    fastfood = []
    for adj in FASTFOOD_ADJ:
        for noun in FASTFOOD_NOUN:
            for suf in FASTFOOD_SUFFIX:
                fastfood.append([f"{adj} {noun} {suf}",
                                 Point(round(rng.uniform(0, EXTENT), 1), round(rng.uniform(0, EXTENT), 1))])
    assert len(fastfood) == 300

    universities = []
    for un in ["imperial institute", "river academy", "east college",
               "victoria polytechnic", "crown university", "abbey school",
               "bloom institute", "garden academy"]:
        universities.append([un, star_polygon(rng, rng.uniform(1200, 8800), rng.uniform(1200, 8800),
                                              300, 650, rng.randrange(5, 8)),
                             rng.randrange(3_000, 45_000)])

    buses = []
    for i in range(1, 11):
        start = 6 * 60 * MS_PER_MIN + (i - 1) * 11 * MS_PER_MIN
        traj = trajectory(rng, start, rng.randrange(8, 12))
        buses.append([f"bus{i}", traj.units[0].period.start, traj])

    rivers = []
    line = polyline(rng, 14, 900)
    rivers.append(["river thames", line, line_length(line)])

    write_relation(path, "districts", ["name", "area", "population"], districts)
    write_relation(path, "fastfood", ["name", "pos"], fastfood)
    write_relation(path, "universities", ["name", "campus", "students"], universities)
    write_relation(path, "buses", ["name", "departure", "UTrip"], buses)
    write_relation(path, "rivers", ["name", "course", "length_m"], rivers)

    catalog = {
        "name": "minicity-london",
        "epoch": "day0",
        "relations": [
            {"name": "districts", "file": "districts.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "area", "kind": "region", "indexed": True},
                {"name": "population", "kind": "int", "indexed": False}]},
            {"name": "fastfood", "file": "fastfood.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "pos", "kind": "point", "indexed": True}]},
            {"name": "universities", "file": "universities.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "campus", "kind": "region", "indexed": True},
                {"name": "students", "kind": "int", "indexed": False}]},
            {"name": "buses", "file": "buses.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "departure", "kind": "instant", "indexed": False},
                {"name": "UTrip", "kind": "mpoint", "indexed": False}]},
            {"name": "rivers", "file": "rivers.tsv", "attributes": [
                {"name": "name", "kind": "text", "indexed": False},
                {"name": "course", "kind": "line", "indexed": True},
                {"name": "length_m", "kind": "real", "indexed": False}]},
        ],
    }
    (path / "catalog.json").write_text(json.dumps(catalog, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    make_minicity()
    make_minicity_london()
    print(f"datasets written under {OUT}")
