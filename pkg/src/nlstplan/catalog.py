"""Dataset ingestion, relation/location knowledge bases, and statistics.

A dataset directory holds `catalog.json` plus one UTF-8 TSV per relation
(header row of attribute names; geometry cells in the WKT/MPOINT text
encodings). Everything is immutable after load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadGeometry, MissingCatalog, SchemaMismatch, UnknownRelation
from .geo import (
    Geometry,
    Line,
    MovingPoint,
    Period,
    Point,
    Rect,
    Region,
    RTree,
    from_wkt,
    mbr,
    rtree_bulk_load,
    to_wkt,
)

KINDS = ("int", "real", "text", "point", "line", "region", "mpoint", "instant", "period")
SPATIAL_KINDS = ("point", "line", "region", "mpoint")
TEMPORAL_KINDS = ("instant", "period")

UT_SUFFIX = "_UTOrdered"


@dataclass(frozen=True)
class AttributeDef:
    name: str
    kind: str
    indexed: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaMismatch(f"unknown attribute kind {self.kind!r} for {self.name}")


@dataclass
class Relation:
    name: str
    attributes: tuple[AttributeDef, ...]
    tuples: list[tuple]
    indexes: dict[str, RTree] = field(default_factory=dict)

    def attr_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise UnknownRelation(f"relation {self.name} has no attribute {name!r}")

    def attr(self, name: str) -> AttributeDef:
        return self.attributes[self.attr_index(name)]

    def first_attr_of_kind(self, *kinds: str) -> AttributeDef | None:
        for a in self.attributes:
            if a.kind in kinds:
                return a
        return None

    @property
    def name_attr(self) -> AttributeDef | None:
        """Lexicographically first text attribute: the surface-name source."""
        texts = sorted(a.name for a in self.attributes if a.kind == "text")
        return self.attr(texts[0]) if texts else None

    def value(self, tid: int, attr: str):
        return self.tuples[tid][self.attr_index(attr)]


@dataclass(frozen=True)
class RelationKBEntry:
    relation_id: str
    surface_names: tuple[str, ...]
    st_attributes: tuple[tuple[str, str], ...]  # (attribute name, kind)

    @property
    def entry_id(self) -> str:
        return self.relation_id


@dataclass(frozen=True)
class LocationKBEntry:
    location_id: str
    surface_name: str
    kind: str  # point | line | region
    geometry: Geometry
    relation_id: str
    tuple_id: int

    @property
    def entry_id(self) -> str:
        return self.location_id


@dataclass(frozen=True)
class MovingObjectKBEntry:
    """Value-level entry for a named moving object (trajectory tuple)."""

    object_id: str
    surface_name: str
    relation_id: str
    tuple_id: int
    trajectory: MovingPoint | None = None

    @property
    def entry_id(self) -> str:
        return self.object_id


@dataclass(frozen=True)
class RelationStats:
    relation_id: str
    tuple_count: int
    extents: tuple[tuple[str, Rect | Period], ...]

    def extent_of(self, attr: str) -> Rect | Period | None:
        for name, ext in self.extents:
            if name == attr:
                return ext
        return None


def levenshtein(a: str, b: str, cutoff: int | None = None) -> int:
    """Edit distance; returns cutoff+1 early when the distance exceeds cutoff."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if cutoff is not None and len(a) - len(b) > cutoff:
        return cutoff + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if cutoff is not None and min(cur) > cutoff:
            return cutoff + 1
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str) -> float:
    """Normalized edit similarity in [0, 1]."""
    if not a or not b:
        return 0.0
    longest = max(len(a), len(b))
    return 1.0 - levenshtein(a, b) / longest


def _aliases(name: str) -> tuple[str, ...]:
    # plural/singular variants: strip or append a trailing "s" only
    low = name.lower()
    variant = low[:-1] if low.endswith("s") else low + "s"
    return (low, variant) if variant != low else (low,)


class KnowledgeBase:
    """Paired relation KB and location KB with a value-level name index."""

    def __init__(self, relations: list[RelationKBEntry], locations: list[LocationKBEntry],
                 moving_objects: list[MovingObjectKBEntry]):
        self.relations = relations
        self.locations = locations
        self.moving_objects = moving_objects
        self._exact: dict[str, list[tuple[object, str]]] = {}
        for entry in relations:
            for alias in entry.surface_names:
                self._exact.setdefault(alias, []).append((entry, "relation"))
        for loc in locations:
            self._exact.setdefault(loc.surface_name.lower(), []).append((loc, "location"))
        self._values: dict[str, list[LocationKBEntry | MovingObjectKBEntry]] = {}
        for loc in locations:
            self._values.setdefault(loc.surface_name.lower(), []).append(loc)
        for mo in moving_objects:
            self._values.setdefault(mo.surface_name.lower(), []).append(mo)

    def lookup(self, phrase: str) -> list[tuple[object, str, float]]:
        """Case-insensitive exact matches first (score 1.0); otherwise fuzzy
        matches with normalized edit similarity >= 0.8, score desc, id asc."""
        key = phrase.strip().lower()
        if not key:
            return []
        exact = self._exact.get(key, [])
        if exact:
            hits = [(entry, kind, 1.0) for entry, kind in exact]
            return sorted(hits, key=lambda h: h[0].entry_id)
        fuzzy: list[tuple[object, str, float]] = []
        cutoff = max(1, int(0.2 * max(len(key), 1)) + 1)
        for alias, entries in self._exact.items():
            if abs(len(alias) - len(key)) > cutoff:
                continue
            dist = levenshtein(key, alias, cutoff=cutoff)
            score = 1.0 - dist / max(len(key), len(alias))
            if score >= 0.8:
                for entry, kind in entries:
                    fuzzy.append((entry, kind, score))
        best: dict[str, tuple[object, str, float]] = {}
        for entry, kind, score in fuzzy:
            cur = best.get(entry.entry_id)
            if cur is None or score > cur[2]:
                best[entry.entry_id] = (entry, kind, score)
        return sorted(best.values(), key=lambda h: (-h[2], h[0].entry_id))

    def find_value(self, name: str) -> list[LocationKBEntry | MovingObjectKBEntry]:
        """Exact value-level matches (locations and moving objects)."""
        return self._values.get(name.strip().lower(), [])

    def lookup_values(self, phrase: str) -> list[tuple[LocationKBEntry | MovingObjectKBEntry, float]]:
        """Value-level lookup (locations + moving objects): exact first,
        otherwise fuzzy >= 0.8, score desc then id asc."""
        key = phrase.strip().lower()
        if not key:
            return []
        exact = self._values.get(key, [])
        if exact:
            return [(e, 1.0) for e in sorted(exact, key=lambda e: e.entry_id)]
        cutoff = max(1, int(0.2 * len(key)) + 1)
        hits = []
        for name, entries in self._values.items():
            if abs(len(name) - len(key)) > cutoff:
                continue
            dist = levenshtein(key, name, cutoff=cutoff)
            score = 1.0 - dist / max(len(key), len(name))
            if score >= 0.8:
                hits.extend((e, score) for e in entries)
        return sorted(hits, key=lambda h: (-h[1], h[0].entry_id))

    def suggest(self, phrase: str, limit: int = 3) -> list[str]:
        """Best-effort nearest surface names, even below the fuzzy threshold."""
        key = phrase.strip().lower()
        scored: list[tuple[float, str]] = []
        cutoff = max(3, len(key))
        aliases = set(self._exact) | set(self._values)
        for alias in aliases:
            if abs(len(alias) - len(key)) > cutoff:
                continue
            dist = levenshtein(key, alias, cutoff=cutoff)
            scored.append((1.0 - dist / max(len(key), len(alias), 1), alias))
        scored.sort(key=lambda s: (-s[0], s[1]))
        out: list[str] = []
        for _, alias in scored:
            if alias not in out:
                out.append(alias)
            if len(out) >= limit:
                break
        return out


@dataclass
class Database:
    name: str
    epoch: str
    relations: dict[str, Relation]
    base_names: list[str]
    kb: KnowledgeBase | None = None
    stats: dict[str, RelationStats] = field(default_factory=dict)
    ut_alias: dict[str, str] = field(default_factory=dict)  # short name -> companion

    def relation(self, name: str) -> Relation:
        resolved = self.ut_alias.get(name, name)
        if resolved not in self.relations:
            raise UnknownRelation(f"unknown relation {name!r} in database {self.name}")
        return self.relations[resolved]

    def base_relations(self) -> list[Relation]:
        return [self.relations[n] for n in self.base_names]


def _parse_value(text: str, kind: str):
    if kind == "int":
        return int(text)
    if kind == "real":
        return float(text)
    if kind == "text":
        return text
    if kind == "instant":
        t = int(text)
        if t < 0:
            raise ValueError("instant must be >= 0")
        return t
    if kind == "period":
        inner = text.strip()
        if not (inner.startswith("[") and inner.endswith(")")):
            raise ValueError(f"period must look like [start, end), got {text!r}")
        start_s, end_s = inner[1:-1].split(",")
        return Period(int(start_s), int(end_s))
    geom = from_wkt(text)
    expected = {"point": Point, "line": Line, "region": Region, "mpoint": MovingPoint}[kind]
    if not isinstance(geom, expected):
        raise BadGeometry(f"expected {kind}, got {type(geom).__name__}")
    return geom


def format_value(value) -> str:
    """Inverse of _parse_value, used by serialization and the TSV writers."""
    if isinstance(value, (Point, Line, Region, MovingPoint)):
        return to_wkt(value)
    if isinstance(value, Period):
        return f"[{value.start}, {value.end})"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _load_relation(decl: dict, path: Path) -> Relation:
    attrs = tuple(AttributeDef(a["name"], a["kind"], bool(a.get("indexed", False)))
                  for a in decl["attributes"])
    if len({a.name for a in attrs}) != len(attrs):
        raise SchemaMismatch(f"duplicate attribute names in relation {decl['name']}")
    file_path = path / decl["file"]
    if not file_path.exists():
        raise MissingCatalog(f"relation file {decl['file']} missing in {path}")
    lines = file_path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise SchemaMismatch(f"{decl['file']} is empty (missing header)", row=1)
    header = lines[0].split("\t")
    if header != [a.name for a in attrs]:
        raise SchemaMismatch(f"{decl['file']} header {header} does not match declared attributes", row=1)
    tuples: list[tuple] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != len(attrs):
            raise SchemaMismatch(
                f"{decl['file']} row {lineno}: expected {len(attrs)} values, got {len(cells)}",
                row=lineno)
        row = []
        for cell, attr in zip(cells, attrs):
            try:
                row.append(_parse_value(cell, attr.kind))
            except BadGeometry as exc:
                raise BadGeometry(f"{decl['file']} row {lineno}, {attr.name}: {exc}", row=lineno) from exc
            except (ValueError, IndexError) as exc:
                raise SchemaMismatch(
                    f"{decl['file']} row {lineno}, {attr.name}: {exc}", row=lineno) from exc
        tuples.append(tuple(row))
    return Relation(decl["name"], attrs, tuples)


def _build_indexes(rel: Relation) -> None:
    for attr in rel.attributes:
        if attr.indexed and attr.kind in SPATIAL_KINDS:
            entries = []
            col = rel.attr_index(attr.name)
            for tid, row in enumerate(rel.tuples):
                entries.append((mbr(row[col]), tid))
            if entries:
                rel.indexes[attr.name] = rtree_bulk_load(entries, fanout=8)


def _unit_ordered_companion(rel: Relation) -> Relation | None:
    mp = rel.first_attr_of_kind("mpoint")
    if mp is None:
        return None
    col = rel.attr_index(mp.name)

    def first_start(row) -> int:
        units = row[col].units
        return units[0].period.start if units else 1 << 62

    ordered = sorted(rel.tuples, key=first_start)
    return Relation(rel.name + UT_SUFFIX, rel.attributes, ordered)


def _compute_stats(rel: Relation) -> RelationStats:
    extents: list[tuple[str, Rect | Period]] = []
    for attr in rel.attributes:
        col = rel.attr_index(attr.name)
        values = [row[col] for row in rel.tuples]
        if not values:
            continue
        if attr.kind in SPATIAL_KINDS:
            rects = [mbr(v) for v in values if not (isinstance(v, MovingPoint) and not v.units)]
            if rects:
                ext = rects[0]
                for r in rects[1:]:
                    ext = ext.union(r)
                extents.append((attr.name, ext))
        elif attr.kind == "instant":
            extents.append((attr.name, Period(min(values), max(values) + 1)))
        elif attr.kind == "period":
            extents.append((attr.name, Period(min(v.start for v in values),
                                              max(v.end for v in values))))
    return RelationStats(rel.name, len(rel.tuples), tuple(extents))


def build_kb(db: Database) -> KnowledgeBase:
    """One relation entry per base relation; one value-level entry per tuple
    that has both a text name and a geometry attribute."""
    rel_entries = []
    loc_entries = []
    mobj_entries = []
    for rel in db.base_relations():
        st_attrs = tuple((a.name, a.kind) for a in rel.attributes
                         if a.kind in SPATIAL_KINDS + TEMPORAL_KINDS)
        rel_entries.append(RelationKBEntry(rel.name, _aliases(rel.name), st_attrs))
        name_attr = rel.name_attr
        if name_attr is None:
            continue
        name_col = rel.attr_index(name_attr.name)
        geo_attr = rel.first_attr_of_kind("point", "line", "region")
        mp_attr = rel.first_attr_of_kind("mpoint")
        for tid, row in enumerate(rel.tuples):
            surface = str(row[name_col])
            if geo_attr is not None:
                geom = row[rel.attr_index(geo_attr.name)]
                loc_entries.append(LocationKBEntry(
                    location_id=f"{rel.name}:{tid}",
                    surface_name=surface,
                    kind=geo_attr.kind,
                    geometry=geom,
                    relation_id=rel.name,
                    tuple_id=tid))
            elif mp_attr is not None:
                mobj_entries.append(MovingObjectKBEntry(
                    object_id=f"{rel.name}:{tid}",
                    surface_name=surface,
                    relation_id=rel.name,
                    tuple_id=tid,
                    trajectory=row[rel.attr_index(mp_attr.name)]))
    return KnowledgeBase(rel_entries, loc_entries, mobj_entries)


def load_dataset(path: str | Path) -> Database:
    """Load, validate, and index a dataset directory."""
    path = Path(path)
    catalog_file = path / "catalog.json"
    if not catalog_file.exists():
        raise MissingCatalog(f"no catalog.json in {path}")
    spec = json.loads(catalog_file.read_text(encoding="utf-8"))
    relations: dict[str, Relation] = {}
    base_names: list[str] = []
    for decl in spec["relations"]:
        rel = _load_relation(decl, path)
        _build_indexes(rel)
        relations[rel.name] = rel
        base_names.append(rel.name)

    db = Database(name=spec["name"], epoch=spec.get("epoch", "day0"),
                  relations=relations, base_names=base_names)

    companions = []
    for name in base_names:
        comp = _unit_ordered_companion(relations[name])
        if comp is not None:
            relations[comp.name] = comp
            companions.append(comp.name)
    if len(companions) == 1:
        # with a single moving relation the short name is unambiguous
        db.ut_alias["UTOrdered"] = companions[0]

    for name in base_names:
        db.stats[name] = _compute_stats(relations[name])
    db.kb = build_kb(db)
    return db


def relation_stats(db: Database, relation_id: str) -> RelationStats:
    if relation_id not in db.stats:
        if relation_id not in db.relations:
            raise UnknownRelation(f"unknown relation {relation_id!r}")
        db.stats[relation_id] = _compute_stats(db.relations[relation_id])
    return db.stats[relation_id]


def serialize_database(db: Database) -> str:
    """Canonical JSON rendering used by the load-determinism check."""
    doc = {
        "name": db.name,
        "epoch": db.epoch,
        "relations": [
            {
                "name": rel.name,
                "attributes": [[a.name, a.kind, a.indexed] for a in rel.attributes],
                "tuples": [[format_value(v) for v in row] for row in rel.tuples],
                "indexes": {attr: idx.structural_hash() for attr, idx in sorted(rel.indexes.items())},
            }
            for rel in (db.relations[n] for n in sorted(db.relations))
        ],
        "stats": {
            name: {"count": st.tuple_count,
                   "extents": [[a, format_value(e) if isinstance(e, Period)
                                else [e.xmin, e.ymin, e.xmax, e.ymax]] for a, e in st.extents]}
            for name, st in sorted(db.stats.items())
        },
        "kb": {
            "relations": [[e.relation_id, list(e.surface_names)] for e in db.kb.relations],
            "locations": [[e.location_id, e.surface_name, e.kind] for e in db.kb.locations],
            "moving_objects": [[e.object_id, e.surface_name] for e in db.kb.moving_objects],
        } if db.kb else None,
    }
    return json.dumps(doc, sort_keys=True)


def kb_lookup(kb: KnowledgeBase, phrase: str) -> list[tuple[object, str, float]]:
    return kb.lookup(phrase)
