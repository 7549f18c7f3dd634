"""Template-based NLQ corpus generation with validation and repair.

Every generated query is grounded in the target database: relation names,
locations, and moving objects are drawn from its knowledge base, so the
corpus doubles as classifier training data and as end-to-end ground truth.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .catalog import Database, KnowledgeBase, LocationKBEntry, MovingObjectKBEntry
from .errors import NoTemplates, Unrepairable
from .words import number_to_words, render_time

SLOT_RE = re.compile(r"⟨(\w+)⟩")
VALID_SLOTS = {"relation", "relation2", "object", "location", "k", "distance", "period"}

K_POOL = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 50]
DISTANCE_POOL_M = [100, 200, 250, 300, 400, 500, 750, 1000, 1500, 2000, 2500, 3000]


class QueryType(Enum):
    BasicSpatial = "BasicSpatial"
    TimeInterval = "TimeInterval"
    Range = "Range"
    NearestNeighbor = "NearestNeighbor"
    Join = "Join"
    Similarity = "Similarity"
    Aggregation = "Aggregation"


QUERY_TYPES = list(QueryType)


@dataclass
class CorpusEntry:
    nlq: str
    query_type: QueryType
    slots: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"nlq": self.nlq, "type": self.query_type.value, "slots": self.slots})

    @classmethod
    def from_json(cls, line: str) -> "CorpusEntry":
        doc = json.loads(line)
        return cls(doc["nlq"], QueryType(doc["type"]), doc.get("slots", {}))


def load_templates(path: str | Path | None = None) -> list[dict]:
    if path is None:
        text = resources.files("nlstplan").joinpath(
            "data/templates/templates.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    templates = json.loads(text)["templates"]
    for tpl in templates:
        for slot in SLOT_RE.findall(tpl["pattern"]):
            if slot not in VALID_SLOTS:
                raise NoTemplates(f"template uses unknown slot ⟨{slot}⟩: {tpl['pattern']}")
    return templates


def _relations_matching(db: Database, constraint: dict) -> list[str]:
    out = []
    for rel in db.base_relations():
        geoms = constraint.get("geom")
        if geoms is not None and not any(rel.first_attr_of_kind(g) for g in geoms):
            continue
        if constraint.get("numeric") and rel.first_attr_of_kind("int", "real") is None:
            continue
        out.append(rel.name)
    return out


def _locations_matching(kb: KnowledgeBase, constraint: dict) -> list[LocationKBEntry]:
    kinds = set(constraint.get("kinds", ("point", "line", "region")))
    return [loc for loc in kb.locations if loc.kind in kinds]


def _join_pairs(tpl: dict, db: Database) -> list[tuple[str, str]]:
    """Distinct (left, right) relation pairs satisfying the template's kinds."""
    out = []
    for lk, rk in tpl.get("pairs", []):
        for left in _relations_matching(db, {"geom": [lk]}):
            for right in _relations_matching(db, {"geom": [rk]}):
                if left != right and (left, right) not in out:
                    out.append((left, right))
    return out


def _applicable(tpl: dict, db: Database) -> bool:
    slots = set(SLOT_RE.findall(tpl["pattern"]))
    if "object" in slots and not db.kb.moving_objects:
        return False
    if "location" in slots and not _locations_matching(db.kb, tpl.get("location", {})):
        return False
    if "relation2" in slots:
        return bool(_join_pairs(tpl, db))
    if "relation" in slots:
        constraint = tpl.get("relation", {})
        if constraint.get("same_as_object"):
            return bool(db.kb.moving_objects)
        return bool(_relations_matching(db, constraint))
    return True


def _render_period(rng: random.Random) -> tuple[str, list[int]]:
    start_min = rng.randrange(5 * 60, 19 * 60, 15)
    duration = rng.randrange(30, 301, 15)
    end_min = min(start_min + duration, 23 * 60 + 45)
    start_ms, end_ms = start_min * 60_000, end_min * 60_000
    ampm = start_min % 60 == 0 and end_min % 60 == 0 and rng.random() < 0.6
    text = f"between {render_time(start_ms, ampm)} and {render_time(end_ms, ampm)}"
    return text, [start_ms, end_ms]


def _fill(tpl: dict, db: Database, rng: random.Random) -> CorpusEntry:
    kb = db.kb
    slots_in_pattern = SLOT_RE.findall(tpl["pattern"])
    rendered: dict[str, str] = {}
    slots: dict = {}

    obj_entry: MovingObjectKBEntry | None = None
    if "object" in slots_in_pattern:
        obj_entry = rng.choice(sorted(kb.moving_objects, key=lambda e: e.entry_id))
        name = obj_entry.surface_name.lower()
        m = re.fullmatch(r"([a-z]+)(\d+)", name)
        rendered["object"] = f"{m.group(1)} {m.group(2)}" if m and rng.random() < 0.5 else name
        slots["object"] = name

    if "relation" in slots_in_pattern:
        constraint = tpl.get("relation", {})
        if constraint.get("same_as_object"):
            rel_name = obj_entry.relation_id
        else:
            rel_name = rng.choice(_relations_matching(db, constraint))
        rendered["relation"] = rel_name
        slots["relation"] = rel_name

    if "relation2" in slots_in_pattern:
        left, right = rng.choice(_join_pairs(tpl, db))
        rendered["relation"] = left
        rendered["relation2"] = right
        slots["relation"] = left
        slots["relation2"] = right

    if "location" in slots_in_pattern:
        loc = rng.choice(sorted(_locations_matching(kb, tpl.get("location", {})),
                                key=lambda e: e.entry_id))
        rendered["location"] = loc.surface_name.lower()
        slots["location"] = loc.surface_name.lower()

    if "k" in slots_in_pattern:
        k = rng.choice(K_POOL)
        rendered["k"] = number_to_words(k) if rng.random() < 0.4 else str(k)
        slots["k"] = k

    if "distance" in slots_in_pattern:
        meters = rng.choice(DISTANCE_POOL_M)
        if meters % 1000 == 0 and rng.random() < 0.5:
            rendered["distance"] = f"{meters // 1000} km"
        else:
            rendered["distance"] = f"{meters} m"
        slots["distance_m"] = meters

    if "period" in slots_in_pattern:
        rendered["period"], slots["period"] = _render_period(rng)

    if tpl.get("agg"):
        slots["agg"] = tpl["agg"]
    if tpl.get("predicate"):
        slots["predicate"] = tpl["predicate"]

    nlq = SLOT_RE.sub(lambda m: rendered[m.group(1)], tpl["pattern"])
    return CorpusEntry(nlq=nlq, query_type=QueryType(tpl["type"]), slots=slots)


def generate(db: Database, n: int, seed: int,
             types: list[QueryType] | None = None,
             templates: list[dict] | None = None) -> list[CorpusEntry]:
    """Generate exactly n entries, deterministic for fixed (db, n, seed);
    query types round-robin so the distribution is uniform within +-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if templates is None:
        templates = load_templates()
    if not templates:
        raise NoTemplates("template bank is empty")
    wanted = types or QUERY_TYPES
    by_type: dict[QueryType, list[dict]] = {}
    for tpl in templates:
        qt = QueryType(tpl["type"])
        if qt in wanted and _applicable(tpl, db):
            by_type.setdefault(qt, []).append(tpl)
    usable_types = [qt for qt in wanted if by_type.get(qt)]
    if not usable_types:
        raise NoTemplates(f"no applicable templates for database {db.name}")

    rng = random.Random(seed)
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    for i in range(n):
        qt = usable_types[i % len(usable_types)]
        entry = None
        for _attempt in range(120):
            candidate = _fill(rng.choice(by_type[qt]), db, rng)
            if candidate.nlq not in seen:
                entry = candidate
                break
        if entry is None:
            entry = candidate  # combinatorially exhausted; accept the duplicate
        seen.add(entry.nlq)
        entries.append(entry)
    return entries


_ENTITY_SLOTS = ("relation", "relation2", "location", "object")


def validate_repair(entry: CorpusEntry, kb: KnowledgeBase) -> tuple[CorpusEntry, bool]:
    """Check that every slot entity resolves in the knowledge base; replace
    unresolved ones with their best fuzzy match (score >= 0.8)."""
    repaired = False
    new_slots = dict(entry.slots)
    nlq = entry.nlq
    for slot in _ENTITY_SLOTS:
        name = entry.slots.get(slot)
        if name is None:
            continue
        if _resolves(kb, slot, str(name)):
            continue
        if slot.startswith("relation"):
            best = next((entity for entity, kind, _score in kb.lookup(str(name))
                         if kind == "relation"), None)
            replacement = best.relation_id if best else None
        else:
            hits = kb.lookup_values(str(name))
            replacement = hits[0][0].surface_name.lower() if hits else None
        if replacement is None:
            raise Unrepairable(f"no acceptable match for {slot} entity {name!r}")
        pattern = re.compile(re.escape(str(name)), re.IGNORECASE)
        nlq = pattern.sub(replacement, nlq, count=1)
        new_slots[slot] = replacement
        repaired = True
    if not repaired:
        return entry, False
    return CorpusEntry(nlq=nlq, query_type=entry.query_type, slots=new_slots), True


def _resolves(kb: KnowledgeBase, slot: str, name: str) -> bool:
    if slot.startswith("relation"):
        return any(kind == "relation" and score == 1.0 for _, kind, score in kb.lookup(name))
    return bool(kb.find_value(name))


def write_corpus(entries: list[CorpusEntry], path: str | Path) -> None:
    Path(path).write_text("\n".join(e.to_json() for e in entries) + "\n", encoding="utf-8")


def read_corpus(path: str | Path) -> list[CorpusEntry]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [CorpusEntry.from_json(line) for line in lines if line.strip()]
