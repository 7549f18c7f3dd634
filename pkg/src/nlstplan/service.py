"""HTTP API over the translation pipeline.

All shared state (databases, knowledge bases, the classifier) is loaded at
startup and immutable afterwards; per-request work is isolated, so the
endpoints are safe under concurrent access. User-level errors come back as
HTTP 200 with a structured error payload (the UI renders the Help flow);
transport-level mistakes use 4xx.
"""

from __future__ import annotations

import os
from collections import OrderedDict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .catalog import Database, load_dataset, relation_stats
from .corpus import QueryType, generate
from .data_paths import datasets_dir, default_model_path
from .errors import NlstplanError
from .geo import Line, MovingPoint, Period, Point, Rect, Region
from .nlu import TypeClassifier
from .pipeline import build_query_response
from .plan.exec import ResultSet

MAX_REMEMBERED_RESPONSES = 64


def to_geojson(rs: ResultSet) -> dict:
    """FeatureCollection for the result set: one feature per geometry value
    per row, plus one LineString per kNN link carrying rank and distance."""
    features = []
    geom_cols = [i for i, a in enumerate(rs.schema)
                 if a.kind in ("point", "line", "region", "mpoint")]
    plain_cols = [i for i in range(len(rs.schema)) if i not in geom_cols]
    for row in rs.rows:
        props_base = {rs.schema[i].name: row[i] for i in plain_cols}
        for col in geom_cols:
            geometry = _geometry_to_geojson(row[col])
            if geometry is None:
                continue
            props = dict(props_base)
            props["attribute"] = rs.schema[col].name
            if isinstance(row[col], MovingPoint):
                props["t0"] = [u.period.start for u in row[col].units]
                props["t1"] = [u.period.end for u in row[col].units]
            features.append({"type": "Feature", "geometry": geometry, "properties": props})
    for link in rs.knn_links or []:
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString",
                         "coordinates": [[link.query_point.x, link.query_point.y],
                                         [link.neighbor_point.x, link.neighbor_point.y]]},
            "properties": {"link": True, "rank": link.rank, "distance": link.distance},
        })
    return {"type": "FeatureCollection", "features": features}


def _geometry_to_geojson(value) -> dict | None:
    if isinstance(value, Point):
        return {"type": "Point", "coordinates": [value.x, value.y]}
    if isinstance(value, Line):
        coords = [[value.segments[0][0].x, value.segments[0][0].y]]
        coords += [[b.x, b.y] for _a, b in value.segments]
        return {"type": "LineString", "coordinates": coords}
    if isinstance(value, Region):
        return {"type": "Polygon",
                "coordinates": [[[p.x, p.y] for p in ring] for ring in value.rings]}
    if isinstance(value, MovingPoint):
        if not value.units:
            return None
        coords = [[value.units[0].p0.x, value.units[0].p0.y]]
        coords += [[u.p1.x, u.p1.y] for u in value.units]
        return {"type": "LineString", "coordinates": coords}
    return None


class QueryRequest(BaseModel):
    db: str
    nlq: str
    optimize: bool = False


def _load_databases(data_dir: Path) -> dict[str, Database]:
    out: dict[str, Database] = {}
    if not data_dir.is_dir():
        return out
    for child in sorted(data_dir.iterdir()):
        if (child / "catalog.json").exists():
            db = load_dataset(child)
            out[db.name] = db
    return out


def _stats_payload(db: Database) -> list[dict]:
    payload = []
    for name in db.base_names:
        st = relation_stats(db, name)
        rel = db.relations[name]
        payload.append({
            "name": name,
            "tuple_count": st.tuple_count,
            "attributes": [{"name": a.name, "kind": a.kind, "indexed": a.indexed}
                           for a in rel.attributes],
            "extents": {attr: _extent_payload(ext) for attr, ext in st.extents},
        })
    return payload


def _extent_payload(ext) -> dict:
    if isinstance(ext, Rect):
        return {"rect": [ext.xmin, ext.ymin, ext.xmax, ext.ymax]}
    if isinstance(ext, Period):
        return {"period": [ext.start, ext.end]}
    return {}


def create_app(data_dir: str | Path | None = None,
               model_path: str | Path | None = None,
               seed: int = 7, sample_fraction: float = 0.1,
               ui_dir: str | Path | None = None) -> FastAPI:
    databases = _load_databases(datasets_dir(data_dir))
    model_file = Path(model_path) if model_path else default_model_path()
    clf = TypeClassifier.load(model_file) if model_file.exists() else None
    recent: OrderedDict[str, dict] = OrderedDict()

    app = FastAPI(title="nlstplan", version="0.1.0")

    def get_db(name: str) -> Database:
        if name not in databases:
            raise HTTPException(status_code=404, detail=f"unknown database {name!r}")
        return databases[name]

    @app.get("/api/databases")
    def list_databases() -> list[dict]:
        return [{"name": name, "relations": db.base_names, "stats": _stats_payload(db)}
                for name, db in databases.items()]

    @app.get("/api/knowledge")
    def knowledge(db: str, q: str) -> list[dict]:
        database = get_db(db)
        if not q.strip():
            raise HTTPException(status_code=400, detail="q must be non-empty")
        out = []
        for entry, kind, score in database.kb.lookup(q):
            item = {"kind": kind, "score": score}
            if kind == "relation":
                item.update(id=entry.relation_id, name=entry.relation_id,
                            st_attributes=[list(a) for a in entry.st_attributes])
            else:
                from .geo import mbr
                box = mbr(entry.geometry)
                item.update(id=entry.location_id, name=entry.surface_name,
                            geometry_kind=entry.kind, relation=entry.relation_id,
                            tuple=entry.tuple_id,
                            mbr=[box.xmin, box.ymin, box.xmax, box.ymax])
            out.append(item)
        return out

    @app.get("/api/corpus")
    def corpus(db: str, n: int = 5, type: str | None = None) -> list[dict]:
        database = get_db(db)
        if n < 1:
            raise HTTPException(status_code=400, detail="n must be >= 1")
        types = None
        if type is not None:
            try:
                types = [QueryType(type)]
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=f"unknown query type {type!r}") from exc
        try:
            entries = generate(database, n, seed, types=types)
        except NlstplanError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return [{"nlq": e.nlq, "type": e.query_type.value, "slots": e.slots} for e in entries]

    @app.post("/api/query")
    def query(req: QueryRequest) -> dict:
        database = get_db(req.db)
        if not req.nlq.strip():
            raise HTTPException(status_code=400, detail="nlq must be non-empty")
        if clf is None:
            raise HTTPException(status_code=500, detail="classifier model not loaded")
        response = build_query_response(database, req.nlq, clf, optimize=req.optimize,
                                        seed=seed, sample_fraction=sample_fraction)
        recent[response["id"]] = response
        while len(recent) > MAX_REMEMBERED_RESPONSES:
            recent.popitem(last=False)
        return response

    @app.get("/api/plan-tree")
    def plan_tree(id: str) -> dict:
        if id not in recent:
            raise HTTPException(status_code=404, detail=f"no remembered response {id!r}")
        response = recent[id]
        if "operator_tree" not in response:
            raise HTTPException(status_code=404, detail="response carries no plan")
        return response["operator_tree"]

    ui_path = Path(ui_dir) if ui_dir else Path(os.environ.get("NLSTPLAN_UI", ""))
    if ui_path and ui_path.is_dir():
        app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")

    return app
