import json

import pytest

from nlstplan.catalog import (
    kb_lookup,
    levenshtein,
    load_dataset,
    name_similarity,
    relation_stats,
    serialize_database,
)
from nlstplan.data_paths import datasets_dir
from nlstplan.errors import BadGeometry, MissingCatalog, SchemaMismatch, UnknownRelation
from nlstplan.geo import Rect


def write_dataset(tmp_path, catalog, files):
    (tmp_path / "catalog.json").write_text(json.dumps(catalog), encoding="utf-8")
    for name, content in files.items():
        (tmp_path / name).write_text(content, encoding="utf-8")
    return tmp_path


SIMPLE_CATALOG = {
    "name": "tiny",
    "epoch": "day0",
    "relations": [{
        "name": "spots",
        "file": "spots.tsv",
        "attributes": [
            {"name": "name", "kind": "text"},
            {"name": "pos", "kind": "point", "indexed": True},
        ],
    }],
}


class TestLoadDataset:
    def test_minicity_shape(self, minicity):
        assert sorted(minicity.base_names) == [
            "districts", "pois", "rivers", "roads", "universities", "vehicles"]
        # every region/point/line attribute flagged indexed carries an R-tree
        assert "area" in minicity.relations["districts"].indexes
        assert "pos" in minicity.relations["pois"].indexes
        assert "route" in minicity.relations["roads"].indexes
        assert minicity.relations["pois"].indexes["pos"].size == 10_000

    def test_unit_ordered_companion(self, minicity):
        comp = minicity.relation("UTOrdered")
        assert comp.name == "vehicles_UTOrdered"
        starts = [row[comp.attr_index("UTrip")].units[0].period.start for row in comp.tuples]
        assert starts == sorted(starts)

    def test_empty_directory_is_missing_catalog(self, tmp_path):
        with pytest.raises(MissingCatalog):
            load_dataset(tmp_path)

    def test_arity_mismatch_names_row(self, tmp_path):
        path = write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "name\tpos\nalpha\tPOINT (1 2)\nbeta\n",
        })
        with pytest.raises(SchemaMismatch) as err:
            load_dataset(path)
        assert err.value.row == 3

    def test_bad_geometry_names_row(self, tmp_path):
        path = write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "name\tpos\nalpha\tPOINT (1 2)\nbeta\tPOINT (zzz 2)\n",
        })
        with pytest.raises(BadGeometry) as err:
            load_dataset(path)
        assert err.value.row == 3

    def test_wrong_kind_cell(self, tmp_path):
        path = write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "name\tpos\nalpha\tLINESTRING (0 0, 1 1)\n",
        })
        with pytest.raises(BadGeometry):
            load_dataset(path)

    def test_header_mismatch(self, tmp_path):
        path = write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "label\tpos\nalpha\tPOINT (1 2)\n",
        })
        with pytest.raises(SchemaMismatch):
            load_dataset(path)

    def test_load_is_deterministic(self, tmp_path):
        src = datasets_dir() / "minicity-london"
        a = serialize_database(load_dataset(src))
        b = serialize_database(load_dataset(src))
        assert a == b


class TestKnowledgeBase:
    def test_city_of_london_grounds_to_region_value(self, london):
        hits = kb_lookup(london.kb, "city of london")
        assert hits
        entry, kind, score = hits[0]
        assert kind == "location"
        assert score == 1.0
        assert entry.kind == "region"
        assert entry.relation_id == "districts"

    def test_relation_without_text_attribute_gets_no_locations(self, tmp_path):
        catalog = {
            "name": "bare", "epoch": "day0",
            "relations": [{"name": "marks", "file": "marks.tsv", "attributes": [
                {"name": "pos", "kind": "point"}]}],
        }
        db = load_dataset(write_dataset(tmp_path, catalog, {
            "marks.tsv": "pos\nPOINT (0 0)\nPOINT (1 1)\n"}))
        assert len(db.kb.locations) == 0
        assert len(db.kb.relations) == 1

    def test_duplicate_names_get_distinct_ids(self, tmp_path):
        db = load_dataset(write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "name\tpos\ntwin peak\tPOINT (1 2)\ntwin peak\tPOINT (5 6)\n"}))
        ids = {loc.location_id for loc in db.kb.locations}
        assert len(ids) == 2
        assert len(db.kb.find_value("twin peak")) == 2

    def test_fuzzy_match_over_typo(self, minicity):
        hits = kb_lookup(minicity.kb, "universitis")
        assert hits
        entry, kind, score = hits[0]
        assert kind == "relation"
        assert entry.relation_id == "universities"
        assert score >= 0.8

    def test_no_match_returns_empty(self, minicity):
        assert kb_lookup(minicity.kb, "zzzzqq") == []

    def test_every_stored_surface_name_resolves_first(self, london):
        for loc in london.kb.locations[:200]:
            hits = kb_lookup(london.kb, loc.surface_name)
            assert hits[0][2] == 1.0
            assert any(e.entry_id == loc.location_id for e, _k, _s in hits)

    def test_location_entries_dereference(self, minicity):
        for loc in minicity.kb.locations:
            rel = minicity.relation(loc.relation_id)
            row = rel.tuples[loc.tuple_id]
            assert str(row[rel.attr_index(rel.name_attr.name)]).lower() == loc.surface_name.lower()

    def test_moving_objects_carry_trajectories(self, minicity):
        assert len(minicity.kb.moving_objects) == 24
        assert all(mo.trajectory is not None for mo in minicity.kb.moving_objects)

    def test_suggestions_rank_similar_names(self, minicity):
        out = minicity.kb.suggest("trian5", limit=3)
        assert "train5" in out


class TestStats:
    def test_tuple_counts_match_files(self, minicity):
        lines = (datasets_dir() / "minicity" / "districts.tsv").read_text().strip().splitlines()
        assert relation_stats(minicity, "districts").tuple_count == len(lines) - 1

    def test_unknown_relation(self, minicity):
        with pytest.raises(UnknownRelation):
            relation_stats(minicity, "nonexistent")

    def test_single_point_degenerate_extent(self, tmp_path):
        db = load_dataset(write_dataset(tmp_path, SIMPLE_CATALOG, {
            "spots.tsv": "name\tpos\nsolo\tPOINT (3 4)\n"}))
        ext = relation_stats(db, "spots").extent_of("pos")
        assert ext == Rect(3, 4, 3, 4)

    def test_temporal_extent_for_instants(self, minicity):
        ext = relation_stats(minicity, "vehicles").extent_of("departure")
        assert ext.start >= 0
        assert ext.end > ext.start


class TestFuzzyMetric:
    def test_levenshtein_basics(self):
        assert levenshtein("kitten", "sitting") == 3
        assert levenshtein("abc", "abc") == 0
        assert levenshtein("abc", "abcd", cutoff=1) == 1

    def test_cutoff_abandons_early(self):
        assert levenshtein("aaaaaaaaaa", "bbbbbbbbbb", cutoff=3) == 4

    def test_similarity_normalization(self):
        assert name_similarity("abcd", "abcd") == 1.0
        assert name_similarity("abcd", "abce") == pytest.approx(0.75)
