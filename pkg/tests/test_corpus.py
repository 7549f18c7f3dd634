import collections

import pytest

from nlstplan import corpus as C
from nlstplan.corpus import CorpusEntry, QueryType, generate, validate_repair
from nlstplan.errors import NoTemplates, Unrepairable


class TestGenerate:
    def test_seven_entries_cover_all_types(self, minicity):
        entries = generate(minicity, 7, seed=1)
        assert len(entries) == 7
        assert {e.query_type for e in entries} == set(QueryType)

    def test_deterministic(self, minicity):
        a = generate(minicity, 700, seed=1)
        b = generate(minicity, 700, seed=1)
        assert [e.nlq for e in a] == [e.nlq for e in b]
        assert [e.slots for e in a] == [e.slots for e in b]

    def test_uniform_distribution_within_one(self, minicity):
        entries = generate(minicity, 100, seed=4)
        counts = collections.Counter(e.query_type for e in entries)
        assert max(counts.values()) - min(counts.values()) <= 1

    def test_no_duplicates_up_to_1000(self, minicity):
        entries = generate(minicity, 1000, seed=2)
        assert len({e.nlq for e in entries}) == 1000

    def test_exact_length(self, minicity):
        assert len(generate(minicity, 13, seed=3)) == 13

    def test_empty_bank_raises(self, minicity):
        with pytest.raises(NoTemplates):
            generate(minicity, 5, seed=1, templates=[])

    def test_type_filter(self, minicity):
        entries = generate(minicity, 5, seed=1, types=[QueryType.Range])
        assert all(e.query_type == QueryType.Range for e in entries)

    def test_bound_entities_exist_in_kb(self, minicity):
        for entry in generate(minicity, 200, seed=5):
            _unchanged, repaired = validate_repair(entry, minicity.kb)
            assert repaired is False


class TestTemplates:
    def test_bank_size_and_coverage(self):
        templates = C.load_templates()
        assert len(templates) >= 70
        counts = collections.Counter(t["type"] for t in templates)
        for qt in QueryType:
            assert counts[qt.value] >= 10, f"{qt.value} has {counts[qt.value]} templates"

    def test_slots_are_from_closed_set(self):
        for tpl in C.load_templates():
            for slot in C.SLOT_RE.findall(tpl["pattern"]):
                assert slot in C.VALID_SLOTS


class TestValidateRepair:
    def test_clean_entry_unchanged(self, london):
        entry = CorpusEntry("Which fastfood are in city of london?", QueryType.BasicSpatial,
                            {"relation": "fastfood", "location": "city of london"})
        out, repaired = validate_repair(entry, london.kb)
        assert repaired is False
        assert out is entry

    def test_typo_location_repaired(self, london):
        entry = CorpusEntry("Which fastfood are in citty of london?", QueryType.BasicSpatial,
                            {"relation": "fastfood", "location": "citty of london"})
        out, repaired = validate_repair(entry, london.kb)
        assert repaired is True
        assert out.slots["location"] == "city of london"
        assert "city of london" in out.nlq
        assert "citty" not in out.nlq

    def test_unknown_entity_is_unrepairable(self, london):
        entry = CorpusEntry("Which fastfood are in atlantis mall?", QueryType.BasicSpatial,
                            {"relation": "fastfood", "location": "atlantis mall"})
        with pytest.raises(Unrepairable):
            validate_repair(entry, london.kb)

    def test_typo_relation_repaired(self, minicity):
        entry = CorpusEntry("How many poiss are there?", QueryType.Aggregation,
                            {"relation": "poiss", "agg": "count"})
        out, repaired = validate_repair(entry, minicity.kb)
        assert repaired is True
        assert out.slots["relation"] == "pois"


class TestSerialization:
    def test_round_trip(self, minicity):
        entries = generate(minicity, 5, seed=1)
        for entry in entries:
            again = CorpusEntry.from_json(entry.to_json())
            assert again.nlq == entry.nlq
            assert again.query_type == entry.query_type
            assert again.slots == entry.slots
