import json
import random

import pytest

from nlstplan.catalog import load_dataset
from nlstplan.corpus import QueryType
from nlstplan.geo import Point
from nlstplan.optimizer import (
    CandidateSet,
    CostEstimate,
    choose_plan,
    enumerate_candidates,
    estimate_filter_rate,
)
from nlstplan.pipeline import extraction_from_slots
from nlstplan.plan import (
    AttrRef,
    DistanceLe,
    GeomLit,
    execute,
    map_query,
)


def range_baseline(db, anchor_name, dist):
    ex = extraction_from_slots(
        {"relation": "pois", "location": anchor_name, "distance_m": dist},
        QueryType.Range, db)
    return map_query(QueryType.Range, ex, db)


class TestFilterRate:
    def test_exhaustive_sample_is_exact(self, tmp_path):
        catalog = {"name": "t", "epoch": "day0", "relations": [
            {"name": "spots", "file": "spots.tsv", "attributes": [
                {"name": "name", "kind": "text"}, {"name": "pos", "kind": "point"}]}]}
        rows = [f"p{i}\tPOINT ({i} 0)" for i in range(100)]
        (tmp_path / "catalog.json").write_text(json.dumps(catalog))
        (tmp_path / "spots.tsv").write_text("name\tpos\n" + "\n".join(rows) + "\n")
        db = load_dataset(tmp_path)
        pred = DistanceLe(AttrRef("pos"), GeomLit(Point(0, 0)), 6.0)  # matches 7 of 100
        rate = estimate_filter_rate(pred, db.relation("spots"), 100, seed=1)
        assert rate == 0.07

    def test_always_true_predicate(self, minicity):
        pred = DistanceLe(AttrRef("pos"), GeomLit(Point(5000, 5000)), 1e9)
        assert estimate_filter_rate(pred, minicity.relation("pois"), 50, seed=1) == 1.0

    def test_sampling_estimates_true_rate(self, minicity):
        """Binomial check: mean over 20 seeds within +-0.03 of the true rate."""
        pois = minicity.relation("pois")
        pred = DistanceLe(AttrRef("pos"), GeomLit(Point(5000, 5000)), 1261.5)
        true_rate = sum(
            1 for row in pois.tuples
            if (row[1].x - 5000) ** 2 + (row[1].y - 5000) ** 2 <= 1261.5 ** 2) / len(pois.tuples)
        estimates = [estimate_filter_rate(pred, pois, 400, seed=s) for s in range(20)]
        assert abs(sum(estimates) / len(estimates) - true_rate) <= 0.03

    def test_deterministic_for_fixed_seed(self, minicity):
        pred = DistanceLe(AttrRef("pos"), GeomLit(Point(5000, 5000)), 800.0)
        a = estimate_filter_rate(pred, minicity.relation("pois"), 400, seed=9)
        b = estimate_filter_rate(pred, minicity.relation("pois"), 400, seed=9)
        assert a == b


class TestEnumerate:
    def test_low_selectivity_yields_indexed_candidate(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
        assert len(cands.indexed) == 1
        assert cands.indexed[0].uses_index
        assert "pois_pos_rtree" in str(cands.indexed[0].root)

    def test_high_selectivity_yields_nothing(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.9)
        assert cands.indexed == ()

    def test_unindexed_attribute_yields_nothing(self, minicity):
        ex = extraction_from_slots(
            {"relation": "vehicles", "agg": "count", "period": [0, 10_000_000]},
            QueryType.Aggregation, minicity)
        baseline = map_query(QueryType.Aggregation, ex, minicity)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
        assert cands.indexed == ()

    def test_window_expanded_by_distance(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
        window = cands.indexed[0].root.child.child.window  # Consume > Filter > Window
        anchor = next(l for l in minicity.kb.locations
                      if l.surface_name == "amber falcon cafe").geometry
        assert window.xmin == pytest.approx(anchor.x - 500)
        assert window.xmax == pytest.approx(anchor.x + 500)


class TestChoose:
    def test_falls_back_to_baseline_without_candidates(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        chosen, estimates = choose_plan(CandidateSet(baseline, ()), minicity, 0.1, seed=1)
        assert chosen == baseline
        assert estimates[0].chosen

    def test_chosen_plan_is_result_equivalent(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
        chosen, _ = choose_plan(cands, minicity, 0.1, seed=1)
        rs_chosen, _ = execute(chosen, minicity)
        rs_base, _ = execute(baseline, minicity)
        assert rs_chosen == rs_base

    def test_chosen_plan_comes_from_candidate_set(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 750)
        cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
        chosen, estimates = choose_plan(cands, minicity, 0.1, seed=2)
        assert chosen in cands.all_plans()
        assert sum(1 for e in estimates if e.chosen) == 1

    def test_every_candidate_result_equivalent_on_seeded_suite(self, minicity):
        rng = random.Random(17)
        names = [row[0] for row in minicity.relation("pois").tuples]
        for _ in range(10):
            baseline = range_baseline(minicity, rng.choice(names), rng.choice([250, 500, 1000]))
            cands = enumerate_candidates(baseline, minicity, selectivity=0.05)
            rs_base, _ = execute(baseline, minicity)
            for plan in cands.indexed:
                rs, _ = execute(plan, minicity)
                assert rs == rs_base

    def test_predicted_is_sampled_over_fraction(self):
        est = CostEstimate(plan=None, sampled_ms=13.0, sample_fraction=0.25)
        assert est.predicted_ms == 52.0

    def test_invalid_fraction(self, minicity):
        baseline = range_baseline(minicity, "amber falcon cafe", 500)
        with pytest.raises(ValueError):
            choose_plan(CandidateSet(baseline, ()), minicity, 0.0, seed=1)
