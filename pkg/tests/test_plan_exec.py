import random

import pytest

from nlstplan.catalog import relation_stats
from nlstplan.corpus import QueryType
from nlstplan.errors import ExecError
from nlstplan.geo import Point, contains, geometry_distance
from nlstplan.optimizer import enumerate_candidates
from nlstplan.pipeline import extraction_from_slots
from nlstplan.plan import (
    AttrRef,
    Consume,
    Count,
    DistanceLe,
    Feed,
    Filter,
    GeomLit,
    execute,
    map_query,
    parse_plan,
    plan_of,
    render_plan,
)


class TestBasics:
    def test_count_matches_relation_stats(self, minicity):
        rs, _ = execute(plan_of(Count(Feed("pois"))), minicity)
        assert rs.rows == [(relation_stats(minicity, "pois").tuple_count,)]

    def test_always_false_filter_returns_nothing(self, minicity):
        pred = DistanceLe(AttrRef("pos"), GeomLit(Point(-9999, -9999)), 0.001)
        rs, _ = execute(plan_of(Consume(Filter(pred, Feed("pois")))), minicity)
        assert rs.rows == []

    def test_execute_twice_identical(self, minicity, classifier):
        ex = extraction_from_slots({"relation": "pois", "location": "old town"},
                                   QueryType.BasicSpatial, minicity)
        plan = map_query(QueryType.BasicSpatial, ex, minicity)
        a, _ = execute(plan, minicity)
        b, _ = execute(plan, minicity)
        assert a == b

    def test_unknown_relation_wrapped_in_exec_error(self, minicity):
        with pytest.raises(ExecError):
            execute(plan_of(Count(Feed("nonexistent"))), minicity)

    def test_projection(self, minicity):
        from nlstplan.plan import Project
        rs, _ = execute(plan_of(Consume(Project(("name",), Feed("districts")))), minicity)
        assert [a.name for a in rs.schema] == ["name"]
        assert len(rs.rows) == 12


class TestIndexTransparency:
    def test_indexed_variant_matches_baseline_small_suite(self, minicity):
        rng = random.Random(42)
        pois = minicity.relation("pois")
        names = [row[0] for row in pois.tuples]
        for _ in range(25):
            anchor = rng.choice(names)
            dist = rng.choice([200, 500, 1000])
            ex = extraction_from_slots(
                {"relation": "pois", "location": anchor, "distance_m": dist},
                QueryType.Range, minicity)
            baseline = map_query(QueryType.Range, ex, minicity)
            cands = enumerate_candidates(baseline, minicity, selectivity=0.01)
            assert cands.indexed, "expected an indexed variant on pois.pos"
            rs_base, _ = execute(baseline, minicity)
            rs_idx, _ = execute(cands.indexed[0], minicity)
            assert rs_base == rs_idx


class TestKnnPlan:
    def test_intervals_stay_inside_filter_period(self, minicity):
        ex = extraction_from_slots(
            {"object": "train5", "k": 3, "period": [21_600_000, 39_600_000]},
            QueryType.NearestNeighbor, minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        rs, _ = execute(plan, minicity)
        cols = [a.name for a in rs.schema]
        s, e = cols.index("knn_start"), cols.index("knn_end")
        assert rs.rows
        for row in rs.rows:
            assert row[s] >= 21_600_000 - 1e-9
            assert row[e] <= 39_600_000 + 1e-9

    def test_knn_links_populated_with_ranks(self, minicity):
        ex = extraction_from_slots(
            {"relation": "pois", "location": "old town", "k": 3},
            QueryType.NearestNeighbor, minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        rs, _ = execute(plan, minicity)
        assert rs.knn_links is not None
        assert sorted(link.rank for link in rs.knn_links) == [1, 2, 3]

    def test_static_knn_matches_plain_sort(self, minicity):
        """Independent oracle: sort pois by distance to the location anchor."""
        from nlstplan.geo import representative_point
        loc = next(l for l in minicity.kb.locations if l.surface_name == "old town")
        anchor = representative_point(loc.geometry)
        pois = minicity.relation("pois")
        expected = sorted(
            ((geometry_distance(row[1], anchor), tid) for tid, row in enumerate(pois.tuples)),
        )[:5]
        ex = extraction_from_slots({"relation": "pois", "location": "old town", "k": 5},
                                   QueryType.NearestNeighbor, minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        rs, _ = execute(plan, minicity)
        got_names = rs.column("name")
        expected_names = [pois.tuples[tid][0] for _d, tid in expected]
        assert got_names == expected_names

    def test_self_is_excluded_from_neighbors(self, minicity):
        ex = extraction_from_slots({"object": "train5", "k": 50}, QueryType.NearestNeighbor,
                                   minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        rs, _ = execute(plan, minicity)
        assert "train5" not in rs.column("name")


class TestJoinExec:
    def test_join_matches_nested_loop_oracle(self, london):
        ex = extraction_from_slots({"relation": "fastfood", "relation2": "universities"},
                                   QueryType.Join, london)
        plan = map_query(QueryType.Join, ex, london)
        rs, _ = execute(plan, london)

        fastfood = london.relation("fastfood")
        universities = london.relation("universities")
        expected = []
        for frow in fastfood.tuples:
            for urow in universities.tuples:
                if contains(urow[1], frow[1]):
                    expected.append(frow + urow)
        assert rs.rows == expected
        assert len(rs.rows) > 0

    def test_join_schema_prefixes_relation_names(self, london):
        ex = extraction_from_slots({"relation": "fastfood", "relation2": "universities"},
                                   QueryType.Join, london)
        rs, _ = execute(map_query(QueryType.Join, ex, london), london)
        names = [a.name for a in rs.schema]
        assert "fastfood_name" in names
        assert "universities_campus" in names


class TestSimilarityExec:
    def test_orders_by_synchronized_distance(self, minicity):
        from nlstplan.geo import sync_distance
        ex = extraction_from_slots({"relation": "vehicles", "object": "train5", "k": 4},
                                   QueryType.Similarity, minicity)
        plan = map_query(QueryType.Similarity, ex, minicity)
        rs, _ = execute(plan, minicity)
        assert len(rs.rows) == 4
        dists = rs.column("sim_dist")
        assert dists == sorted(dists)
        # oracle: brute-force evaluation over all other vehicles
        vehicles = minicity.relation("vehicles")
        q = vehicles.tuples[4][2]
        scored = sorted(
            (sync_distance(q, row[2]), tid) for tid, row in enumerate(vehicles.tuples)
            if row[0] != "train5")
        assert rs.column("name") == [vehicles.tuples[tid][0] for _d, tid in scored[:4]]

    def test_plan_round_trips_through_text(self, minicity):
        ex = extraction_from_slots({"relation": "vehicles", "object": "train5", "k": 2},
                                   QueryType.Similarity, minicity)
        plan = map_query(QueryType.Similarity, ex, minicity)
        assert parse_plan(render_plan(plan)) == plan


class TestAggregateExec:
    def test_avg_over_lengths(self, minicity):
        rivers = minicity.relation("rivers")
        lengths = [row[2] for row in rivers.tuples]
        ex = extraction_from_slots({"relation": "rivers", "agg": "avg"},
                                   QueryType.Aggregation, minicity)
        rs, _ = execute(map_query(QueryType.Aggregation, ex, minicity), minicity)
        assert rs.rows[0][0] == pytest.approx(sum(lengths) / len(lengths))

    def test_count_with_location_filter(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "agg": "count", "location": "old town"},
                                   QueryType.Aggregation, minicity)
        rs, _ = execute(map_query(QueryType.Aggregation, ex, minicity), minicity)
        districts = minicity.relation("districts")
        region = districts.tuples[0][1]
        expected = sum(1 for row in minicity.relation("pois").tuples if contains(region, row[1]))
        assert rs.rows == [(expected,)]
