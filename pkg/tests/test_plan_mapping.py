import pytest

from nlstplan.corpus import QueryType
from nlstplan.errors import MissingSlot, UnsupportedType
from nlstplan.nlu import ExtractionResult, coarse_tag, fine_extract
from nlstplan.pipeline import extraction_from_slots
from nlstplan.plan import map_query, render_plan
from nlstplan.plan.ops import (
    Consume,
    Count,
    Feed,
    Filter,
    KNearest,
    SpatialJoin,
)

Q2 = "Show me fifty nearest neighbors to the train 5 between 6am and 11am."
Q2_PLAN = ("query UTOrdered feed filter [(deftime(.UTrip) intersects "
           "[21600000, 39600000))] knearest[UTrip, train5, 50] consume;")


class TestNearestNeighbor:
    def test_q2_renders_exact_template_shape(self, minicity, classifier):
        ex = fine_extract(coarse_tag(Q2), minicity.kb)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        assert render_plan(plan) == Q2_PLAN

    def test_missing_object_raises(self, minicity):
        ex = ExtractionResult(k=3, nn_flag=True)
        with pytest.raises(MissingSlot) as err:
            map_query(QueryType.NearestNeighbor, ex, minicity)
        assert err.value.slot == "object"

    def test_missing_k_defaults_to_one_with_warning(self, minicity):
        ex = extraction_from_slots({"object": "train5"}, QueryType.NearestNeighbor, minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        knearest = plan.root.child
        assert isinstance(knearest, KNearest)
        assert knearest.k == 1
        assert plan.warnings

    def test_static_candidates_use_relation_feed(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "location": "old town", "k": 3},
                                   QueryType.NearestNeighbor, minicity)
        plan = map_query(QueryType.NearestNeighbor, ex, minicity)
        assert isinstance(plan.root, Consume)
        assert isinstance(plan.root.child, KNearest)
        assert plan.root.child.child == Feed("pois")


class TestJoin:
    def test_q1_maps_to_contains_join(self, london, classifier):
        nlq = "What is the fastfood at each university in London?"
        ex = fine_extract(coarse_tag(nlq), london.kb)
        plan = map_query(QueryType.Join, ex, london)
        join = plan.root.child
        assert isinstance(join, SpatialJoin)
        assert join.predicate == "contains"
        assert join.left == Feed("fastfood")
        # the location constrains the right input before joining
        assert isinstance(join.right, Filter)
        assert join.right.child == Feed("universities")

    def test_explicit_cue_wins(self, minicity):
        ex = extraction_from_slots(
            {"relation": "roads", "relation2": "rivers", "predicate": "intersects"},
            QueryType.Join, minicity)
        plan = map_query(QueryType.Join, ex, minicity)
        assert plan.root.child.predicate == "intersects"

    def test_kind_default_intersects_for_lines(self, minicity):
        ex = extraction_from_slots({"relation": "roads", "relation2": "rivers"},
                                   QueryType.Join, minicity)
        plan = map_query(QueryType.Join, ex, minicity)
        assert plan.root.child.predicate == "intersects"

    def test_missing_second_relation(self, minicity):
        ex = ExtractionResult(relations=["roads"])
        with pytest.raises(MissingSlot):
            map_query(QueryType.Join, ex, minicity)


class TestOtherTypes:
    def test_basic_spatial_point_in_region(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "location": "old town"},
                                   QueryType.BasicSpatial, minicity)
        plan = map_query(QueryType.BasicSpatial, ex, minicity)
        text = render_plan(plan)
        assert text.startswith("query pois feed filter [(contains(POLYGON")
        assert text.endswith("consume;")

    def test_time_interval_needs_trajectory_relation(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "period": [0, 1000]},
                                   QueryType.TimeInterval, minicity)
        with pytest.raises(UnsupportedType):
            map_query(QueryType.TimeInterval, ex, minicity)

    def test_range_requires_distance(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "location": "old town"},
                                   QueryType.Range, minicity)
        with pytest.raises(MissingSlot) as err:
            map_query(QueryType.Range, ex, minicity)
        assert err.value.slot == "distance"

    def test_similarity_relation_must_match_object(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "object": "train5"},
                                   QueryType.Similarity, minicity)
        with pytest.raises(UnsupportedType):
            map_query(QueryType.Similarity, ex, minicity)

    def test_aggregation_count_with_period_filter(self, minicity):
        ex = extraction_from_slots(
            {"relation": "vehicles", "agg": "count", "period": [21_600_000, 39_600_000]},
            QueryType.Aggregation, minicity)
        plan = map_query(QueryType.Aggregation, ex, minicity)
        assert isinstance(plan.root, Count)
        assert isinstance(plan.root.child, Filter)

    def test_aggregation_numeric_attr_chosen(self, minicity):
        ex = extraction_from_slots({"relation": "rivers", "agg": "max"},
                                   QueryType.Aggregation, minicity)
        plan = map_query(QueryType.Aggregation, ex, minicity)
        assert render_plan(plan) == "query rivers feed aggregate[max, length_m];"

    def test_mapping_is_deterministic(self, minicity):
        ex = extraction_from_slots({"relation": "pois", "location": "old town"},
                                   QueryType.BasicSpatial, minicity)
        a = map_query(QueryType.BasicSpatial, ex, minicity)
        b = map_query(QueryType.BasicSpatial, ex, minicity)
        assert a == b
