import random

import pytest

from nlstplan.errors import EmptyInput
from nlstplan.geo import Rect, rtree_bulk_load


def random_rects(rng, n, extent=100.0, max_side=3.0):
    out = []
    for i in range(n):
        x, y = rng.uniform(0, extent), rng.uniform(0, extent)
        w, h = rng.uniform(0, max_side), rng.uniform(0, max_side)
        out.append((Rect(x, y, x + w, y + h), i))
    return out


def test_single_entry_tree():
    tree = rtree_bulk_load([(Rect(1, 1, 2, 2), 42)], fanout=8)
    assert tree.height == 1
    assert tree.size == 1
    assert tree.window(Rect(0, 0, 3, 3)) == {42}


def test_grid_window_returns_all():
    entries = [(Rect(x, y, x + 1, y + 1), x * 10 + y) for x in range(10) for y in range(10)]
    tree = rtree_bulk_load(entries, fanout=8)
    assert tree.window(Rect(0, 0, 11, 11)) == {x * 10 + y for x in range(10) for y in range(10)}


def test_empty_input_raises():
    with pytest.raises(EmptyInput):
        rtree_bulk_load([], fanout=8)


def test_fanout_minimum():
    with pytest.raises(ValueError):
        rtree_bulk_load([(Rect(0, 0, 1, 1), 0)], fanout=3)


def test_window_disjoint_from_extent_is_empty():
    rng = random.Random(3)
    entries = random_rects(rng, 50)
    tree = rtree_bulk_load(entries, fanout=8)
    assert tree.window(Rect(500, 500, 600, 600)) == set()


def test_closed_boundary_intersection_counts():
    tree = rtree_bulk_load([(Rect(0, 0, 1, 1), 1), (Rect(2, 2, 3, 3), 2)], fanout=4)
    # touching edges count as intersecting
    assert tree.window(Rect(1, 1, 2, 2)) == {1, 2}


@pytest.mark.parametrize("n", [1, 2, 5, 9, 17, 33, 64, 100, 257, 1000])
@pytest.mark.parametrize("fanout", [4, 8, 16])
def test_structure_invariants_across_sizes(n, fanout):
    rng = random.Random(n * 31 + fanout)
    tree = rtree_bulk_load(random_rects(rng, n), fanout=fanout)
    tree.check_invariants()
    assert tree.size == n


def test_window_matches_linear_scan_500_cases():
    rng = random.Random(1234)
    for case in range(500):
        n = rng.randrange(1, 240)
        entries = random_rects(rng, n)
        tree = rtree_bulk_load(entries, fanout=rng.choice([4, 8, 16]))
        x1, x2 = sorted([rng.uniform(0, 100), rng.uniform(0, 100)])
        y1, y2 = sorted([rng.uniform(0, 100), rng.uniform(0, 100)])
        w = Rect(x1, y1, x2, y2)
        expected = {tid for rect, tid in entries if rect.intersects(w)}
        assert tree.window(w) == expected, f"case {case} diverged from linear scan"


def test_bulk_load_deterministic_for_fixed_order():
    rng = random.Random(77)
    entries = random_rects(rng, 200)
    h1 = rtree_bulk_load(entries, fanout=8).structural_hash()
    h2 = rtree_bulk_load(entries, fanout=8).structural_hash()
    assert h1 == h2


def test_bulk_load_order_sensitivity_is_structural_only():
    # different input order may change layout, but never query results
    rng = random.Random(9)
    entries = random_rects(rng, 150)
    shuffled = entries[:]
    rng.shuffle(shuffled)
    t1 = rtree_bulk_load(entries, fanout=8)
    t2 = rtree_bulk_load(shuffled, fanout=8)
    for _ in range(50):
        x1, x2 = sorted([rng.uniform(0, 100), rng.uniform(0, 100)])
        y1, y2 = sorted([rng.uniform(0, 100), rng.uniform(0, 100)])
        w = Rect(x1, y1, x2, y2)
        assert t1.window(w) == t2.window(w)
