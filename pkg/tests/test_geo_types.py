import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlstplan.geo import (
    Line,
    MovingPoint,
    Period,
    Point,
    Rect,
    Region,
    UnitPoint,
    atperiods,
    deftime,
    mpoint_at,
)


def unit(t0, t1, p0, p1):
    return UnitPoint(Period(t0, t1), Point(*p0), Point(*p1))


class TestValidation:
    def test_point_rejects_nan(self):
        with pytest.raises(ValueError):
            Point(float("nan"), 0.0)

    def test_line_rejects_zero_length_segment(self):
        with pytest.raises(ValueError):
            Line(((Point(1, 1), Point(1, 1)),))

    def test_region_requires_closed_ring(self):
        with pytest.raises(ValueError):
            Region(((Point(0, 0), Point(1, 0), Point(1, 1)),))

    def test_region_rejects_self_intersecting_outer(self):
        bowtie = (Point(0, 0), Point(1, 1), Point(1, 0), Point(0, 1), Point(0, 0))
        with pytest.raises(ValueError):
            Region((bowtie,))

    def test_period_must_be_forward(self):
        with pytest.raises(ValueError):
            Period(5, 5)

    def test_moving_point_units_must_be_disjoint(self):
        with pytest.raises(ValueError):
            MovingPoint((unit(0, 1000, (0, 0), (1, 1)), unit(500, 1500, (1, 1), (2, 2))))

    def test_rect_must_be_ordered(self):
        with pytest.raises(ValueError):
            Rect(1, 0, 0, 1)


class TestMpointAt:
    def test_midpoint_of_linear_motion(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (10, 0)),))
        assert mpoint_at(m, 500) == Point(5.0, 0.0)

    def test_boundary_start_inclusive(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (10, 0)),))
        assert mpoint_at(m, 0) == Point(0.0, 0.0)

    def test_half_open_end(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (10, 0)),))
        assert mpoint_at(m, 1000) is None


class TestDeftime:
    def test_abutting_units_merge(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (1, 0)), unit(1000, 2000, (1, 0), (2, 0))))
        assert deftime(m) == [Period(0, 2000)]

    def test_gap_preserved(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (1, 0)), unit(3000, 4000, (1, 0), (2, 0))))
        assert deftime(m) == [Period(0, 1000), Period(3000, 4000)]

    def test_empty(self):
        assert deftime(MovingPoint(())) == []


class TestAtperiods:
    def test_clip_interpolates_endpoints(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (10, 0)),))
        clipped = atperiods(m, Period(250, 750))
        assert clipped.units == (unit(250, 750, (2.5, 0.0), (7.5, 0.0)),)

    def test_disjoint_period_gives_empty(self):
        m = MovingPoint((unit(0, 1000, (0, 0), (10, 0)),))
        assert atperiods(m, Period(2000, 3000)).units == ()

    def test_superset_period_is_identity(self):
        m = MovingPoint((unit(100, 1000, (0, 0), (10, 0)),))
        assert atperiods(m, Period(0, 5000)) == m


@st.composite
def moving_points(draw):
    n_units = draw(st.integers(1, 5))
    units = []
    t = draw(st.integers(0, 1000))
    x, y = draw(st.floats(-100, 100)), draw(st.floats(-100, 100))
    for _ in range(n_units):
        dur = draw(st.integers(1, 2000))
        gap = draw(st.integers(0, 500))
        nx, ny = draw(st.floats(-100, 100)), draw(st.floats(-100, 100))
        units.append(unit(t, t + dur, (x, y), (nx, ny)))
        t += dur + gap
        x, y = nx, ny
    return MovingPoint(tuple(units))


@st.composite
def periods(draw):
    start = draw(st.integers(0, 8000))
    return Period(start, start + draw(st.integers(1, 8000)))


@settings(max_examples=150, deadline=None)
@given(m=moving_points(), p=periods())
def test_deftime_of_restriction_is_contained_in_intersections(m, p):
    restricted = deftime(atperiods(m, p))
    allowed = []
    for q in deftime(m):
        inter = q.intersection(p)
        if inter is not None:
            allowed.append(inter)
    for piece in restricted:
        assert any(a.start <= piece.start and piece.end <= a.end for a in allowed)


@settings(max_examples=150, deadline=None)
@given(m=moving_points(), p=periods(), frac=st.floats(0, 1))
def test_atperiods_preserves_positions(m, p, frac):
    clipped = atperiods(m, p)
    spans = deftime(clipped)
    if not spans:
        return
    span = spans[0]
    t = span.start + frac * (span.end - 1 - span.start)
    a = mpoint_at(clipped, t)
    b = mpoint_at(m, t)
    if a is None or b is None:
        assert a is None and b is None
        return
    assert abs(a.x - b.x) < 1e-9
    assert abs(a.y - b.y) < 1e-9
