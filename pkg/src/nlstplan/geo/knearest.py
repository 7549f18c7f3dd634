"""Continuous k-nearest-neighbor sweep over moving points.

The sweep is exact and event-driven: within every stretch where all motions
are linear, squared distances are quadratics in t, so rank changes can only
happen at unit boundaries or at roots of pairwise squared-distance
differences. Ranks are sampled at elementary-interval midpoints and
per-object intervals are merged while the object stays in the top k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidK
from .predicates import distance
from .types import MovingPoint, Period, Point, UnitPoint, atperiods, deftime, mpoint_at

_SNAP = 1e-9  # roots this close to an interval boundary collapse onto it


@dataclass(frozen=True)
class NearestInterval:
    """One object's membership stretch in the top-k result.

    Endpoints are real-valued milliseconds (half-open [start, end)) because
    rank-change events fall at quadratic roots, not on the ms grid.
    """

    object_id: int
    start: float
    end: float
    rank: int
    dist_at_mid: float

    def covers(self, t: float) -> bool:
        return self.start <= t < self.end

    @property
    def midpoint(self) -> float:
        return (self.start + self.end) / 2


def _affine_motion(unit: UnitPoint, t0: float) -> tuple[float, float, float, float]:
    """Position as (x0, y0) + (vx, vy) * (t - t0) for t inside the unit."""
    dur = unit.period.duration_ms
    vx = (unit.p1.x - unit.p0.x) / dur
    vy = (unit.p1.y - unit.p0.y) / dur
    off = t0 - unit.period.start
    return unit.p0.x + vx * off, unit.p0.y + vy * off, vx, vy


def _quadratic_roots(a: float, b: float, c: float, lo: float, hi: float) -> list[float]:
    """Real roots of a*x^2 + b*x + c in the open interval (lo, hi)."""
    roots: list[float] = []
    scale = max(abs(a) * hi * hi, abs(b) * hi, abs(c), 1.0)
    if abs(a) * hi * hi <= 1e-14 * scale:
        if abs(b) * hi > 1e-14 * scale:
            roots.append(-c / b)
    else:
        disc = b * b - 4.0 * a * c
        if disc > 0.0:
            sq = math.sqrt(disc)
            # numerically stable pairing
            q = -0.5 * (b + math.copysign(sq, b))
            roots.append(q / a)
            if q != 0.0:
                roots.append(c / q)
            else:
                roots.append(0.0)
    return sorted(r for r in roots if lo + _SNAP < r < hi - _SNAP)


def _merge_runs(runs: list[tuple[float, float, int]], clipped: MovingPoint,
                q: MovingPoint, object_id: int) -> list[NearestInterval]:
    """Fuse time-adjacent top-k stretches of one object; the reported rank is
    re-read at the merged midpoint."""
    out: list[NearestInterval] = []
    chain: list[tuple[float, float, int]] = []

    def flush() -> None:
        if not chain:
            return
        start, end = chain[0][0], chain[-1][1]
        mid = (start + end) / 2
        rank = chain[-1][2]
        for u, v, r in chain:
            if mid < v:
                rank = r
                break
        pc = mpoint_at(clipped, mid)
        pq = mpoint_at(q, mid)
        d = distance(pc, pq) if pc is not None and pq is not None else math.nan
        out.append(NearestInterval(object_id, start, end, rank, d))
        chain.clear()

    for run in sorted(runs):
        if chain and abs(chain[-1][1] - run[0]) > _SNAP:
            flush()
        chain.append(run)
    flush()
    return out


def knearest_sweep(candidates: list[tuple[int, MovingPoint]], q: MovingPoint,
                   p: Period, k: int) -> list[NearestInterval]:
    """Per-instant k nearest candidates to q during p, as merged intervals.

    At every instant where at least one candidate is defined, the reported
    objects are the k with smallest Euclidean distance to q (fewer when
    fewer are defined); distance ties break by ascending tuple id.
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")

    results: list[NearestInterval] = []
    for qp in deftime(q):
        seg = qp.intersection(p)
        if seg is None:
            continue
        q_clip = atperiods(q, seg)
        cand_clip = [(tid, atperiods(m, seg)) for tid, m in candidates]
        cand_clip = [(tid, m) for tid, m in cand_clip if m.units]
        runs = _sweep_segment(cand_clip, q_clip, seg, k)
        for tid, m in cand_clip:
            if tid in runs:
                results.extend(_merge_runs(runs[tid], m, q_clip, tid))
    results.sort(key=lambda iv: (iv.start, iv.rank, iv.object_id))
    return results


def _sweep_segment(candidates: list[tuple[int, MovingPoint]], q: MovingPoint,
                   seg: Period, k: int) -> dict[int, list[tuple[float, float, int]]]:
    cuts = {float(seg.start), float(seg.end)}
    for unit in q.units:
        cuts.add(float(unit.period.start))
        cuts.add(float(unit.period.end))
    for _, m in candidates:
        for unit in m.units:
            cuts.add(float(unit.period.start))
            cuts.add(float(unit.period.end))
    bounds = sorted(t for t in cuts if seg.start <= t <= seg.end)

    runs: dict[int, list[tuple[float, float, int]]] = {}
    q_units = list(q.units)
    qi = 0
    pointers = {tid: 0 for tid, _ in candidates}

    for a, b in zip(bounds, bounds[1:]):
        if b - a <= 0:
            continue
        while qi < len(q_units) and q_units[qi].period.end <= a:
            qi += 1
        if qi >= len(q_units) or not (q_units[qi].period.start <= a and b <= q_units[qi].period.end):
            continue  # q undefined here (gap in deftime)
        qx, qy, qvx, qvy = _affine_motion(q_units[qi], a)

        # candidates defined across [a, b): coefficients of squared distance
        # to q as a quadratic in tau = t - a
        active: list[tuple[int, float, float, float]] = []
        for tid, m in candidates:
            units = m.units
            ptr = pointers[tid]
            while ptr < len(units) and units[ptr].period.end <= a:
                ptr += 1
            pointers[tid] = ptr
            if ptr < len(units) and units[ptr].period.start <= a and b <= units[ptr].period.end:
                cx, cy, cvx, cvy = _affine_motion(units[ptr], a)
                bx, by = cx - qx, cy - qy
                vx, vy = cvx - qvx, cvy - qvy
                active.append((tid, vx * vx + vy * vy, 2.0 * (bx * vx + by * vy), bx * bx + by * by))
        if not active:
            continue

        length = b - a
        events = {0.0, length}
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                _, ai, bi, ci = active[i]
                _, aj, bj, cj = active[j]
                for r in _quadratic_roots(ai - aj, bi - bj, ci - cj, 0.0, length):
                    events.add(r)
        taus = sorted(events)

        for u, v in zip(taus, taus[1:]):
            if v - u <= _SNAP:
                continue
            mid = (u + v) / 2
            order = sorted(active, key=lambda c: (c[1] * mid * mid + c[2] * mid + c[3], c[0]))
            for rank, (tid, *_rest) in enumerate(order[:k], start=1):
                runs.setdefault(tid, []).append((a + u, a + v, rank))
    return runs


def _integral_quadratic_norm(qa: float, qb: float, qc: float, hi: float) -> float:
    """Closed-form integral of sqrt(qa*t^2 + qb*t + qc) over [0, hi].

    The quadratic is a squared distance between linear motions, so it is
    nonnegative up to rounding (negatives clamp to zero).
    """
    scale = max(abs(qa) * hi * hi, abs(qb) * hi, abs(qc), 1e-30)
    if abs(qa) * hi * hi <= 1e-12 * scale:
        if abs(qb) * hi <= 1e-12 * scale:
            return math.sqrt(max(qc, 0.0)) * hi
        lo_v = max(qc, 0.0)
        hi_v = max(qb * hi + qc, 0.0)
        return 2.0 / (3.0 * qb) * (hi_v ** 1.5 - lo_v ** 1.5)
    disc = 4.0 * qa * qc - qb * qb  # >= 0 for a norm, clamp fp noise
    sqrt_a = math.sqrt(qa)

    def antiderivative(t: float) -> float:
        s = math.sqrt(max(qa * t * t + qb * t + qc, 0.0))
        value = (2.0 * qa * t + qb) * s / (4.0 * qa)
        if disc > 1e-12 * scale * qa:
            arg = 2.0 * qa * t + qb + 2.0 * sqrt_a * s
            if arg > 0.0:
                value += disc / (8.0 * qa * sqrt_a) * math.log(arg)
        return value

    return antiderivative(hi) - antiderivative(0.0)


def sync_distance(a: MovingPoint, b: MovingPoint) -> float:
    """Time-synchronized average Euclidean distance over the overlap of the
    two deftimes; +inf when the trajectories never coexist."""
    overlaps: list[Period] = []
    for pa in deftime(a):
        for pb in deftime(b):
            inter = pa.intersection(pb)
            if inter is not None:
                overlaps.append(inter)
    if not overlaps:
        return math.inf

    total_time = 0.0
    total_integral = 0.0
    for ov in overlaps:
        cuts = {float(ov.start), float(ov.end)}
        for m in (a, b):
            for unit in m.units:
                for t in (unit.period.start, unit.period.end):
                    if ov.start < t < ov.end:
                        cuts.add(float(t))
        bounds = sorted(cuts)
        a_units = list(a.units)
        b_units = list(b.units)
        ai = bi = 0
        for lo, hi in zip(bounds, bounds[1:]):
            if hi - lo <= 0:
                continue
            while ai < len(a_units) and a_units[ai].period.end <= lo:
                ai += 1
            while bi < len(b_units) and b_units[bi].period.end <= lo:
                bi += 1
            ax, ay, avx, avy = _affine_motion(a_units[ai], lo)
            bx, by, bvx, bvy = _affine_motion(b_units[bi], lo)
            dx, dy = ax - bx, ay - by
            vx, vy = avx - bvx, avy - bvy
            total_integral += _integral_quadratic_norm(
                vx * vx + vy * vy, 2.0 * (dx * vx + dy * vy), dx * dx + dy * dy, hi - lo)
            total_time += hi - lo
    return total_integral / total_time if total_time > 0 else math.inf
