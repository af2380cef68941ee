"""Planar primitives: points, segments, classified intersections, clearance.

All degeneracy decisions (incidence, collinearity, perpendicularity) go
through one relative tolerance ``tol``.  Length-type comparisons scale it by
``scale``, which defaults to the longer of the segments involved; the
drawing validator passes the diameter of the whole drawing instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

DEFAULT_TOL = 1e-9

INTERIOR = "interior-interior"
TOUCH = "endpoint-touch"
OVERLAP = "overlap"


class GeometryError(ValueError):
    pass


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scaled(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def direction(self) -> Point:
        return self.b - self.a

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)


Feature = Union[Point, Segment]


@dataclass(frozen=True)
class CrossingEvent:
    point: Point
    seg1: Segment
    seg2: Segment
    angle: float  # acute angle between carrier lines, 0 for overlaps
    kind: str

    def swapped(self) -> "CrossingEvent":
        return CrossingEvent(self.point, self.seg2, self.seg1, self.angle, self.kind)


def make_point(x: float, y: float) -> Point:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate ({x}, {y})")
    return Point(float(x), float(y))


def make_segment(a: Sequence[float], b: Sequence[float]) -> Segment:
    a, b = make_point(*a), make_point(*b)
    if a == b:
        raise GeometryError(f"zero-length segment at {tuple(a)}")
    return Segment(a, b)


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def dist(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def carrier_angle(d1: Sequence[float], d2: Sequence[float]) -> float:
    """Acute angle in [0, pi/2] between two direction vectors' lines."""
    n1 = math.hypot(*d1)
    n2 = math.hypot(*d2)
    c = abs(d1[0] * d2[0] + d1[1] * d2[1]) / (n1 * n2)
    return math.acos(min(1.0, c))


def point_segment_distance(p: Sequence[float], s: Segment) -> float:
    ax, ay = s.a
    dx, dy = s.b.x - ax, s.b.y - ay
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def segment_intersection(
    s1: Segment, s2: Segment, tol: float = DEFAULT_TOL, scale: float | None = None
) -> CrossingEvent | None:
    """Classify how two closed segments meet, or return None if disjoint."""
    (ax, ay), (bx, by) = s1
    (cx, cy), (ex, ey) = s2
    d1x, d1y = bx - ax, by - ay
    d2x, d2y = ex - cx, ey - cy
    l1 = math.hypot(d1x, d1y)
    l2 = math.hypot(d2x, d2y)
    if scale is None:
        scale = max(l1, l2)
    eps = tol * scale
    denom = cross(d1x, d1y, d2x, d2y)
    wx, wy = cx - ax, cy - ay

    if abs(denom) <= tol * l1 * l2:
        # parallel carriers; collinear iff s2 lies on the line of s1
        if abs(cross(d1x, d1y, wx, wy)) > eps * l1:
            return None
        t0 = (wx * d1x + wy * d1y) / l1
        t1 = ((ex - ax) * d1x + (ey - ay) * d1y) / l1
        lo, hi = max(0.0, min(t0, t1)), min(l1, max(t0, t1))
        if hi < lo - eps:
            return None
        if hi - lo <= eps:
            t = 0.5 * (lo + hi) / l1
            return CrossingEvent(Point(ax + t * d1x, ay + t * d1y), s1, s2, 0.0, TOUCH)
        t = 0.5 * (lo + hi) / l1
        return CrossingEvent(Point(ax + t * d1x, ay + t * d1y), s1, s2, 0.0, OVERLAP)

    t = cross(wx, wy, d2x, d2y) / denom
    u = cross(wx, wy, d1x, d1y) / denom
    if t * l1 < -eps or t * l1 > l1 + eps or u * l2 < -eps or u * l2 > l2 + eps:
        return None
    t = min(1.0, max(0.0, t))
    point = Point(ax + t * d1x, ay + t * d1y)
    c = abs(d1x * d2x + d1y * d2y) / (l1 * l2)
    angle = math.acos(min(1.0, c))
    near_end1 = t * l1 <= eps or t * l1 >= l1 - eps
    near_end2 = u * l2 <= eps or u * l2 >= l2 - eps
    kind = TOUCH if (near_end1 or near_end2) else INTERIOR
    return CrossingEvent(point, s1, s2, angle, kind)


def is_right_angle(e: CrossingEvent, tol: float = DEFAULT_TOL) -> bool:
    """Perpendicularity of the two carriers: |d1 . d2| <= tol * |d1| |d2|."""
    d1 = e.seg1.direction
    d2 = e.seg2.direction
    dot = d1.x * d2.x + d1.y * d2.y
    return abs(dot) <= tol * e.seg1.length * e.seg2.length


def clearance_radius(p: Sequence[float], features: Sequence[Feature], default: float = 1.0) -> float:
    """Half the distance from ``p`` to the nearest feature.

    The open disk of that radius around ``p`` misses every feature.  An empty
    feature list yields ``default``.
    """
    best = math.inf
    for f in features:
        if isinstance(f, Segment):
            d = point_segment_distance(p, f)
        else:
            d = dist(p, f)
        if d < best:
            best = d
    if best == math.inf:
        return default
    if best <= 0.0:
        raise GeometryError(f"point {tuple(p)} lies on a feature")
    return 0.5 * best
