"""Exact rational plane geometry used by every predicate in the package.

All coordinates are ``fractions.Fraction``; there is deliberately no float
anywhere in this module, so intersection and ordering tests are never
subject to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Tuple

Rat = Fraction


def rat(value) -> Fraction:
    """Convert ints, strings ('1/3', '0.25') and Fractions to Fraction exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction or string")
    raise TypeError(f"cannot convert {value!r} to a rational")


@dataclass(frozen=True)
class Point2:
    """A point of the disk with exact rational coordinates."""

    x: Fraction
    y: Fraction

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def cross(self, other: "Point2") -> Fraction:
        return self.x * other.y - self.y * other.x

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def key(self) -> Tuple[Fraction, Fraction]:
        return (self.x, self.y)


def pt(x, y) -> Point2:
    return Point2(rat(x), rat(y))


def orient(a: Point2, b: Point2, c: Point2) -> int:
    """Sign of the signed area of (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    v = (b - a).cross(c - a)
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class SegmentMeeting:
    """How two segments meet.

    kind is one of:
      'disjoint'   -- no common point
      'proper'     -- transversal crossing interior to both segments
      'touch'      -- a single common point involving a segment endpoint
      'overlap'    -- collinear segments sharing more than one point
    For 'proper', ``point`` and the interior parameters (t on the first
    segment, u on the second, both strictly in (0,1)) are filled in.
    """

    kind: str
    point: Optional[Point2] = None
    t: Optional[Fraction] = None
    u: Optional[Fraction] = None


def segment_meeting(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> SegmentMeeting:
    """Classify the intersection of segments p1p2 and q1q2 exactly."""
    d1 = p2 - p1
    d2 = q2 - q1
    denom = d1.cross(d2)
    w = q1 - p1
    if denom == 0:
        if w.cross(d1) != 0:
            return SegmentMeeting("disjoint")
        # collinear: project on the dominant axis of d1
        use_x = d1.x != 0
        def coord(p: Point2) -> Fraction:
            return p.x if use_x else p.y
        a0, a1 = sorted((coord(p1), coord(p2)))
        b0, b1 = sorted((coord(q1), coord(q2)))
        lo, hi = max(a0, b0), min(a1, b1)
        if lo > hi:
            return SegmentMeeting("disjoint")
        if lo == hi:
            at = p1 if coord(p1) == lo else p2
            return SegmentMeeting("touch", point=at)
        return SegmentMeeting("overlap")
    t = w.cross(d2) / denom
    u = w.cross(d1) / denom
    if t < 0 or t > 1 or u < 0 or u > 1:
        return SegmentMeeting("disjoint")
    point = Point2(p1.x + t * d1.x, p1.y + t * d1.y)
    if 0 < t < 1 and 0 < u < 1:
        return SegmentMeeting("proper", point=point, t=t, u=u)
    return SegmentMeeting("touch", point=point, t=t, u=u)


def y_on_segment_at_x(p1: Point2, p2: Point2, x: Fraction) -> Optional[Fraction]:
    """y of the segment at abscissa x, or None when x is outside its span.

    The segment must not be vertical.
    """
    lo, hi = (p1.x, p2.x) if p1.x <= p2.x else (p2.x, p1.x)
    if x < lo or x > hi:
        return None
    if p1.x == p2.x:
        raise ValueError("vertical segment has no single y at x")
    t = (x - p1.x) / (p2.x - p1.x)
    return p1.y + t * (p2.y - p1.y)


def slope(p1: Point2, p2: Point2) -> Fraction:
    """dy/dx of a non-vertical segment."""
    if p1.x == p2.x:
        raise ValueError("vertical segment has no slope")
    return (p2.y - p1.y) / (p2.x - p1.x)


def downward_ray_hits_segment(p: Point2, a: Point2, b: Point2) -> bool:
    """Does the open ray {(p.x, y) : y < p.y} meet segment ab?

    A vertical segment at p.x counts as a hit when any part of it is
    strictly below p.
    """
    lo, hi = (a.x, b.x) if a.x <= b.x else (b.x, a.x)
    if p.x < lo or p.x > hi:
        return False
    if a.x == b.x:
        return min(a.y, b.y) < p.y
    y = y_on_segment_at_x(a, b, p.x)
    return y is not None and y < p.y


def in_closed_annulus(p: Point2, r_in: Fraction, r_out: Fraction) -> bool:
    n = p.norm2()
    return r_in * r_in <= n <= r_out * r_out


def strictly_inside_radius(p: Point2, r: Fraction) -> bool:
    return p.norm2() < r * r


def points_collinear_dir(d1: Point2, d2: Point2) -> bool:
    """True when two direction vectors are parallel."""
    return d1.cross(d2) == 0


def approx_fraction(value: float, denominator: int = 1 << 20) -> Fraction:
    """Snap a float to the rational grid with the given power-of-two denominator."""
    return Fraction(round(value * denominator), denominator)


def bbox_disjoint(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    return (
        max(p1.x, p2.x) < min(q1.x, q2.x)
        or max(q1.x, q2.x) < min(p1.x, p2.x)
        or max(p1.y, p2.y) < min(q1.y, q2.y)
        or max(q1.y, q2.y) < min(p1.y, p2.y)
    )


def iter_pairs(items: Iterable) -> Iterable[Tuple]:
    seq = list(items)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            yield seq[i], seq[j]
