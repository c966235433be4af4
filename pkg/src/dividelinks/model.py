"""Divide data model: branches, double points, tangencies, genericity.

A divide is a system of immersed PL curves in the unit disk.  Open branches
start and end in the boundary annulus (radius 0.98..1); closed branches stay
strictly inside.  The only allowed self-intersections are transversal double
points interior to segments.  Everything here is exact: validation and the
genericity report never depend on floating point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .geometry import (
    Point2,
    approx_fraction,
    bbox_disjoint,
    downward_ray_hits_segment,
    in_closed_annulus,
    rat,
    segment_meeting,
    strictly_inside_radius,
)

R_INNER = Fraction(49, 50)   # interior vertices live strictly inside this radius
R_OUTER = Fraction(1)        # open-branch endpoints live in [R_INNER, R_OUTER]

OPEN = "open"
CLOSED = "closed"


class DivideError(Exception):
    """Base class for everything this package raises on bad divides."""


class ImmersionViolation(DivideError):
    pass


class BoundaryViolation(DivideError):
    pass


class TripleOrTangentIntersection(DivideError):
    pass


class VertexIntersection(DivideError):
    pass


class VerticalSegment(DivideError):
    pass


class EmptyDivide(DivideError):
    pass


class PerturbationFailed(DivideError):
    pass


class NormalizationFailed(DivideError):
    pass


@dataclass(frozen=True)
class Branch:
    kind: str
    vertices: Tuple[Point2, ...]

    def __post_init__(self):
        if self.kind not in (OPEN, CLOSED):
            raise ValueError(f"unknown branch kind {self.kind!r}")
        object.__setattr__(self, "vertices", tuple(self.vertices))

    @property
    def is_closed(self) -> bool:
        return self.kind == CLOSED

    def segment_count(self) -> int:
        n = len(self.vertices)
        return n if self.is_closed else n - 1

    def segment(self, i: int) -> Tuple[Point2, Point2]:
        n = len(self.vertices)
        return self.vertices[i], self.vertices[(i + 1) % n]

    def segments(self):
        for i in range(self.segment_count()):
            yield i, *self.segment(i)


@dataclass(frozen=True)
class Incidence:
    branch: int
    segment: int
    param: Fraction


@dataclass(frozen=True)
class DoublePoint:
    position: Point2
    incidences: Tuple[Incidence, Incidence]


@dataclass(frozen=True)
class Tangency:
    branch: int
    vertex: int
    kind: str  # "xmin" | "xmax"

    @property
    def is_xmin(self) -> bool:
        return self.kind == "xmin"


@dataclass(frozen=True)
class Violation:
    code: str
    description: str
    elements: Tuple = ()


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    violations: Tuple[Violation, ...]

    @classmethod
    def from_violations(cls, violations: Sequence[Violation]) -> "GenericityReport":
        vs = tuple(violations)
        return cls(generic=not vs, violations=vs)

    def codes(self) -> Tuple[str, ...]:
        return tuple(v.code for v in self.violations)


@dataclass(frozen=True)
class Divide:
    branches: Tuple[Branch, ...]
    double_points: Tuple[DoublePoint, ...] = ()
    tangencies: Tuple[Tangency, ...] = ()

    @classmethod
    def unchecked(cls, branches: Sequence[Branch]) -> "Divide":
        """Wrap branches without validating (for perturbation pipelines)."""
        return cls(branches=tuple(branches))

    def tangency_point(self, t: Tangency) -> Point2:
        return self.branches[t.branch].vertices[t.vertex]


# ---------------------------------------------------------------------------
# analysis engine

PERTURBABLE_CODES = {
    "SHARED_X",
    "VERTICAL_SEGMENT",
    "TRIPLE_POINT",
    "ENDPOINT_RAY_BLOCKED",
    "NON_TRANSVERSE",
    "VERTEX_INTERSECTION",
    "TANGENCY_AT_DOUBLE",
    "TANGENCY_AT_BOUNDARY",
}


@dataclass
class Analysis:
    hard_error: Optional[DivideError] = None
    double_points: List[DoublePoint] = field(default_factory=list)
    tangencies: List[Tangency] = field(default_factory=list)
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.hard_error is None and not self.violations

    def perturbable(self) -> bool:
        if self.hard_error is not None:
            return False
        return all(v.code in PERTURBABLE_CODES for v in self.violations)


def _check_branch_shape(idx: int, branch: Branch) -> Optional[DivideError]:
    verts = branch.vertices
    minimum = 3 if branch.is_closed else 2
    if len(verts) < minimum:
        return ImmersionViolation(
            f"branch {idx}: needs at least {minimum} vertices, got {len(verts)}"
        )
    pairs = list(range(len(verts) - 1)) + ([len(verts) - 1] if branch.is_closed else [])
    for i in pairs:
        a, b = verts[i], verts[(i + 1) % len(verts)]
        if a == b:
            return ImmersionViolation(f"branch {idx}: repeated vertex at index {i}")
    # fold-back at a vertex: incoming and outgoing directions exactly opposite
    n = len(verts)
    interior = range(1, n - 1) if not branch.is_closed else range(n)
    for i in interior:
        prev_v = verts[(i - 1) % n]
        cur = verts[i]
        next_v = verts[(i + 1) % n]
        d_in = cur - prev_v
        d_out = next_v - cur
        if d_in.cross(d_out) == 0 and (d_in.x * d_out.x + d_in.y * d_out.y) < 0:
            return ImmersionViolation(f"branch {idx}: fold-back at vertex {i}")
    # boundary membership
    if branch.is_closed:
        for i, v in enumerate(verts):
            if not strictly_inside_radius(v, R_INNER):
                return BoundaryViolation(
                    f"branch {idx}: closed-branch vertex {i} not strictly inside radius {R_INNER}"
                )
    else:
        for end in (0, n - 1):
            if not in_closed_annulus(verts[end], R_INNER, R_OUTER):
                return BoundaryViolation(
                    f"branch {idx}: endpoint {end} not in the boundary annulus"
                )
        for i in range(1, n - 1):
            if not strictly_inside_radius(verts[i], R_INNER):
                return BoundaryViolation(
                    f"branch {idx}: interior vertex {i} outside radius {R_INNER}"
                )
    return None


def _adjacent_segments(branch: Branch, i: int, j: int) -> bool:
    n = branch.segment_count()
    if abs(i - j) == 1:
        return True
    return branch.is_closed and {i, j} == {0, n - 1}


def analyze(branches: Sequence[Branch]) -> Analysis:
    """Run every structural check once; callers decide whether to raise."""
    result = Analysis()
    branches = tuple(branches)
    if not branches:
        result.hard_error = EmptyDivide("divide has no branches")
        return result
    for idx, branch in enumerate(branches):
        err = _check_branch_shape(idx, branch)
        if err is not None:
            result.hard_error = err
            return result

    for idx, branch in enumerate(branches):
        for i, a, b in branch.segments():
            if a.x == b.x:
                result.violations.append(
                    Violation(
                        "VERTICAL_SEGMENT",
                        f"branch {idx} segment {i} is exactly vertical",
                        (idx, i),
                    )
                )

    # pairwise segment meetings
    all_segments = [
        (idx, i, a, b) for idx, branch in enumerate(branches) for i, a, b in branch.segments()
    ]
    crossings: Dict[Tuple[Fraction, Fraction], List[Tuple[Incidence, Incidence]]] = {}
    for s in range(len(all_segments)):
        b1, i1, p1, p2 = all_segments[s]
        for t in range(s + 1, len(all_segments)):
            b2, i2, q1, q2 = all_segments[t]
            if bbox_disjoint(p1, p2, q1, q2):
                continue
            adjacent = b1 == b2 and _adjacent_segments(branches[b1], i1, i2)
            meet = segment_meeting(p1, p2, q1, q2)
            if meet.kind == "disjoint":
                continue
            if meet.kind == "overlap":
                if adjacent:
                    result.hard_error = ImmersionViolation(
                        f"branch {b1}: segments {i1},{i2} overlap (partial fold)"
                    )
                    return result
                result.violations.append(
                    Violation(
                        "NON_TRANSVERSE",
                        f"collinear overlapping segments ({b1},{i1}) and ({b2},{i2})",
                        ((b1, i1), (b2, i2)),
                    )
                )
                continue
            if meet.kind == "touch":
                if adjacent:
                    shared = set(p for p in (p1, p2) if p in (q1, q2))
                    if meet.point in shared:
                        continue
                result.violations.append(
                    Violation(
                        "VERTEX_INTERSECTION",
                        f"segments ({b1},{i1}) and ({b2},{i2}) meet at a vertex "
                        f"({meet.point.x},{meet.point.y})",
                        ((b1, i1), (b2, i2)),
                    )
                )
                continue
            # proper transversal crossing
            inc = (
                Incidence(b1, i1, meet.t),
                Incidence(b2, i2, meet.u),
            )
            crossings.setdefault(meet.point.key(), []).append(inc)

    for key in sorted(crossings):
        incs = crossings[key]
        if len(incs) > 1:
            involved = tuple(
                (i.branch, i.segment) for pair in incs for i in pair
            )
            result.violations.append(
                Violation(
                    "TRIPLE_POINT",
                    f"three or more segments concurrent at ({key[0]},{key[1]})",
                    involved,
                )
            )
            continue
        pair = incs[0]
        ordered = tuple(sorted(pair, key=lambda i: (i.branch, i.segment, i.param)))
        result.double_points.append(
            DoublePoint(position=Point2(key[0], key[1]), incidences=ordered)
        )

    result.tangencies = _scan_tangencies(branches)
    return result


def _scan_tangencies(branches: Sequence[Branch]) -> List[Tangency]:
    found: List[Tangency] = []
    for idx, branch in enumerate(branches):
        verts = branch.vertices
        n = len(verts)
        candidates = range(n) if branch.is_closed else range(1, n - 1)
        for i in candidates:
            x_prev = verts[(i - 1) % n].x
            x_cur = verts[i].x
            x_next = verts[(i + 1) % n].x
            if x_prev == x_cur or x_next == x_cur:
                continue  # vertical segment; reported elsewhere
            if x_prev > x_cur and x_next > x_cur:
                found.append(Tangency(idx, i, "xmin"))
            elif x_prev < x_cur and x_next < x_cur:
                found.append(Tangency(idx, i, "xmax"))
    found.sort(key=lambda t: (branches[t.branch].vertices[t.vertex].x, t.branch, t.vertex))
    return found


def _raise_for_violations(analysis: Analysis) -> None:
    if analysis.hard_error is not None:
        raise analysis.hard_error
    for v in analysis.violations:
        if v.code == "VERTICAL_SEGMENT":
            raise VerticalSegment(v.description)
        if v.code in ("TRIPLE_POINT", "NON_TRANSVERSE"):
            raise TripleOrTangentIntersection(v.description)
        if v.code == "VERTEX_INTERSECTION":
            raise VertexIntersection(v.description)


def validate(branches: Sequence[Branch]) -> Divide:
    """Check Definition-level invariants and return a Divide with derived data."""
    analysis = analyze(branches)
    _raise_for_violations(analysis)
    return Divide(
        branches=tuple(branches),
        double_points=tuple(analysis.double_points),
        tangencies=tuple(analysis.tangencies),
    )


def compute_double_points(divide: Divide) -> List[DoublePoint]:
    """Recompute the transversal self-intersections, ordered by position."""
    analysis = analyze(divide.branches)
    _raise_for_violations(analysis)
    return list(analysis.double_points)


def compute_tangencies(divide: Divide) -> List[Tangency]:
    """Recompute the x-reversal vertices, ordered by x."""
    for idx, branch in enumerate(divide.branches):
        for i, a, b in branch.segments():
            if a.x == b.x:
                raise VerticalSegment(f"branch {idx} segment {i} is exactly vertical")
    return _scan_tangencies(divide.branches)


# ---------------------------------------------------------------------------
# genericity

def genericity_check(divide: Divide) -> GenericityReport:
    """Diagnose the conditions a divide must satisfy before diagram building.

    (a) tangencies, double points and open-branch endpoints have pairwise
        distinct x-coordinates; (b) no tangency sits on a double point or the
        boundary; (c) no vertical segment; (d) the downward ray from every
        open-branch endpoint misses the rest of the divide.
    """
    analysis = analyze(divide.branches)
    violations: List[Violation] = list(analysis.violations)
    if analysis.hard_error is not None:
        violations.append(Violation("NON_TRANSVERSE", str(analysis.hard_error)))
        return GenericityReport.from_violations(violations)

    branches = divide.branches
    dps = analysis.double_points
    tangs = analysis.tangencies

    critical: List[Tuple[Fraction, str]] = []
    for t in tangs:
        critical.append((branches[t.branch].vertices[t.vertex].x, f"tangency {t.branch}/{t.vertex}"))
    for d in dps:
        critical.append((d.position.x, f"double point at ({d.position.x},{d.position.y})"))
    for idx, branch in enumerate(branches):
        if not branch.is_closed:
            for end in (0, len(branch.vertices) - 1):
                critical.append((branch.vertices[end].x, f"endpoint {idx}/{end}"))
    by_x: Dict[Fraction, List[str]] = {}
    for x, label in critical:
        by_x.setdefault(x, []).append(label)
    for x in sorted(by_x):
        labels = by_x[x]
        if len(labels) > 1:
            violations.append(
                Violation("SHARED_X", f"x={x} shared by: " + "; ".join(labels), tuple(labels))
            )

    dp_positions = {d.position for d in dps}
    for t in tangs:
        p = branches[t.branch].vertices[t.vertex]
        if p in dp_positions:
            violations.append(
                Violation("TANGENCY_AT_DOUBLE", f"tangency {t.branch}/{t.vertex} is a double point", (t,))
            )
        if not strictly_inside_radius(p, R_INNER):
            violations.append(
                Violation("TANGENCY_AT_BOUNDARY", f"tangency {t.branch}/{t.vertex} on the boundary", (t,))
            )

    violations.extend(_ray_violations(branches))
    return GenericityReport.from_violations(violations)


def _ray_violations(branches: Sequence[Branch]) -> List[Violation]:
    out: List[Violation] = []
    for idx, branch in enumerate(branches):
        if branch.is_closed:
            continue
        n = len(branch.vertices)
        for end_vertex, incident_seg in ((0, 0), (n - 1, n - 2)):
            p = branch.vertices[end_vertex]
            for jdx, other in enumerate(branches):
                for i, a, b in other.segments():
                    if jdx == idx and i == incident_seg:
                        continue
                    if downward_ray_hits_segment(p, a, b):
                        out.append(
                            Violation(
                                "ENDPOINT_RAY_BLOCKED",
                                f"downward ray from endpoint {idx}/{end_vertex} "
                                f"hits segment ({jdx},{i})",
                                ((idx, end_vertex), (jdx, i)),
                            )
                        )
    return out


# ---------------------------------------------------------------------------
# perturbation

PERTURB_ATTEMPTS = 64


def perturb_to_generic(divide: Divide, epsilon=Fraction(1, 1024), seed: int = 0) -> Divide:
    """Jitter vertices by seeded rational offsets until the divide is generic.

    The identity perturbation is tried first, so a generic divide comes back
    unchanged.  When the input already satisfies the immersion rules the
    double-point count is required to survive the jitter.
    """
    epsilon = rat(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    branches = divide.branches
    base = analyze(branches)
    if not base.perturbable() and not base.ok:
        raise base.hard_error or PerturbationFailed(
            "divide has non-perturbable violations: "
            + "; ".join(v.description for v in base.violations)
        )
    expected_dp = len(base.double_points) if not base.violations else None

    if base.ok:
        report = genericity_check(divide)
        if report.generic:
            return validate(branches)

    last_problem = "no attempts made"
    for attempt in range(PERTURB_ATTEMPTS):
        if attempt == 0:
            candidate = branches
        else:
            rng = random.Random(f"{seed}:{attempt}")
            scale = epsilon / (1 << min(attempt // 8, 8))
            candidate = tuple(
                _jitter_branch(branch, rng, scale) for branch in branches
            )
        analysis = analyze(candidate)
        if not analysis.ok:
            last_problem = (
                str(analysis.hard_error)
                if analysis.hard_error
                else "; ".join(v.description for v in analysis.violations)
            )
            continue
        if expected_dp is not None and len(analysis.double_points) != expected_dp:
            last_problem = (
                f"double-point count changed ({expected_dp} -> {len(analysis.double_points)})"
            )
            continue
        result = Divide(
            branches=candidate,
            double_points=tuple(analysis.double_points),
            tangencies=tuple(analysis.tangencies),
        )
        report = genericity_check(result)
        if report.generic:
            return result
        last_problem = "; ".join(v.description for v in report.violations)
    raise PerturbationFailed(f"not generic after {PERTURB_ATTEMPTS} attempts: {last_problem}")


def _jitter_branch(branch: Branch, rng: random.Random, scale: Fraction) -> Branch:
    new_vertices = []
    n = len(branch.vertices)
    for i, v in enumerate(branch.vertices):
        dx = scale * Fraction(rng.randrange(-64, 65), 64)
        dy = scale * Fraction(rng.randrange(-64, 65), 64)
        moved = Point2(v.x + dx, v.y + dy)
        is_endpoint = not branch.is_closed and i in (0, n - 1)
        if is_endpoint:
            if not in_closed_annulus(moved, R_INNER, R_OUTER):
                moved = v
        else:
            if not strictly_inside_radius(moved, R_INNER):
                moved = v
        new_vertices.append(moved)
    return Branch(branch.kind, tuple(new_vertices))


# ---------------------------------------------------------------------------
# endpoint normalization

NORMALIZE_RADII = (Fraction(97, 100), Fraction(96, 100), Fraction(95, 100))
ARC_STEP_DEGREES = 10


def normalize_endpoints(divide: Divide) -> Divide:
    """Reroute endpoints whose downward ray is obstructed.

    The offending branch end is extended along an arc just inside the
    boundary annulus to a spot on the lower boundary arc, where the ray is
    structurally clear.  New tangencies along the detour are legal.
    """
    branches = list(divide.branches)
    reroute_index = 0
    for _ in range(16):
        blocked = _first_blocked_endpoint(branches)
        if blocked is None:
            return validate(branches)
        b_idx, end_vertex = blocked
        candidate = _reroute(branches, b_idx, end_vertex, reroute_index)
        if candidate is None:
            raise NormalizationFailed(
                f"could not reroute endpoint {b_idx}/{end_vertex} around the annulus"
            )
        branches = candidate
        reroute_index += 1
    raise NormalizationFailed("attempt budget exhausted")


def _first_blocked_endpoint(branches: Sequence[Branch]) -> Optional[Tuple[int, int]]:
    for v in _ray_violations(branches):
        return v.elements[0]
    return None


def _polar(r: Fraction, theta: float) -> Point2:
    return Point2(
        approx_fraction(float(r) * math.cos(theta)),
        approx_fraction(float(r) * math.sin(theta)),
    )


def _reroute(
    branches: List[Branch], b_idx: int, end_vertex: int, reroute_index: int
) -> Optional[List[Branch]]:
    branch = branches[b_idx]
    p = branch.vertices[end_vertex]
    theta_p = math.atan2(float(p.y), float(p.x))
    target = -math.pi / 2 + ((-1) ** reroute_index) * (reroute_index + 1) * 0.07
    for radius in NORMALIZE_RADII:
        for direction in (1, -1):
            path = _arc_path(theta_p, target, direction, radius)
            if path is None:
                continue
            candidate = _splice_tail(branches, b_idx, end_vertex, path)
            if candidate is None:
                continue
            analysis = analyze(candidate)
            if analysis.hard_error is not None:
                continue
            if any(v.code in ("VERTEX_INTERSECTION", "NON_TRANSVERSE", "TRIPLE_POINT")
                   for v in analysis.violations):
                continue
            if any(
                v.elements and v.elements[0] == (b_idx, _end_index(candidate[b_idx], end_vertex))
                for v in _ray_violations(candidate)
            ):
                continue
            return candidate
    return None


def _end_index(branch: Branch, original_end: int) -> int:
    return 0 if original_end == 0 else len(branch.vertices) - 1


def _arc_path(theta_from: float, theta_to: float, direction: int, radius: Fraction):
    """Vertices walking the annulus from theta_from to theta_to, plus the new endpoint."""
    step = math.radians(ARC_STEP_DEGREES) * direction
    span = (theta_to - theta_from) * direction
    span = span % (2 * math.pi)
    if span == 0:
        span = 2 * math.pi
    n_steps = max(1, int(math.ceil(span / abs(step))))
    pts = [_polar(radius, theta_from)]
    for k in range(1, n_steps):
        pts.append(_polar(radius, theta_from + k * step))
    pts.append(_polar(radius, theta_to))
    endpoint = _polar(Fraction(99, 100), theta_to)
    pts.append(endpoint)
    # drop accidental duplicates from rounding
    dedup = [pts[0]]
    for q in pts[1:]:
        if q != dedup[-1]:
            dedup.append(q)
    if len(dedup) < 2:
        return None
    return dedup


def _splice_tail(
    branches: List[Branch], b_idx: int, end_vertex: int, path: List[Point2]
) -> Optional[List[Branch]]:
    branch = branches[b_idx]
    verts = list(branch.vertices)
    if end_vertex == 0:
        new_verts = list(reversed(path)) + verts[1:]
    else:
        new_verts = verts[:-1] + path
    try:
        new_branch = Branch(branch.kind, tuple(new_verts))
    except ValueError:
        return None
    out = list(branches)
    out[b_idx] = new_branch
    return out
