"""Programmatic divide constructions: torus-type curves, canned figures,
seeded random chord systems.

Float trigonometry only ever produces candidate vertices; every coordinate is
snapped to the rational grid before any predicate runs, and every generated
divide goes through validate/perturb like user input.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from math import gcd
from typing import List, Optional

try:
    from importlib.resources import files as _resource_files
except ImportError:  # pragma: no cover
    from importlib_resources import files as _resource_files

from . import dsl
from .geometry import Point2, approx_fraction
from .model import (
    Branch,
    Divide,
    DivideError,
    OPEN,
    genericity_check,
    perturb_to_generic,
    validate,
)

LISSAJOUS_SCALE = Fraction(2, 3)   # keeps the [-1,1]^2 curve box inside radius 0.98
SHEAR = Fraction(1, 64)            # x <- x + y/64 splits coincident extremal x values
ENDPOINT_RADIUS = Fraction(99, 100)


class GenerationFailed(DivideError):
    pass


class UnknownName(DivideError):
    pass


def _snap(x: float, y: float) -> Point2:
    return Point2(approx_fraction(x), approx_fraction(y))


def _shear(p: Point2) -> Point2:
    return Point2(p.x + p.y * SHEAR, p.y)


def _radial_extension(p: Point2) -> Point2:
    """Push a point radially out to the boundary annulus."""
    r = math.sqrt(float(p.norm2()))
    f = float(ENDPOINT_RADIUS) / r
    return _snap(float(p.x) * f, float(p.y) * f)


def _dedup(points: List[Point2]) -> List[Point2]:
    out = [points[0]]
    for p in points[1:]:
        if p != out[-1]:
            out.append(p)
    return out


def torus_divide(p: int, q: int, samples: Optional[int] = None, seed: int = 0) -> Divide:
    """The divide whose link is the (p, q) torus knot or link.

    For coprime p, q this samples the Lissajous curve
    t -> (cos(p*pi*t), cos(q*pi*t)) as one open branch; it carries
    (p-1)(q-1)/2 double points.  For p = 2 and even q the two-branch wave
    construction is used (gcd many components).  Other non-coprime pairs are
    not supported.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    d = gcd(p, q)
    if d == 1:
        branches = [_lissajous_branch(p, q, samples)]
    elif p == 2:
        branches = _two_branch_wave(q // 2, samples)
    else:
        raise ValueError(
            f"torus divide for gcd(p,q)={d} with p={p} is not supported (only gcd 1 or p=2)"
        )
    divide = Divide.unchecked(tuple(branches))
    return perturb_to_generic(divide, epsilon=Fraction(1, 4096), seed=seed)


def _lissajous_branch(p: int, q: int, samples: Optional[int]) -> Branch:
    n = samples if samples is not None else max(8 * p * q, 32)
    if n < 8 * p * q:
        raise ValueError(f"samples must be at least 8*p*q = {8 * p * q}")
    s = float(LISSAJOUS_SCALE)
    raw = [
        _snap(s * math.cos(p * math.pi * i / n), s * math.cos(q * math.pi * i / n))
        for i in range(n + 1)
    ]
    pts = _dedup([_shear(r) for r in raw])
    start = _radial_extension(pts[0])
    end = _radial_extension(pts[-1])
    return Branch(OPEN, tuple([start] + pts + [end]))


def _two_branch_wave(k: int, samples: Optional[int]) -> List[Branch]:
    """Two open branches meeting in k double points (the (2, 2k) torus link)."""
    n = samples if samples is not None else max(16 * k, 32)
    amp, half = 0.35, 0.8
    wave = []
    for i in range(n + 1):
        u = i / n
        wave.append(_snap(-half + 2 * half * u, amp * math.cos(k * math.pi * u)))
    wave = _dedup(wave)
    b1 = Branch(OPEN, tuple([_radial_extension(wave[0])] + wave + [_radial_extension(wave[-1])]))
    chord = [_snap(-0.78, -0.18), _snap(0.0, 0.0), _snap(0.78, 0.18)]
    b2 = Branch(OPEN, tuple([_radial_extension(chord[0])] + chord + [_radial_extension(chord[-1])]))
    return [b1, b2]


CANNED_NAMES = ("monotone", "cross", "c-arc", "e6", "e6-alt1", "e6-alt2", "ac-10-145")


def canned(name: str) -> Divide:
    """A pre-validated corpus divide by name."""
    if name not in CANNED_NAMES:
        raise UnknownName(f"unknown canned divide {name!r}; choose from {CANNED_NAMES}")
    resource = _resource_files("dividelinks").joinpath("corpus", f"{name}.divide")
    doc = dsl.parse(resource.read_text(encoding="utf-8"))
    return validate(doc.to_branches())


def random_divide(n_branches: int, max_vertices: int = 8, seed: int = 0) -> Divide:
    """Seeded random system of open branches with endpoints on the lower arc.

    Output is always validated and generic; generation retries with fresh
    seeds derived from the given one until that holds.
    """
    if not 1 <= n_branches <= 8:
        raise ValueError("n_branches must be in 1..8")
    if not 2 <= max_vertices <= 40:
        raise ValueError("max_vertices must be in 2..40")
    for attempt in range(96):
        rng = random.Random(f"random-divide:{seed}:{attempt}")
        branches = [_random_branch(rng, i, n_branches, max_vertices) for i in range(n_branches)]
        try:
            divide = perturb_to_generic(
                Divide.unchecked(tuple(branches)), epsilon=Fraction(1, 512), seed=attempt
            )
        except DivideError:
            continue
        if genericity_check(divide).generic:
            return divide
    raise GenerationFailed(
        f"no generic divide with {n_branches} branches after 96 attempts (seed {seed})"
    )


def _random_branch(rng: random.Random, index: int, total: int, max_vertices: int) -> Branch:
    # endpoints on the lower boundary arc, angularly separated per branch
    lo, hi = math.radians(-155), math.radians(-25)
    width = (hi - lo) / total
    t1 = lo + width * index + width * 0.15 * rng.random()
    t2 = lo + width * (index + 1) - width * 0.15 * rng.random()
    start = _snap(0.99 * math.cos(t1), 0.99 * math.sin(t1))
    end = _snap(0.99 * math.cos(t2), 0.99 * math.sin(t2))
    n_interior = rng.randint(1, max(1, min(max_vertices - 2, 4)))
    interior = []
    for k in range(n_interior):
        u = (k + 1) / (n_interior + 1)
        base_x = float(start.x) + (float(end.x) - float(start.x)) * u
        x = base_x + rng.uniform(-0.25, 0.25)
        y = rng.uniform(-0.55, 0.55)
        x = max(-0.8, min(0.8, x))
        interior.append(_snap(x, y))
    return Branch(OPEN, tuple([start] + interior + [end]))
