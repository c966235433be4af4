"""Divides in the unit disk, their link diagrams, and exact link invariants."""

from .geometry import Point2, pt, rat
from .model import (
    Branch,
    Divide,
    DivideError,
    DoublePoint,
    GenericityReport,
    Tangency,
    compute_double_points,
    compute_tangencies,
    genericity_check,
    normalize_endpoints,
    perturb_to_generic,
    validate,
)
from .dsl import DivideDocument, parse, serialize
from .generators import canned, random_divide, torus_divide
from .diagram import (
    LinkDiagram,
    NotGeneric,
    build_diagram,
    gauss_code,
    involution_check,
    orient_and_sign,
    pd_code,
)
from .invariants import (
    alexander_fox,
    alexander_from_conway,
    component_count,
    conway_skein,
    jones_kauffman,
    normalize_alexander,
    writhe_and_linking,
)
from .poly import LaurentPolynomial
from .render import RenderConfig, render_diagram_svg, render_divide_svg

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "Divide",
    "DivideDocument",
    "DivideError",
    "DoublePoint",
    "GenericityReport",
    "LaurentPolynomial",
    "LinkDiagram",
    "NotGeneric",
    "Point2",
    "RenderConfig",
    "Tangency",
    "alexander_fox",
    "alexander_from_conway",
    "build_diagram",
    "canned",
    "component_count",
    "compute_double_points",
    "compute_tangencies",
    "conway_skein",
    "gauss_code",
    "genericity_check",
    "involution_check",
    "jones_kauffman",
    "normalize_alexander",
    "normalize_endpoints",
    "orient_and_sign",
    "parse",
    "pd_code",
    "perturb_to_generic",
    "pt",
    "random_divide",
    "rat",
    "render_diagram_svg",
    "render_divide_svg",
    "serialize",
    "torus_divide",
    "validate",
    "writhe_and_linking",
]
