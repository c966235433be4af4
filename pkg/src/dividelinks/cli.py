"""Command-line interface: one verb per pipeline stage.

Exit codes: 0 success, 1 validation failure, 2 parse failure,
3 resource limit, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import dsl
from .diagram import (
    LinkDiagram,
    NotGeneric,
    build_diagram,
    gauss_code,
    involution_check,
    pd_code,
)
from .generators import CANNED_NAMES, canned, random_divide, torus_divide
from .invariants import (
    MultiComponent,
    ResourceLimit,
    alexander_fox,
    component_count,
    conway_skein,
    jones_kauffman,
    normalize_alexander,
    writhe_and_linking,
)
from .model import Divide, DivideError, genericity_check, normalize_endpoints, perturb_to_generic
from .render import RenderConfig, render_diagram_svg, render_divide_svg

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3
EXIT_INTERNAL = 4


class CalibrationDrift(Exception):
    pass


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divide",
        description="Divides in the disk: validation, link diagrams, invariants.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    parser.add_argument("--epsilon", type=_fraction, default=Fraction(1, 1024),
                        help="perturbation magnitude (rational, e.g. 1/1024)")
    parser.add_argument("--mirror-gap", type=_fraction, default=Fraction(1, 2),
                        help="distance between the disk and the mirror line")
    parser.add_argument("--jones-cap", type=int, default=20)
    parser.add_argument("--conway-cap", type=int, default=24)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a .divide file")
    p.add_argument("file")

    p = sub.add_parser("info", help="counts and genericity report")
    p.add_argument("file")

    p = sub.add_parser("perturb", help="perturb to generic position")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output .divide path (default: stdout)")
    p.add_argument("--normalize-endpoints", action="store_true",
                   help="reroute endpoints with blocked downward rays first")

    p = sub.add_parser("diagram", help="build the link diagram")
    p.add_argument("file")
    p.add_argument("--pd", action="store_true", help="print the PD code")
    p.add_argument("--gauss", action="store_true", help="print the Gauss code")
    p.add_argument("--svg", metavar="PATH", help="write an SVG rendering")
    p.add_argument("--svg-divide", metavar="PATH", help="write an SVG of the divide itself")

    p = sub.add_parser("invariants", help="compute link invariants")
    p.add_argument("file")
    p.add_argument("--alexander", action="store_true")
    p.add_argument("--conway", action="store_true")
    p.add_argument("--jones", action="store_true")
    p.add_argument("--linking", action="store_true")
    p.add_argument("--all", action="store_true")

    p = sub.add_parser("gen", help="generate a divide")
    gen_sub = p.add_subparsers(dest="generator", required=True)
    g = gen_sub.add_parser("torus", help="(p,q) torus-type divide")
    g.add_argument("p", type=int)
    g.add_argument("q", type=int)
    g.add_argument("-o", "--output")
    g = gen_sub.add_parser("example", help="canned example divide")
    g.add_argument("name", choices=CANNED_NAMES)
    g.add_argument("-o", "--output")
    g = gen_sub.add_parser("random", help="seeded random divide")
    g.add_argument("branches", type=int)
    g.add_argument("--max-vertices", type=int, default=8)
    g.add_argument("-o", "--output")

    p = sub.add_parser("selftest", help="verify the frozen drawing conventions")
    p.add_argument("--flip-convention", action="store_true",
                   help="test hook: invert the slope rule (must fail)")
    return parser


def _load_divide(path: str) -> Divide:
    doc = dsl.load(path)
    from .model import validate
    return validate(doc.to_branches())


def _emit(args, payload: dict, human_lines: List[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _write_divide(divide: Divide, output: Optional[str], name: Optional[str] = None) -> str:
    doc = dsl.DivideDocument.from_branches(divide.branches, name=name)
    text = dsl.serialize(doc)
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def cmd_validate(args) -> int:
    divide = _load_divide(args.file)
    payload = {
        "command": "validate",
        "ok": True,
        "branches": len(divide.branches),
        "double_points": len(divide.double_points),
        "tangencies": len(divide.tangencies),
    }
    _emit(args, payload, [
        f"ok: {len(divide.branches)} branch(es), "
        f"{len(divide.double_points)} double point(s), "
        f"{len(divide.tangencies)} tangency(ies)"
    ])
    return EXIT_OK


def cmd_info(args) -> int:
    divide = _load_divide(args.file)
    report = genericity_check(divide)
    payload = {
        "command": "info",
        "branches": [
            {"kind": b.kind, "vertices": len(b.vertices)} for b in divide.branches
        ],
        "double_points": len(divide.double_points),
        "tangencies": len(divide.tangencies),
        "generic": report.generic,
        "violations": [
            {"code": v.code, "description": v.description} for v in report.violations
        ],
    }
    lines = [
        f"branches: {len(divide.branches)}",
        f"double points: {len(divide.double_points)}",
        f"tangencies: {len(divide.tangencies)}",
        f"generic: {'yes' if report.generic else 'no'}",
    ]
    lines += [f"  {v.code}: {v.description}" for v in report.violations]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_perturb(args) -> int:
    doc = dsl.load(args.file)
    divide = Divide.unchecked(doc.to_branches())
    if args.normalize_endpoints:
        from .model import validate
        divide = normalize_endpoints(validate(doc.to_branches()))
    result = perturb_to_generic(divide, epsilon=args.epsilon, seed=args.seed)
    text = _write_divide(result, args.output, name=doc.name)
    payload = {"command": "perturb", "ok": True, "output": args.output}
    if args.output:
        _emit(args, payload, [f"wrote {args.output}"])
    else:
        if args.json:
            payload["divide"] = text
            _emit(args, payload, [])
        else:
            sys.stdout.write(text)
    return EXIT_OK


def _diagram_for(args, divide: Divide) -> LinkDiagram:
    return build_diagram(divide, gap=args.mirror_gap)


def cmd_diagram(args) -> int:
    divide = _load_divide(args.file)
    diagram = _diagram_for(args, divide)
    pd = pd_code(diagram)
    payload = {
        "command": "diagram",
        "crossings": diagram.crossing_count,
        "components": diagram.component_count,
        "writhe": diagram.writhe(),
        "roles": diagram.roles(),
    }
    lines = [
        f"crossings: {diagram.crossing_count}",
        f"components: {diagram.component_count}",
        f"writhe: {diagram.writhe()}",
    ]
    if args.pd:
        payload["pd"] = pd.text()
        lines.append(pd.text())
    if args.gauss:
        g = gauss_code(diagram)
        payload["gauss"] = g.text()
        lines.append(g.text())
    if args.svg:
        svg = render_diagram_svg(diagram, RenderConfig())
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        payload["svg"] = args.svg
        lines.append(f"wrote {args.svg}")
    if args.svg_divide:
        svg = render_divide_svg(divide, RenderConfig())
        with open(args.svg_divide, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        payload["svg_divide"] = args.svg_divide
        lines.append(f"wrote {args.svg_divide}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_invariants(args) -> int:
    divide = _load_divide(args.file)
    diagram = _diagram_for(args, divide)
    want_all = args.all or not (args.alexander or args.conway or args.jones or args.linking)
    payload = {"command": "invariants", "components": diagram.component_count,
               "crossings": diagram.crossing_count}
    lines: List[str] = []
    if args.alexander or want_all:
        if diagram.component_count == 1:
            delta = alexander_fox(diagram)
            payload["alexander"] = str(delta)
            lines.append(f"alexander: {delta}")
        else:
            payload["alexander"] = None
            lines.append("alexander: (multi-component; see conway)")
    if args.conway or want_all:
        nabla = conway_skein(diagram, cap=args.conway_cap)
        payload["conway"] = str(nabla)
        lines.append(f"conway: {nabla}")
    if args.jones or want_all:
        v = jones_kauffman(diagram, cap=args.jones_cap)
        payload["jones"] = str(v)
        lines.append(f"jones: {v}")
    if args.linking or want_all:
        writhe, matrix = writhe_and_linking(diagram)
        payload["writhe"] = writhe
        payload["linking"] = [list(row) for row in matrix]
        lines.append(f"writhe: {writhe}")
        lines.append("linking: " + json.dumps([list(row) for row in matrix]))
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.generator == "torus":
        divide = torus_divide(args.p, args.q, seed=args.seed)
        name = f"torus-{args.p}-{args.q}"
    elif args.generator == "example":
        divide = canned(args.name)
        name = args.name
    else:
        divide = random_divide(args.branches, max_vertices=args.max_vertices, seed=args.seed)
        name = f"random-{args.branches}-{args.seed}"
    text = _write_divide(divide, args.output, name=name)
    if args.output:
        _emit(args, {"command": "gen", "ok": True, "output": args.output},
              [f"wrote {args.output}"])
    else:
        if args.json:
            _emit(args, {"command": "gen", "ok": True, "divide": text}, [])
        else:
            sys.stdout.write(text)
    return EXIT_OK


def run_selftest(flip_convention: bool = False, jones_cap: int = 20) -> List[dict]:
    """Calibration oracles for the frozen drawing conventions."""
    from .poly import LaurentPolynomial

    checks: List[dict] = []
    kwargs = {}
    if flip_convention:
        from . import diagram as _diagram_mod
        kwargs["slope_larger_over"] = not _diagram_mod.SLOPE_LARGER_OVER

    cross = canned("cross")
    d_cross = build_diagram(cross, **kwargs)
    _, linking = writhe_and_linking(d_cross)
    checks.append({
        "name": "cross divide gives the Hopf link with linking +1",
        "expected": "1",
        "actual": str(linking[0][1]),
        "passed": linking[0][1] == 1,
    })
    nabla = conway_skein(d_cross)
    checks.append({
        "name": "cross divide Conway polynomial is z",
        "expected": "z",
        "actual": str(nabla),
        "passed": nabla == LaurentPolynomial.var("z"),
    })

    trefoil = torus_divide(2, 3)
    d_tref = build_diagram(trefoil, **kwargs)
    v = jones_kauffman(d_tref, cap=jones_cap)
    right_trefoil = LaurentPolynomial.from_dict("t", {4: -1, 3: 1, 1: 1})
    checks.append({
        "name": "(2,3) torus divide gives the right-handed trefoil (Jones)",
        "expected": str(right_trefoil),
        "actual": str(v),
        "passed": v == right_trefoil,
    })
    delta = normalize_alexander(alexander_fox(d_tref))
    tref_delta = LaurentPolynomial.from_dict("t", {2: 1, 1: -1, 0: 1})
    checks.append({
        "name": "(2,3) torus divide Alexander polynomial",
        "expected": str(tref_delta),
        "actual": str(delta),
        "passed": delta == tref_delta,
    })

    for name in CANNED_NAMES:
        diag = build_diagram(canned(name))
        checks.append({
            "name": f"involution symmetry on {name}",
            "expected": "true",
            "actual": str(involution_check(diag)).lower(),
            "passed": involution_check(diag),
        })
    return checks


def cmd_selftest(args) -> int:
    checks = run_selftest(flip_convention=args.flip_convention, jones_cap=args.jones_cap)
    ok = all(c["passed"] for c in checks)
    lines = [
        f"{'ok  ' if c['passed'] else 'FAIL'} {c['name']}: expected {c['expected']}, got {c['actual']}"
        for c in checks
    ]
    _emit(args, {"command": "selftest", "ok": ok, "checks": checks}, lines)
    if not ok:
        raise CalibrationDrift("selftest failed")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "info": cmd_info,
        "perturb": cmd_perturb,
        "diagram": cmd_diagram,
        "invariants": cmd_invariants,
        "gen": cmd_gen,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except (dsl.DivideSyntaxError, dsl.RangeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DivideError, MultiComponent, CalibrationDrift) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
