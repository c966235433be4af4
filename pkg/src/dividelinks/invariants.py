"""Link invariants over diagrams: linking data, Alexander (Fox calculus),
Conway (skein recursion) and Jones (Kauffman bracket).

All engines run on a small oriented crossing-record structure that can be
derived from a LinkDiagram or from a PD code, so the invariant code is
independent of how a diagram was produced.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .diagram import Component, LinkDiagram, PDCode
from .poly import LaurentPolynomial, ZeroPolynomial


class ResourceLimit(Exception):
    pass


class MultiComponent(Exception):
    pass


class DegenerateDiagram(Exception):
    pass


DEFAULT_CONWAY_CAP = 24
DEFAULT_JONES_CAP = 20


@dataclass(frozen=True)
class CrossRec:
    u_in: int
    u_out: int
    o_in: int
    o_out: int
    sign: int


@dataclass(frozen=True)
class DiagramData:
    """Oriented diagram as crossing records over numbered edges."""

    crossings: Tuple[CrossRec, ...]
    free_loops: int = 0

    @property
    def size(self) -> int:
        return len(self.crossings)

    def edges(self) -> List[int]:
        out = set()
        for r in self.crossings:
            out.update((r.u_in, r.u_out, r.o_in, r.o_out))
        return sorted(out)

    def successor_map(self) -> Dict[int, Tuple[int, str]]:
        nxt: Dict[int, Tuple[int, str]] = {}
        for i, r in enumerate(self.crossings):
            nxt[r.u_in] = (i, "under")
            nxt[r.o_in] = (i, "over")
        return nxt

    def cycles(self) -> List[List[int]]:
        """Edge cycles (the link components that carry crossings)."""
        nxt: Dict[int, int] = {}
        for r in self.crossings:
            nxt[r.u_in] = r.u_out
            nxt[r.o_in] = r.o_out
        seen = set()
        cycles = []
        for e in sorted(nxt):
            if e in seen:
                continue
            cyc = []
            cur = e
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = nxt[cur]
            cycles.append(cyc)
        return cycles

    def component_count(self) -> int:
        return len(self.cycles()) + self.free_loops


def records_from_diagram(diagram: LinkDiagram) -> DiagramData:
    free = 0
    edge_id = 0
    u_in: Dict[int, int] = {}
    u_out: Dict[int, int] = {}
    o_in: Dict[int, int] = {}
    o_out: Dict[int, int] = {}
    for comp in diagram.components:
        if not comp.passages:
            free += 1
            continue
        k = len(comp.passages)
        first = edge_id
        for i, p in enumerate(comp.passages):
            incoming = first + (i - 1) % k
            outgoing = first + i
            if p.is_over:
                o_in[p.crossing] = incoming
                o_out[p.crossing] = outgoing
            else:
                u_in[p.crossing] = incoming
                u_out[p.crossing] = outgoing
        edge_id += k
    recs = tuple(
        CrossRec(
            u_in=u_in[c.cid],
            u_out=u_out[c.cid],
            o_in=o_in[c.cid],
            o_out=o_out[c.cid],
            sign=c.sign,
        )
        for c in diagram.crossings
    )
    return DiagramData(crossings=recs, free_loops=free)


def records_from_pd(pd: PDCode) -> DiagramData:
    recs = []
    succ: Dict[int, int] = {}
    for first, count in pd.component_edge_ranges:
        for k in range(count):
            e = first + k
            succ[e] = first + (k + 1) % count
    for (a, b, c, d), sign in zip(pd.tuples, pd.signs):
        if sign > 0:
            rec = CrossRec(u_in=a, u_out=c, o_in=d, o_out=b, sign=sign)
        else:
            rec = CrossRec(u_in=a, u_out=c, o_in=b, o_out=d, sign=sign)
        if succ.get(rec.u_in) != rec.u_out or succ.get(rec.o_in) != rec.o_out:
            raise ValueError("PD code inconsistent with its component edge ranges")
        recs.append(rec)
    return DiagramData(crossings=tuple(recs), free_loops=pd.crossingless_components)


def _as_records(diagram) -> DiagramData:
    if isinstance(diagram, DiagramData):
        return diagram
    if isinstance(diagram, LinkDiagram):
        return records_from_diagram(diagram)
    if isinstance(diagram, PDCode):
        return records_from_pd(diagram)
    raise TypeError(f"expected LinkDiagram, PDCode or DiagramData, got {type(diagram)}")


def mirror_records(data: DiagramData) -> DiagramData:
    """Swap over and under strand at every crossing."""
    recs = tuple(
        CrossRec(u_in=r.o_in, u_out=r.o_out, o_in=r.u_in, o_out=r.u_out, sign=-r.sign)
        for r in data.crossings
    )
    return DiagramData(crossings=recs, free_loops=data.free_loops)


# ---------------------------------------------------------------------------
# counting invariants

def component_count(diagram) -> int:
    if isinstance(diagram, LinkDiagram):
        return diagram.component_count
    return _as_records(diagram).component_count()


def writhe_and_linking(diagram: LinkDiagram) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
    """Writhe and the symmetric linking matrix (diagonal zero)."""
    writhe = sum(c.sign for c in diagram.crossings)
    n = diagram.component_count
    comp_of: Dict[int, List[int]] = {}
    for ci, comp in enumerate(diagram.components):
        for p in comp.passages:
            comp_of.setdefault(p.crossing, []).append(ci)
    matrix = [[0] * n for _ in range(n)]
    for c in diagram.crossings:
        owners = comp_of[c.cid]
        i, j = owners[0], owners[1]
        if i != j:
            matrix[i][j] += c.sign
            matrix[j][i] += c.sign
    for i in range(n):
        for j in range(n):
            if matrix[i][j] % 2 != 0:
                raise DegenerateDiagram("odd inter-component crossing sum")
            matrix[i][j] //= 2
    return writhe, tuple(tuple(row) for row in matrix)


# ---------------------------------------------------------------------------
# Alexander polynomial via Fox calculus on the Wirtinger presentation

def normalize_alexander(p: LaurentPolynomial) -> LaurentPolynomial:
    """Scale by +-t^k so the minimum exponent is 0 and the constant term positive."""
    if p.is_zero:
        raise ZeroPolynomial("cannot normalize the zero polynomial")
    lo = p.coeffs[0][0]
    shifted = p.shift(-lo)
    if shifted.coeffs[0][1] < 0:
        shifted = -shifted
    return shifted


def alexander_fox(diagram) -> LaurentPolynomial:
    """Alexander polynomial of a one-component diagram, normalized.

    Wirtinger relations are Fox-differentiated into an n x n matrix over
    Z[t, 1/t]; any (n-1) minor determinant computed by fraction-free
    elimination is the polynomial up to units.
    """
    data = _as_records(diagram)
    if data.component_count() != 1:
        raise MultiComponent("alexander_fox needs exactly one component; use conway_skein")
    n = data.size
    if n == 0:
        return LaurentPolynomial.one("t")

    arc_of = _arcs(data)
    t = LaurentPolynomial.var("t")
    one = LaurentPolynomial.one("t")
    rows: List[Dict[int, LaurentPolynomial]] = []
    for r in data.crossings:
        j = arc_of[r.u_in]
        j2 = arc_of[r.u_out]
        k = arc_of[r.o_in]
        row: Dict[int, LaurentPolynomial] = {}

        def add(col: int, val: LaurentPolynomial):
            row[col] = row.get(col, LaurentPolynomial.zero("t")) + val

        if r.sign > 0:
            add(j, t)
            add(k, one - t)
            add(j2, -one)
        else:
            add(j, one)
            add(k, t - one)
            add(j2, -t)
        rows.append({c: v for c, v in row.items() if not v.is_zero})

    arcs = sorted({a for row in rows for a in row} | set(arc_of.values()))
    index = {a: i for i, a in enumerate(arcs)}
    size = len(arcs)
    matrix = [[LaurentPolynomial.zero("t")] * size for _ in range(size)]
    for ri, row in enumerate(rows):
        for a, v in row.items():
            matrix[ri][index[a]] = v
    minor = [row[: size - 1] for row in matrix[: size - 1]]
    det = _bareiss_det(minor)
    if det.is_zero:
        raise DegenerateDiagram("vanishing Alexander minor on a knot diagram")
    delta = normalize_alexander(det)
    if abs(delta.substitute_value(Fraction(1))) != 1:
        raise DegenerateDiagram(f"Alexander normalization failed: delta(1) = {delta.substitute_value(Fraction(1))}")
    return delta


def _arcs(data: DiagramData) -> Dict[int, int]:
    """Map each edge to its over-arc (maximal run between under-passages)."""
    parent: Dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(a: int, b: int):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for e in data.edges():
        parent.setdefault(e, e)
    for r in data.crossings:
        union(r.o_in, r.o_out)  # passing over does not break the arc
    return {e: find(e) for e in data.edges()}


def _bareiss_det(matrix: List[List[LaurentPolynomial]]) -> LaurentPolynomial:
    from .poly import poly_divmod_exact

    n = len(matrix)
    if n == 0:
        return LaurentPolynomial.one("t")
    m = [row[:] for row in matrix]
    # clear negative exponents row by row (each shift is a unit)
    for i in range(n):
        lows = [p.coeffs[0][0] for p in m[i] if not p.is_zero]
        if lows and min(lows) < 0:
            shift = -min(lows)
            m[i] = [p.shift(shift) if not p.is_zero else p for p in m[i]]
    sign = 1
    prev = LaurentPolynomial.one("t")
    for k in range(n - 1):
        if m[k][k].is_zero:
            pivot_row = next((r for r in range(k + 1, n) if not m[r][k].is_zero), None)
            if pivot_row is None:
                return LaurentPolynomial.zero("t")
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = poly_divmod_exact(num, prev)
            m[i][k] = LaurentPolynomial.zero("t")
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


# ---------------------------------------------------------------------------
# Conway polynomial via the skein recursion

def conway_skein(diagram, cap: int = DEFAULT_CONWAY_CAP) -> LaurentPolynomial:
    """Conway polynomial: switch crossings toward a descending diagram,
    resolving each switch through the skein relation; memoized."""
    data = _as_records(diagram)
    if data.size > cap:
        raise ResourceLimit(f"{data.size} crossings exceeds the Conway cap {cap}")
    memo: Dict[Tuple, LaurentPolynomial] = {}
    return _conway(_reduce_r1(data), memo)


def _conway(data: DiagramData, memo: Dict) -> LaurentPolynomial:
    z = LaurentPolynomial.var("z")
    data = _reduce_r1(data)
    key = _canonical_key(data)
    if key in memo:
        return memo[key]
    target = _first_discrepancy(data)
    if target is None:
        k = data.component_count()
        value = LaurentPolynomial.one("z") if k == 1 else LaurentPolynomial.zero("z")
        memo[key] = value
        return value
    idx = target
    rec = data.crossings[idx]
    switched = _switch(data, idx)
    smoothed = _smooth(data, idx)
    if rec.sign > 0:
        value = _conway(switched, memo) + z * _conway(smoothed, memo)
    else:
        value = _conway(switched, memo) - z * _conway(smoothed, memo)
    memo[key] = value
    return value


def _first_discrepancy(data: DiagramData) -> Optional[int]:
    """Index of the first crossing whose first visit in the canonical walk
    is an under-passage; None when the diagram is descending."""
    visited_crossing: Dict[int, bool] = {}
    nxt: Dict[int, Tuple[int, str]] = data.successor_map()
    out_edge = {}
    for i, r in enumerate(data.crossings):
        out_edge[(i, "under")] = r.u_out
        out_edge[(i, "over")] = r.o_out
    seen_edges = set()
    for start in sorted(nxt):
        if start in seen_edges:
            continue
        e = start
        while e not in seen_edges:
            seen_edges.add(e)
            ci, role = nxt[e]
            if ci not in visited_crossing:
                visited_crossing[ci] = True
                if role == "under":
                    return ci
            e = out_edge[(ci, role)]
    return None


def _switch(data: DiagramData, idx: int) -> DiagramData:
    recs = list(data.crossings)
    r = recs[idx]
    recs[idx] = CrossRec(u_in=r.o_in, u_out=r.o_out, o_in=r.u_in, o_out=r.u_out, sign=-r.sign)
    return DiagramData(crossings=tuple(recs), free_loops=data.free_loops)


def _smooth(data: DiagramData, idx: int) -> DiagramData:
    """Oriented smoothing: reconnect u_in->o_out and o_in->u_out."""
    r = data.crossings[idx]
    recs = [rec for i, rec in enumerate(data.crossings) if i != idx]
    free = data.free_loops
    rename: Dict[int, int] = {}

    joins = []
    if r.u_in == r.o_out and r.o_in == r.u_out:
        free += 2
    elif r.u_in == r.o_out:
        free += 1
        joins.append((r.o_in, r.u_out))
    elif r.o_in == r.u_out:
        free += 1
        joins.append((r.u_in, r.o_out))
    else:
        joins.append((r.u_in, r.o_out))
        joins.append((r.o_in, r.u_out))

    for incoming, outgoing in joins:
        # the edge pair (incoming ... outgoing) merges into one edge
        if incoming == outgoing:
            free += 1
            continue
        rename[outgoing] = incoming

    def canon(e: int) -> int:
        while e in rename:
            e = rename[e]
        return e

    out = []
    for rec in recs:
        out.append(
            CrossRec(
                u_in=canon(rec.u_in),
                u_out=canon(rec.u_out),
                o_in=canon(rec.o_in),
                o_out=canon(rec.o_out),
                sign=rec.sign,
            )
        )
    merged = DiagramData(crossings=tuple(out), free_loops=free)
    # a join whose two edges appear nowhere else closes into a free loop
    present = set()
    for rec in out:
        present.update((rec.u_in, rec.u_out, rec.o_in, rec.o_out))
    extra = 0
    for incoming, outgoing in joins:
        if incoming != outgoing and canon(incoming) not in present:
            extra += 1
    if extra:
        merged = DiagramData(crossings=merged.crossings, free_loops=merged.free_loops + extra)
    return merged


def _reduce_r1(data: DiagramData) -> DiagramData:
    """Remove kinks (crossings with a loop edge); preserves the link type."""
    changed = True
    while changed:
        changed = False
        for i, r in enumerate(data.crossings):
            if r.u_out == r.o_in or r.o_out == r.u_in:
                data = _smooth_kink(data, i)
                changed = True
                break
    return data


def _smooth_kink(data: DiagramData, idx: int) -> DiagramData:
    r = data.crossings[idx]
    recs = [rec for i, rec in enumerate(data.crossings) if i != idx]
    free = data.free_loops
    if r.u_out == r.o_in and r.o_out == r.u_in:
        # standalone kinked unknot
        free += 1
        joins = []
    elif r.u_out == r.o_in:
        joins = [(r.u_in, r.o_out)]
    else:
        joins = [(r.o_in, r.u_out)]
    rename: Dict[int, int] = {}
    for incoming, outgoing in joins:
        if incoming == outgoing:
            free += 1
        else:
            rename[outgoing] = incoming

    def canon(e: int) -> int:
        while e in rename:
            e = rename[e]
        return e

    out = [
        CrossRec(
            u_in=canon(rec.u_in),
            u_out=canon(rec.u_out),
            o_in=canon(rec.o_in),
            o_out=canon(rec.o_out),
            sign=rec.sign,
        )
        for rec in recs
    ]
    present = set()
    for rec in out:
        present.update((rec.u_in, rec.u_out, rec.o_in, rec.o_out))
    for incoming, outgoing in joins:
        if incoming != outgoing and canon(incoming) not in present:
            free += 1
    return DiagramData(crossings=tuple(out), free_loops=free)


def _canonical_key(data: DiagramData) -> Tuple:
    nxt: Dict[int, int] = {}
    for r in data.crossings:
        nxt[r.u_in] = r.u_out
        nxt[r.o_in] = r.o_out
    relabel: Dict[int, int] = {}
    counter = 0
    for start in sorted(nxt):
        if start in relabel:
            continue
        e = start
        while e not in relabel:
            relabel[e] = counter
            counter += 1
            e = nxt[e]
    recs = tuple(
        sorted(
            (relabel[r.u_in], relabel[r.u_out], relabel[r.o_in], relabel[r.o_out], r.sign)
            for r in data.crossings
        )
    )
    return (recs, data.free_loops)


def alexander_from_conway(nabla: LaurentPolynomial) -> LaurentPolynomial:
    """Substitute z = t^(1/2) - t^(-1/2) and normalize."""
    z_image = LaurentPolynomial("t", ((-1, -1), (1, 1)), exp_den=2)
    total = LaurentPolynomial.zero("t")
    for e, c in nabla.coeffs:
        if nabla.exp_den != 1:
            raise ValueError("Conway polynomial should have integer exponents")
        power = LaurentPolynomial.one("t")
        for _ in range(e):
            power = power * z_image
        total = total + power.scale(c)
    if total.is_zero:
        return total
    return normalize_alexander(total)


# ---------------------------------------------------------------------------
# Jones polynomial via the Kauffman bracket

def jones_kauffman(diagram, cap: int = DEFAULT_JONES_CAP) -> LaurentPolynomial:
    """Jones polynomial V with V(unknot) = 1, variable t (half powers exact).

    Kauffman bracket state sum with the A-smoothing convention calibrated on
    the positive trefoil: V(right trefoil) = -t^4 + t^3 + t.
    """
    data = _as_records(diagram)
    n = data.size
    if n > cap:
        raise ResourceLimit(f"{n} crossings exceeds the Jones cap {cap}")
    writhe = sum(r.sign for r in data.crossings)
    edges = data.edges()
    edge_index = {e: i for i, e in enumerate(edges)}
    n_edges = len(edges)

    pairings = []
    for r in data.crossings:
        if r.sign > 0:
            a_pairs = ((r.u_in, r.o_in), (r.u_out, r.o_out))
            b_pairs = ((r.u_in, r.o_out), (r.o_in, r.u_out))
        else:
            a_pairs = ((r.u_in, r.o_out), (r.o_in, r.u_out))
            b_pairs = ((r.u_in, r.o_in), (r.u_out, r.o_out))
        pairings.append((a_pairs, b_pairs))

    d_poly = LaurentPolynomial("A", ((-2, -1), (2, -1)))  # -A^2 - A^-2
    bracket = LaurentPolynomial.zero("A")
    for state in range(1 << n):
        parent = list(range(n_edges))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        a_count = 0
        for i in range(n):
            use_a = not (state >> i) & 1
            pairs = pairings[i][0] if use_a else pairings[i][1]
            if use_a:
                a_count += 1
            for x, y in pairs:
                rx, ry = find(edge_index[x]), find(edge_index[y])
                if rx != ry:
                    parent[rx] = ry
        loops = len({find(i) for i in range(n_edges)}) + data.free_loops
        term = LaurentPolynomial.term("A", 1, 2 * a_count - n)
        power = LaurentPolynomial.one("A")
        for _ in range(loops - 1):
            power = power * d_poly
        bracket = bracket + term * power

    # V = (-A)^(-3w) * bracket, then t^(1/2) = A^(-2)
    factor_sign = -1 if (3 * writhe) % 2 else 1
    v_coeffs: Dict[int, int] = {}
    for e, c in bracket.coeffs:
        a_exp = e - 3 * writhe
        if a_exp % 2:
            raise DegenerateDiagram("odd exponent in the Kauffman bracket")
        t2_exp = -a_exp // 2  # exponent in units of t^(1/2)
        v_coeffs[t2_exp] = v_coeffs.get(t2_exp, 0) + factor_sign * c
    return LaurentPolynomial.from_dict("t", v_coeffs, exp_den=2)
