"""SVG output for divides and link diagrams.

Under-strands are broken geometrically (the polyline is split around the
crossing), so a test can parse the document and count one gap per crossing.
Output is plain deterministic text: same input, same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from .diagram import LinkDiagram
from .model import Divide

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass(frozen=True)
class RenderConfig:
    size: int = 560
    stroke: float = 2.0
    under_gap: float = 9.0     # px; must stay visibly larger than the stroke
    show_labels: bool = False
    show_mirror_line: bool = True
    show_orientation: bool = False

    def __post_init__(self):
        if self.under_gap <= self.stroke:
            raise ValueError("under_gap must exceed the stroke width")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Canvas:
    def __init__(self, config: RenderConfig, x0, x1, y0, y1):
        self.config = config
        pad = 0.06 * (x1 - x0 + y1 - y0) + 1e-9
        self.x0, self.x1 = x0 - pad, x1 + pad
        self.y0, self.y1 = y0 - pad, y1 + pad
        self.scale = config.size / max(self.x1 - self.x0, self.y1 - self.y0)
        self.width = (self.x1 - self.x0) * self.scale
        self.height = (self.y1 - self.y0) * self.scale

    def to_px(self, p) -> Tuple[float, float]:
        return (
            (float(p.x) - self.x0) * self.scale,
            (self.y1 - float(p.y)) * self.scale,
        )

    def path(self, points, cls: str, color: str, extra: str = "") -> str:
        coords = " ".join(
            ("M" if i == 0 else "L") + f"{_fmt(x)},{_fmt(y)}"
            for i, (x, y) in enumerate(points)
        )
        return (
            f'<path class="{cls}" d="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{self.config.stroke}" stroke-linejoin="round" '
            f'stroke-linecap="round"{extra}/>'
        )


def _document(canvas: _Canvas, body: List[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(canvas.width)}" '
        f'height="{_fmt(canvas.height)}" viewBox="0 0 {_fmt(canvas.width)} {_fmt(canvas.height)}">'
    )
    return head + "\n" + "\n".join(body) + "\n</svg>\n"


def render_divide_svg(divide: Divide, config: RenderConfig = RenderConfig()) -> str:
    """Disk, branches, and distinct glyphs for double points and tangencies."""
    canvas = _Canvas(config, -1.05, 1.05, -1.05, 1.05)
    body: List[str] = []
    cx, cy = canvas.to_px(_XY(0, 0))
    body.append(
        f'<circle class="disk" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(canvas.scale)}" '
        f'fill="none" stroke="#bbbbbb" stroke-width="1"/>'
    )
    for b_idx, branch in enumerate(divide.branches):
        pts = [canvas.to_px(v) for v in branch.vertices]
        if branch.is_closed:
            pts.append(pts[0])
        color = PALETTE[b_idx % len(PALETTE)]
        body.append(canvas.path(pts, "branch", color))
    r_marker = max(3.0, config.stroke * 1.8)
    for dp in divide.double_points:
        x, y = canvas.to_px(dp.position)
        body.append(
            f'<circle class="marker-double" cx="{_fmt(x)}" cy="{_fmt(y)}" '
            f'r="{_fmt(r_marker)}" fill="#000000"/>'
        )
    for t in divide.tangencies:
        x, y = canvas.to_px(divide.tangency_point(t))
        s = r_marker
        body.append(
            f'<path class="marker-tangency" d="M{_fmt(x - s)},{_fmt(y)} L{_fmt(x)},{_fmt(y - s)} '
            f'L{_fmt(x + s)},{_fmt(y)} L{_fmt(x)},{_fmt(y + s)} Z" '
            f'fill="none" stroke="#d62728" stroke-width="1.5"/>'
        )
    if config.show_labels:
        for b_idx, branch in enumerate(divide.branches):
            x, y = canvas.to_px(branch.vertices[0])
            body.append(
                f'<text class="label" x="{_fmt(x + 4)}" y="{_fmt(y - 4)}" '
                f'font-size="11">b{b_idx}</text>'
            )
    return _document(canvas, body)


class _XY:
    def __init__(self, x, y):
        self.x = x
        self.y = y


def render_diagram_svg(diagram: LinkDiagram, config: RenderConfig = RenderConfig()) -> str:
    """Each component as a closed strand; under-passages open a gap."""
    xs: List[float] = []
    ys: List[float] = []
    for comp in diagram.components:
        for p in comp.geometry:
            xs.append(float(p.x))
            ys.append(float(p.y))
    if not xs:
        xs, ys = [-1.0, 1.0], [-1.0, 1.0]
    canvas = _Canvas(config, min(xs), max(xs), min(ys), max(ys))
    body: List[str] = []
    if config.show_mirror_line:
        y_px = canvas.to_px(_XY(0, diagram.mirror_line_y))[1]
        body.append(
            f'<line class="mirror" x1="0" y1="{_fmt(y_px)}" x2="{_fmt(canvas.width)}" '
            f'y2="{_fmt(y_px)}" stroke="#999999" stroke-width="1" stroke-dasharray="6,5"/>'
        )
    gap_len = config.under_gap / canvas.scale
    for c_idx, comp in enumerate(diagram.components):
        color = PALETTE[c_idx % len(PALETTE)]
        chain = [tuple(map(float, (p.x, p.y))) for p in comp.geometry]
        if not chain:
            continue
        cuts = sorted(
            (comp.passage_points[i], diagram.crossings[comp.passages[i].crossing].cid)
            for i in range(len(comp.passages))
            if not comp.passages[i].is_over
        )
        for sub, end_cid in _split_chain(chain, cuts, gap_len / 2):
            pts = [canvas.to_px(_XY(x, y)) for (x, y) in sub]
            if len(pts) < 2:
                continue
            extra = f' data-gap-at="c{end_cid}"' if end_cid is not None else ""
            body.append(canvas.path(pts, "strand", color, extra))
        if config.show_orientation and len(chain) >= 2:
            ax, ay = canvas.to_px(_XY(*chain[0]))
            bx, by = canvas.to_px(_XY(*chain[1]))
            nx, ny = bx - ax, by - ay
            norm = math.hypot(nx, ny) or 1.0
            nx, ny = nx / norm, ny / norm
            tipx, tipy = ax + nx * 10, ay + ny * 10
            body.append(
                f'<path class="arrow" d="M{_fmt(ax - ny * 3)},{_fmt(ay + nx * 3)} '
                f'L{_fmt(tipx)},{_fmt(tipy)} L{_fmt(ax + ny * 3)},{_fmt(ay - nx * 3)}" '
                f'fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
    if config.show_labels:
        for c in diagram.crossings:
            x, y = canvas.to_px(c.position)
            body.append(
                f'<text class="label" x="{_fmt(x + 4)}" y="{_fmt(y - 4)}" '
                f'font-size="10">c{c.cid}{"+" if c.sign > 0 else "-"}</text>'
            )
    return _document(canvas, body)


def _split_chain(chain, cuts, half_gap: float):
    """Split a closed polyline around each cut vertex, removing half_gap of
    arc length on both sides of it.

    ``cuts`` is a sorted list of (vertex index, crossing id).  Returns
    (piece, crossing id the piece ends at) pairs; a single uncut loop is
    returned with end id None.
    """
    n = len(chain)
    if not cuts:
        return [(chain + chain[:1], None)]
    cum = [0.0]
    for i in range(n):
        cum.append(cum[-1] + math.dist(chain[i], chain[(i + 1) % n]))
    total = cum[-1] or 1.0

    def point_at(s: float):
        s = s % total
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid + 1] < s:
                lo = mid + 1
            else:
                hi = mid
        i = lo
        seg = cum[i + 1] - cum[i]
        f = 0.0 if seg == 0 else (s - cum[i]) / seg
        a, b = chain[i], chain[(i + 1) % n]
        return (a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f)

    pieces = []
    for j, (cut_idx, _) in enumerate(cuts):
        next_idx, next_cid = cuts[(j + 1) % len(cuts)]
        end_s = cum[next_idx]
        if end_s <= cum[cut_idx]:
            end_s += total
        # shrink the gap when two crossings sit closer than the configured gap
        hg = min(half_gap, 0.3 * (end_s - cum[cut_idx]))
        s_start = cum[cut_idx] + hg
        s_end = end_s - hg
        inner = []
        for off in (0.0, total):
            for i in range(n):
                sv = cum[i] + off
                if s_start < sv < s_end:
                    inner.append((sv, chain[i]))
        inner.sort(key=lambda e: e[0])
        piece = [point_at(s_start)] + [p for _, p in inner] + [point_at(s_end)]
        pieces.append((piece, next_cid))
    return pieces
