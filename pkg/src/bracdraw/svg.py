"""Deterministic SVG rendering of a drawing."""

from __future__ import annotations

import math

from .drawing import BendBudget, Drawing, ValidationReport, validate
from .geometry import DEFAULT_TOL, is_right_angle
from .graph import Graph

_SIZE = 600.0
_MARGIN = 30.0


def _flagged(report: ValidationReport | None) -> tuple[set, set]:
    edges, verts = set(), set()
    if report is None:
        return edges, verts
    for v in report.violations:
        if v.kind == "vertex-coincidence":
            verts.update(v.location)
        elif v.kind == "vertex-on-edge":
            verts.add(v.location[0])
            edges.add(v.location[1])
        else:
            edges.update(x for x in v.location if isinstance(x, tuple) and len(x) == 2)
    return edges, verts


def _num(x: float) -> str:
    return f"{x:.3f}"


def render_svg(
    g: Graph,
    d: Drawing,
    budget: BendBudget | None = None,
    tol: float = DEFAULT_TOL,
    size: float = _SIZE,
) -> str:
    """SVG text for ``d``.  Right-angle crossings get a small square marker;
    edges and vertices involved in violations are drawn in red."""
    report = validate(g, d, budget or BendBudget(10**9), tol)
    bad_edges, bad_verts = _flagged(report)

    x0, y0, x1, y1 = d.bbox() if d.vertex_pos else (0.0, 0.0, 1.0, 1.0)
    span = max(x1 - x0, y1 - y0, 1e-12)
    k = (size - 2 * _MARGIN) / span

    def tx(p) -> tuple[float, float]:
        return _MARGIN + (p[0] - x0) * k, size - _MARGIN - (p[1] - y0) * k

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(size)}" height="{_num(size)}" '
        f'viewBox="0 0 {_num(size)} {_num(size)}">',
        f'<rect width="{_num(size)}" height="{_num(size)}" fill="white"/>',
    ]
    for e in g.edges:
        pts = [d.vertex_pos[e[0]], *d.polyline(e)[1:-1], d.vertex_pos[e[1]]]
        colour = "#d62728" if e in bad_edges else "#333333"
        coords = " ".join(f"{_num(a)},{_num(b)}" for a, b in map(tx, pts))
        out.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        for p in pts[1:-1]:
            a, b = tx(p)
            out.append(f'<rect x="{_num(a - 2)}" y="{_num(b - 2)}" width="4" height="4" fill="{colour}"/>')

    marker = 7.0
    for ev in report.crossings:
        if not is_right_angle(ev, tol):
            continue
        cx, cy = tx(ev.point)
        d1, d2 = ev.seg1.direction, ev.seg2.direction
        u = (d1[0] / math.hypot(*d1), -d1[1] / math.hypot(*d1))
        w = (d2[0] / math.hypot(*d2), -d2[1] / math.hypot(*d2))
        corners = [
            (cx + u[0] * marker, cy + u[1] * marker),
            (cx + (u[0] + w[0]) * marker, cy + (u[1] + w[1]) * marker),
            (cx + w[0] * marker, cy + w[1] * marker),
        ]
        path = " L ".join(f"{_num(a)} {_num(b)}" for a, b in corners)
        out.append(f'<path d="M {path}" fill="none" stroke="#1f77b4" stroke-width="1"/>')

    for v in sorted(d.vertex_pos):
        a, b = tx(d.vertex_pos[v])
        colour = "#d62728" if v in bad_verts else "#1f1f1f"
        out.append(f'<circle cx="{_num(a)}" cy="{_num(b)}" r="5" fill="{colour}"/>')
        out.append(
            f'<text x="{_num(a + 7)}" y="{_num(b - 7)}" font-family="monospace" font-size="11">{v}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
