"""Polyline drawings, bend budgets and the bend-restricted RAC validator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    DEFAULT_TOL,
    INTERIOR,
    OVERLAP,
    CrossingEvent,
    Point,
    Segment,
    dist,
    is_right_angle,
    segment_intersection,
)
from .graph import Edge, Graph, edge_key


class DrawingStructureError(ValueError):
    """The drawing does not assign geometry to exactly the graph's elements."""


@dataclass(frozen=True)
class BendBudget:
    total: int
    beta: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.total < 0:
            raise ValueError("bend budget must be non-negative")
        for e, c in self.beta.items():
            if c not in (0, 1, 2, 3):
                raise ValueError(f"beta{e} = {c} is outside 0..3")

    def cap(self, e: Edge) -> int:
        """Per-edge cap; edges without an entry are unrestricted (3)."""
        return self.beta.get(edge_key(*e), 3)

    @classmethod
    def uniform(cls, g: Graph, total: int, cap: int) -> "BendBudget":
        return cls(total, {e: cap for e in g.edges})

    def restricted(self, edges: Iterable[Edge], relabel: Callable[[Edge], Edge] | None = None) -> "BendBudget":
        """Budget for a subgraph; ``relabel`` maps subgraph edges to ours."""
        beta = {}
        for e in edges:
            src = relabel(e) if relabel else e
            beta[e] = self.cap(src)
        return BendBudget(self.total, beta)


@dataclass
class Drawing:
    """Vertex positions plus, per edge ``(u, v)`` with ``u < v``, the interior
    bend points listed from ``u`` towards ``v``."""

    vertex_pos: dict[int, Point]
    edge_polylines: dict[Edge, list[Point]] = field(default_factory=dict)

    def polyline(self, e: Edge) -> list[Point]:
        u, v = e
        return [self.vertex_pos[u], *self.edge_polylines[e], self.vertex_pos[v]]

    def segments(self, e: Edge) -> list[Segment]:
        pts = self.polyline(e)
        return [Segment(p, q) for p, q in zip(pts, pts[1:])]

    def all_points(self) -> Iterator[Point]:
        yield from self.vertex_pos.values()
        for bends in self.edge_polylines.values():
            yield from bends

    def copy(self) -> "Drawing":
        return Drawing(dict(self.vertex_pos), {e: list(b) for e, b in self.edge_polylines.items()})

    def map_points(self, f: Callable[[Point], Point]) -> "Drawing":
        return Drawing(
            {v: Point(*f(p)) for v, p in self.vertex_pos.items()},
            {e: [Point(*f(p)) for p in b] for e, b in self.edge_polylines.items()},
        )

    def relabeled(self, old_of: Sequence[int]) -> "Drawing":
        """Rename vertex ``i`` to ``old_of[i]``, re-orienting bends as needed."""
        pos = {old_of[v]: p for v, p in self.vertex_pos.items()}
        polys = {}
        for (u, v), bends in self.edge_polylines.items():
            a, b = old_of[u], old_of[v]
            polys[edge_key(a, b)] = list(bends) if a < b else list(reversed(bends))
        return Drawing(pos, polys)

    def bbox(self) -> tuple[float, float, float, float]:
        pts = list(self.all_points())
        if not pts:
            return (0.0, 0.0, 0.0, 0.0)
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))

    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)


def straight_line_drawing(g: Graph, pos: Mapping[int, Sequence[float]]) -> Drawing:
    return Drawing({v: Point(float(pos[v][0]), float(pos[v][1])) for v in g.vertices}, {e: [] for e in g.edges})


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    details: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation]
    total_bends: int
    crossing_count: int
    crossings: list[CrossingEvent] = field(default_factory=list, repr=False)

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "valid" if self.valid else "invalid"

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def bend_count(d: Drawing) -> tuple[int, dict[Edge, int]]:
    per_edge = {e: len(b) for e, b in d.edge_polylines.items()}
    return sum(per_edge.values()), per_edge


def _check_structure(g: Graph, d: Drawing) -> None:
    missing_v = [v for v in g.vertices if v not in d.vertex_pos]
    if missing_v:
        raise DrawingStructureError(f"no position for vertices {missing_v[:10]}")
    extra_v = [v for v in d.vertex_pos if not (0 <= v < g.n)]
    if extra_v:
        raise DrawingStructureError(f"positions for unknown vertices {extra_v[:10]}")
    edges = set(g.edges)
    missing_e = [e for e in g.edges if e not in d.edge_polylines]
    if missing_e:
        raise DrawingStructureError(f"no polyline for edges {missing_e[:10]}")
    extra_e = [e for e in d.edge_polylines if e not in edges]
    if extra_e:
        raise DrawingStructureError(f"polylines for edges not in the graph {extra_e[:10]}")
    for p in d.all_points():
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise DrawingStructureError(f"non-finite coordinate {tuple(p)}")


@dataclass
class _SegTable:
    segs: list[Segment]
    edge_idx: list[int]
    pos: list[int]  # index of the segment within its polyline
    count: list[int]  # number of segments of the polyline
    boxes: np.ndarray  # (S, 4) xmin, ymin, xmax, ymax


def _segment_table(edges: Sequence[Edge], d: Drawing) -> tuple[_SegTable, list[tuple[Edge, int]]]:
    segs, eidx, pos, count = [], [], [], []
    degenerate = []
    for i, e in enumerate(edges):
        pts = d.polyline(e)
        k = len(pts) - 1
        for j in range(k):
            if pts[j] == pts[j + 1]:
                degenerate.append((e, j))
                continue
            segs.append(Segment(pts[j], pts[j + 1]))
            eidx.append(i)
            pos.append(j)
            count.append(k)
    if segs:
        arr = np.array([[s.a.x, s.a.y, s.b.x, s.b.y] for s in segs], dtype=float)
        boxes = np.column_stack(
            [np.minimum(arr[:, 0], arr[:, 2]), np.minimum(arr[:, 1], arr[:, 3]),
             np.maximum(arr[:, 0], arr[:, 2]), np.maximum(arr[:, 1], arr[:, 3])]
        )
    else:
        boxes = np.zeros((0, 4))
    return _SegTable(segs, eidx, pos, count, boxes), degenerate


def _box_pairs(boxes: np.ndarray, eps: float) -> Iterator[tuple[int, int]]:
    """Index pairs whose eps-inflated bounding boxes overlap (sweep on x)."""
    if len(boxes) < 2:
        return
    order = np.argsort(boxes[:, 0], kind="stable")
    xs = boxes[order, 0]
    ymin = boxes[:, 1]
    ymax = boxes[:, 3]
    for idx in range(len(order)):
        i = order[idx]
        hi = np.searchsorted(xs, boxes[i, 2] + eps, side="right")
        if hi <= idx + 1:
            continue
        cand = order[idx + 1:hi]
        mask = (ymin[cand] <= ymax[i] + eps) & (ymax[cand] >= ymin[i] - eps)
        for j in cand[mask]:
            yield (i, int(j)) if i < j else (int(j), i)


def _drawing_scale(d: Drawing) -> float:
    s = d.diameter()
    return s if s > 0 else 1.0


def _scan(g: Graph, d: Drawing, tol: float):
    """Shared pass for validate and crossing_census."""
    _check_structure(g, d)
    edges = list(g.edges)
    scale = _drawing_scale(d)
    eps = tol * scale
    table, degenerate = _segment_table(edges, d)
    violations: list[Violation] = []
    crossings: list[CrossingEvent] = []
    overlaps: list[CrossingEvent] = []

    for e, j in degenerate:
        violations.append(Violation("degenerate-segment", (e, j), "consecutive polyline points coincide"))

    # vertex injectivity
    verts = list(g.vertices)
    vtree = None
    if verts:
        vtree = cKDTree(np.array([d.vertex_pos[v] for v in verts], dtype=float))
    if len(verts) > 1:
        for i, j in sorted(vtree.query_pairs(eps)):
            violations.append(Violation("vertex-coincidence", (verts[i], verts[j]), "distinct vertices share a position"))

    # vertices in the interior of non-incident edges
    if verts and table.segs:
        coords = np.array([d.vertex_pos[v] for v in verts], dtype=float)
        order = np.argsort(coords[:, 0], kind="stable")
        xs = coords[order, 0]
        hits = set()
        for s_i, seg in enumerate(table.segs):
            x0, y0, x1, y1 = table.boxes[s_i]
            lo = np.searchsorted(xs, x0 - eps, side="left")
            hi = np.searchsorted(xs, x1 + eps, side="right")
            if lo >= hi:
                continue
            cand = order[lo:hi]
            cy = coords[cand, 1]
            cand = cand[(cy >= y0 - eps) & (cy <= y1 + eps)]
            e = edges[table.edge_idx[s_i]]
            for c in cand:
                v = verts[c]
                if v in e:
                    continue
                p = d.vertex_pos[v]
                if _pt_seg_dist(p, seg) <= eps and (v, e) not in hits:
                    hits.add((v, e))
                    violations.append(Violation("vertex-on-edge", (v, e), "vertex lies on a non-incident edge"))

    # bends must not be straight (180 degrees) or fold back onto themselves
    for e in edges:
        pts = d.polyline(e)
        for j in range(1, len(pts) - 1):
            a, b, c = pts[j - 1], pts[j], pts[j + 1]
            d1 = (b.x - a.x, b.y - a.y)
            d2 = (c.x - b.x, c.y - b.y)
            n1, n2 = math.hypot(*d1), math.hypot(*d2)
            if n1 == 0 or n2 == 0:
                continue
            cr = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(cr) <= tol * n1 * n2:
                if d1[0] * d2[0] + d1[1] * d2[1] > 0:
                    violations.append(Violation("straight-bend", (e, j), "bend closes a 180 degree angle"))
                else:
                    violations.append(Violation("polyline-overlap", (e, j), "consecutive segments fold back"))

    for i, j in _box_pairs(table.boxes, eps):
        ei, ej = table.edge_idx[i], table.edge_idx[j]
        si, sj = table.segs[i], table.segs[j]
        if ei == ej:
            if abs(table.pos[i] - table.pos[j]) == 1:
                continue
            ev = segment_intersection(si, sj, tol, scale)
            if ev is not None:
                violations.append(Violation("self-intersection", (edges[ei], table.pos[i], table.pos[j]), f"at {tuple(ev.point)}"))
            continue
        ev = segment_intersection(si, sj, tol, scale)
        if ev is None:
            continue
        e, f = edges[ei], edges[ej]
        shared = set(e) & set(f)
        if ev.kind == INTERIOR:
            crossings.append(ev)
        elif ev.kind == OVERLAP:
            overlaps.append(ev)
        if shared:
            w = shared.pop()
            pw = d.vertex_pos[w]
            at_w = (
                ev.kind != OVERLAP
                and dist(ev.point, pw) <= eps
                and _ends_at(table, i, e, w)
                and _ends_at(table, j, f, w)
            )
            if not at_w:
                violations.append(Violation("adjacent-intersection", (e, f), f"{ev.kind} at {tuple(ev.point)}"))
            continue
        if ev.kind == INTERIOR:
            if not is_right_angle(ev, tol):
                violations.append(
                    Violation("non-right-crossing", (e, f), f"angle {math.degrees(ev.angle):.6f} deg at {tuple(ev.point)}")
                )
        elif ev.kind == OVERLAP:
            violations.append(Violation("overlap", (e, f), f"collinear overlap near {tuple(ev.point)}"))
        else:
            # contact at a segment end; contact at a vertex is already vertex-on-edge
            if vtree is None or vtree.query(ev.point)[0] > eps:
                violations.append(Violation("touching", (e, f), f"contact at a bend near {tuple(ev.point)}"))
    return table, violations, crossings, overlaps


def _ends_at(table: _SegTable, s: int, e: Edge, w: int) -> bool:
    if w == e[0]:
        return table.pos[s] == 0
    return table.pos[s] == table.count[s] - 1


def _pt_seg_dist(p: Sequence[float], s: Segment) -> float:
    ax, ay = s.a
    dx, dy = s.b.x - ax, s.b.y - ay
    ll = dx * dx + dy * dy
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def crossing_census(
    g: Graph, d: Drawing, tol: float = DEFAULT_TOL, include_overlaps: bool = False
) -> list[CrossingEvent]:
    """Interior-interior crossings between segments of distinct edges
    (plus collinear overlaps when ``include_overlaps``)."""
    _, _, crossings, overlaps = _scan(g, d, tol)
    return crossings + overlaps if include_overlaps else crossings


def validate(g: Graph, d: Drawing, budget: BendBudget, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check that ``d`` is a b-bend beta-restricted RAC drawing of ``g``.

    Raises DrawingStructureError when geometry is missing; every failed
    condition otherwise becomes a Violation in the report.
    """
    _, violations, crossings, _ = _scan(g, d, tol)
    total, per_edge = bend_count(d)
    if total > budget.total:
        violations.append(Violation("bend-budget", (), f"{total} bends exceed budget {budget.total}"))
    for e, c in sorted(per_edge.items()):
        if c > budget.cap(e):
            violations.append(Violation("edge-bend-cap", (e,), f"{c} bends exceed beta={budget.cap(e)}"))
    return ValidationReport(violations, total, len(crossings), crossings)
