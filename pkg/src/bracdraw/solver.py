"""Bend-allocation branching on top of the straight-line search.

For each way of spending bends on edges (cheapest first) the graph is
subdivided accordingly, the subdivided graph is searched for a straight-line
RAC drawing, and the subdivision vertices are folded back into bends.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator

from .drawing import BendBudget, Drawing, validate
from .geometry import DEFAULT_TOL, Point
from .graph import Edge, Graph, edge_key
from .search import GRID, GRID_EXHAUSTED, NUMERIC, straight_line_rac_search

log = logging.getLogger(__name__)

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class BendAllocation:
    counts: tuple[tuple[Edge, int], ...]  # (edge, bends), edges in graph order

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def as_dict(self) -> dict[Edge, int]:
        return dict(self.counts)


def enumerate_allocations(g: Graph, budget: BendBudget) -> Iterator[BendAllocation]:
    """Every map edge -> 0..beta(e) with total <= min(b, 3m), ascending by total."""
    edges = list(g.edges)
    caps = [budget.cap(e) for e in edges]
    limit = min(budget.total, 3 * len(edges), sum(caps))

    def spread(i: int, left: int) -> Iterator[list[int]]:
        if i == len(edges):
            if left == 0:
                yield []
            return
        rest = sum(caps[i + 1:])
        for c in range(min(caps[i], left), -1, -1):
            if left - c > rest:
                break
            for tail in spread(i + 1, left - c):
                yield [c, *tail]

    for total in range(limit + 1):
        for counts in spread(0, total):
            yield BendAllocation(tuple(zip(edges, counts)))


@dataclass(frozen=True)
class Subdivision:
    graph: Graph
    n_original: int
    chains: dict[Edge, tuple[int, ...]]  # original edge -> subdivision vertices from u to v
    origin: tuple[Edge, ...]  # per subdivided-graph edge, the original edge it belongs to


def subdivide_for_allocation(g: Graph, alloc: BendAllocation) -> Subdivision:
    counts = alloc.as_dict()
    nxt = g.n
    new_edges: list[Edge] = []
    chains: dict[Edge, tuple[int, ...]] = {}
    owner: dict[Edge, Edge] = {}
    for e in g.edges:
        u, v = e
        c = counts.get(e, 0)
        chain = tuple(range(nxt, nxt + c))
        nxt += c
        chains[e] = chain
        path = [u, *chain, v]
        for a, b in zip(path, path[1:]):
            key = edge_key(a, b)
            new_edges.append(key)
            owner[key] = e
    h = Graph(nxt, new_edges)
    return Subdivision(h, g.n, chains, tuple(owner[e] for e in h.edges))


def forbidden_pairs(g: Graph, sub: Subdivision) -> set[tuple[int, int]]:
    """Index pairs of subdivided edges that may not meet at all once folded:
    pieces of one original edge, or of two original edges sharing a vertex."""
    out = set()
    h = sub.graph
    for i in range(h.m):
        for j in range(i + 1, h.m):
            if set(h.edges[i]) & set(h.edges[j]):
                continue
            e, f = sub.origin[i], sub.origin[j]
            if e == f or set(e) & set(f):
                out.add((i, j))
    return out


def _straight(a: Point, b: Point, c: Point, tol: float) -> bool:
    d1 = (b[0] - a[0], b[1] - a[1])
    d2 = (c[0] - b[0], c[1] - b[1])
    cr = d1[0] * d2[1] - d1[1] * d2[0]
    return abs(cr) <= tol * math.hypot(*d1) * math.hypot(*d2) and d1[0] * d2[0] + d1[1] * d2[1] > 0


def fold_back(g: Graph, sub: Subdivision, d_sub: Drawing, tol: float = DEFAULT_TOL) -> Drawing:
    """Turn subdivision vertices into bends.  A subdivision vertex whose two
    segments continue straight through it is dropped rather than kept as a
    180 degree bend."""
    pos = {v: d_sub.vertex_pos[v] for v in g.vertices}
    polys = {}
    for e in g.edges:
        u, v = e
        pts = [pos[u], *(d_sub.vertex_pos[s] for s in sub.chains[e]), pos[v]]
        kept = [pts[0]]
        for k in range(1, len(pts) - 1):
            if not _straight(kept[-1], pts[k], pts[k + 1], tol):
                kept.append(pts[k])
        polys[e] = kept[1:]
    return Drawing(pos, polys)


def three_bend_drawing(g: Graph) -> Drawing:
    """A RAC drawing with exactly three bends per edge, for any graph.

    Vertices sit on the diagonal; edge (u, v), u < v, leaves u upwards to a
    vertical track just right of u, runs horizontally on a track just above
    v, and drops into v.  Vertical and horizontal tracks meet at right
    angles; track offsets are ordered so that edges sharing a vertex never
    meet.
    """
    D = 1.0
    eta, gamma = 0.2, 0.1
    sigma: dict[Edge, float] = {}
    tau: dict[Edge, float] = {}
    out_edges: dict[int, list[Edge]] = {}
    in_edges: dict[int, list[Edge]] = {}
    for e in g.edges:
        out_edges.setdefault(e[0], []).append(e)
        in_edges.setdefault(e[1], []).append(e)
    for u, es in out_edges.items():
        es.sort(key=lambda e: e[1])  # nearer target -> larger offset
        k = len(es)
        for j, e in enumerate(es):
            sigma[e] = eta * (k - j) / (k + 1)
    for v, es in in_edges.items():
        es.sort(key=lambda e: e[0])  # farther source -> higher track
        k = len(es)
        for j, e in enumerate(es):
            tau[e] = 0.05 + 0.14 * (k - j) / (k + 1)
    pos = {v: Point(v * D, v * D) for v in g.vertices}
    polys = {}
    for e in g.edges:
        u, v = e
        xu, yu = pos[u]
        xv, yv = pos[v]
        s, t = sigma[e], tau[e]
        polys[e] = [Point(xu + s, yu + eta), Point(xu + s, yv + t), Point(xv - gamma, yv + t)]
    return Drawing(pos, polys)


@dataclass
class SolveOptions:
    mode: str = NUMERIC
    seed: int = 0
    restarts: int = 64
    iters: int = 2000
    tol: float = DEFAULT_TOL
    grid_width: int = 3
    max_allocations: int = 256
    density_filter: bool = True
    three_bend_fallback: bool = True


@dataclass
class SolveOutcome:
    verdict: str
    drawing: Drawing | None = None
    allocation: BendAllocation | None = None
    stats: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def _solve_connected(g: Graph, budget: BendBudget, opts: SolveOptions) -> SolveOutcome:
    stats = {"allocations": 0, "restarts": 0, "iterations": 0}
    certified = opts.mode == GRID
    truncated = False
    for idx, alloc in enumerate(enumerate_allocations(g, budget)):
        if idx >= opts.max_allocations:
            truncated = True
            break
        stats["allocations"] += 1
        sub = subdivide_for_allocation(g, alloc)

        def accept(d_sub: Drawing, sub=sub) -> bool:
            return validate(g, fold_back(g, sub, d_sub, opts.tol), budget, opts.tol).valid

        res = straight_line_rac_search(
            sub.graph,
            opts.mode,
            seed=opts.seed + idx,
            restarts=opts.restarts,
            iters=opts.iters,
            tol=opts.tol,
            grid_width=opts.grid_width,
            forbidden=forbidden_pairs(g, sub),
            accept=accept,
            density_filter=opts.density_filter,
        )
        stats["restarts"] += res.restarts
        stats["iterations"] += res.iterations
        if res.found:
            d = fold_back(g, sub, res.drawing, opts.tol)
            report = validate(g, d, budget, opts.tol)
            assert report.valid, report.violations
            return SolveOutcome(YES, d, alloc, stats)
        if res.status != GRID_EXHAUSTED:
            certified = False

    if opts.three_bend_fallback and g.m and all(budget.cap(e) == 3 for e in g.edges) and budget.total >= 3 * g.m:
        d = three_bend_drawing(g)
        if validate(g, d, budget, opts.tol).valid:
            alloc = BendAllocation(tuple((e, 3) for e in g.edges))
            return SolveOutcome(YES, d, alloc, stats, ["three-bend construction"])
    if certified and not truncated:
        return SolveOutcome(NO, None, None, stats, [f"no drawing on the {opts.grid_width}x{opts.grid_width} grid for any allocation"])
    return SolveOutcome(UNKNOWN, None, None, stats)


def _translate(d: Drawing, dx: float, dy: float, scale: float) -> Drawing:
    return d.map_points(lambda p: Point(p[0] * scale + dx, p[1] * scale + dy))


def solve(g: Graph, budget: BendBudget, options: SolveOptions | None = None) -> SolveOutcome:
    """Decide (semi-decide) whether ``g`` has a b-bend beta-restricted RAC drawing.

    Components are solved separately, each with whatever budget the earlier
    ones left, and placed side by side.
    """
    opts = options or SolveOptions()
    comps = g.components()
    if len(comps) <= 1:
        return _solve_connected(g, budget, opts)

    left = budget.total
    pos: dict[int, Point] = {}
    polys: dict[Edge, list[Point]] = {}
    stats = {"allocations": 0, "restarts": 0, "iterations": 0}
    counts: list[tuple[Edge, int]] = []
    x_off = 0.0
    for comp in comps:
        sub, old_of = g.induced(comp)
        sub_budget = BendBudget(left, {e: budget.cap(edge_key(old_of[e[0]], old_of[e[1]])) for e in sub.edges})
        out = _solve_connected(sub, sub_budget, opts)
        for k in stats:
            stats[k] += out.stats.get(k, 0)
        if out.verdict != YES:
            verdict = out.verdict
            if verdict == NO and left < budget.total:
                verdict = UNKNOWN  # earlier components may have overspent
            return SolveOutcome(verdict, None, None, stats, [f"component {comp[:5]}...: {out.verdict}"])
        d = out.drawing
        x0, y0, x1, y1 = d.bbox()
        size = max(x1 - x0, y1 - y0, 1e-12)
        scale = 1.0 / size
        placed = _translate(d, x_off - x0 * scale, -y0 * scale, scale)
        x_off += 2.0
        back = placed.relabeled(old_of)
        pos.update(back.vertex_pos)
        polys.update(back.edge_polylines)
        used = sum(len(b) for b in back.edge_polylines.values())
        left -= used
        if out.allocation is not None:
            counts.extend((edge_key(old_of[e[0]], old_of[e[1]]), c) for e, c in out.allocation.counts)
    d = Drawing(pos, polys)
    report = validate(g, d, budget, opts.tol)
    if not report.valid:
        return SolveOutcome(UNKNOWN, None, None, stats, [f"combined drawing invalid: {report.violations[:2]}"])
    return SolveOutcome(YES, d, BendAllocation(tuple(sorted(counts))), stats)
