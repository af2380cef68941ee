"""Vertex-cover kernel: group non-cover vertices by their neighbourhood in
the cover, reject on oversized types, trim oversized two-neighbour types,
and lift drawings by re-inserting trimmed members next to a crossing-free
twin.  Also the reduction from neighbourhood diversity to a vertex cover.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .drawing import BendBudget, Drawing, crossing_census, validate
from .geometry import DEFAULT_TOL, Point
from .graph import (
    Graph,
    NdPartition,
    Removal,
    VertexCover,
    degree_one_prune,
    edge_key,
)
from .kernel_fen import KernelError, LiftError

log = logging.getLogger(__name__)

LEMMA = "lemma"
THEOREM = "theorem"
KERNEL = "kernel"
REJECT = "reject"


@dataclass(frozen=True)
class TypePartition:
    cover: frozenset[int]
    types: dict[frozenset[int], tuple[int, ...]]  # signature -> members, ascending

    @property
    def k(self) -> int:
        return len(self.cover)


def build_types(g: Graph, c: VertexCover) -> TypePartition:
    """Group the vertices outside ``c`` by their (exact) neighbourhood in ``c``."""
    if not c.covers(g):
        raise KernelError("vertex set is not a cover of the graph")
    types: dict[frozenset[int], list[int]] = {}
    for v in g.vertices:
        if v in c.vertices:
            continue
        sig = g.neighbors(v)  # all neighbours of a non-cover vertex lie in the cover
        if len(sig) < 2:
            raise KernelError(f"vertex {v} has {len(sig)} cover neighbours; prune degree-one vertices first")
        types.setdefault(sig, []).append(v)
    return TypePartition(frozenset(c.vertices), {s: tuple(m) for s, m in types.items()})


def keep_bound(i: int, b: int, strictness: str = LEMMA) -> int:
    """Largest admissible member count of a type with ``i >= 3`` cover neighbours."""
    if strictness == LEMMA:
        return max(2, 7 - i) + b
    if strictness == THEOREM:
        return max(3, 7 - i) + b
    raise ValueError(f"unknown strictness {strictness!r}")


def reject_big_types(
    tp: TypePartition, budget: BendBudget, strictness: str = LEMMA
) -> dict[frozenset[int], bool]:
    """Per type with at least three cover neighbours: True when it forces rejection."""
    out = {}
    for sig, members in tp.types.items():
        i = len(sig)
        if i >= 3:
            out[sig] = len(members) > keep_bound(i, budget.total, strictness)
    return out


def trim_target(k: int, b: int) -> int:
    return 3 * k + 7 + b


def trim_two_neighbor_types(
    tp: TypePartition, budget: BendBudget
) -> tuple[TypePartition, dict[frozenset[int], tuple[int, ...]]]:
    """Cut every two-neighbour type down to ``3k + 7 + b`` members.

    Members are interchangeable, so the highest-indexed ones go.  Returns the
    trimmed partition and the removed members per signature.
    """
    target = trim_target(tp.k, budget.total)
    types = dict(tp.types)
    removed = {}
    for sig, members in tp.types.items():
        if len(sig) == 2 and len(members) > target:
            types[sig] = members[:target]
            removed[sig] = members[target:]
    return TypePartition(tp.cover, types), removed


@dataclass
class VcKernelResult:
    verdict: str
    kernel: Graph
    budget: BendBudget
    old_of: tuple[int, ...]
    removal_log: tuple[Removal, ...]
    trimmed: dict[tuple[int, int], tuple[int, ...]]  # cover pair (original ids) -> removed members
    original: Graph
    original_budget: BendBudget
    k: int
    strictness: str = LEMMA
    reason: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def size_bound(self) -> int:
        b = self.original_budget.total
        return self.k + 2**self.k * (b + 4) + self.k**2 * (3 * self.k + 7 + b)


def _reject(g: Graph, budget: BendBudget, log_: tuple, k: int, strictness: str, reason: str) -> VcKernelResult:
    # K6 with no bends is a fixed no-instance (15 edges > 4n - 10 = 14), so
    # the rejection is still an equivalent instance
    k6 = Graph(6, [(a, c) for a in range(6) for c in range(a + 1, 6)])
    return VcKernelResult(REJECT, k6, BendBudget(0, {e: 0 for e in k6.edges}), (), log_, {}, g, budget, k, strictness, reason)


def vc_kernelize(
    g: Graph, budget: BendBudget, c: VertexCover, strictness: str = LEMMA
) -> VcKernelResult:
    """Prune, type, reject oversized types, trim two-neighbour types."""
    if not c.covers(g):
        raise KernelError("vertex set is not a cover of the graph")
    pruned = degree_one_prune(g)
    gp, old_of_p = pruned.graph, pruned.old_of
    new_of_p = {old: i for i, old in enumerate(old_of_p)}
    cp = VertexCover(frozenset(new_of_p[v] for v in c.vertices if v in new_of_p))
    k = cp.size
    tp = build_types(gp, cp)

    for sig, bad in sorted(reject_big_types(tp, budget, strictness).items(), key=lambda kv: sorted(kv[0])):
        if bad:
            i = len(sig)
            reason = (
                f"type with {i} cover neighbours has {len(tp.types[sig])} members"
                f" > max({2 if strictness == LEMMA else 3},{7 - i})+{budget.total}"
                f" = {keep_bound(i, budget.total, strictness)} ({strictness} bound)"
            )
            log.info("reject: %s", reason)
            return _reject(g, budget, pruned.log, k, strictness, reason)

    tp2, removed = trim_two_neighbor_types(tp, budget)
    drop = {v for ms in removed.values() for v in ms}
    kernel, old_of_k = gp.induced(v for v in gp.vertices if v not in drop)
    old_of = tuple(old_of_p[v] for v in old_of_k)
    beta = {(u, v): budget.cap(edge_key(old_of[u], old_of[v])) for u, v in kernel.edges}
    trimmed = {}
    for sig, ms in removed.items():
        a, b = sorted(old_of_p[x] for x in sig)
        trimmed[(a, b)] = tuple(old_of_p[x] for x in ms)
    result = VcKernelResult(
        KERNEL, kernel, BendBudget(budget.total, beta), old_of, pruned.log, trimmed, g, budget, k, strictness
    )
    if kernel.n > result.size_bound:
        raise KernelError(f"kernel has {kernel.n} vertices > bound {result.size_bound}")
    return result


# ---------------------------------------------------------------------------
# lifting
# ---------------------------------------------------------------------------


def _segment_clear(p: np.ndarray, q: np.ndarray, segs: np.ndarray, ends: np.ndarray, pts: np.ndarray, at_p: int, eps: float) -> bool:
    """True when segment p-q meets the drawing only at ``p`` (the vertex ``at_p``)
    and only through segments that start or end at that vertex."""
    d = q - p
    length = float(np.hypot(*d))
    if len(pts):
        rel = pts - p
        along = rel @ d / length
        perp = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / length
        if np.any((perp <= eps) & (along > eps) & (along <= length + eps)):
            return False
    if not len(segs):
        return True
    c = segs[:, :2]
    f = segs[:, 2:] - c
    flen = np.hypot(f[:, 0], f[:, 1])
    w = c - p
    denom = d[0] * f[:, 1] - d[1] * f[:, 0]
    par = np.abs(denom) <= 1e-12 * length * flen
    incident = (ends[:, 0] == at_p) | (ends[:, 1] == at_p)
    # collinear neighbours
    off = np.abs(w[:, 0] * d[1] - w[:, 1] * d[0]) / length
    col = par & (off <= eps)
    for k in np.nonzero(col)[0]:
        t0 = float(w[k] @ d) / length
        t1 = float((segs[k, 2:] - p) @ d) / length
        if max(t0, t1) > eps:
            return False
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (w[:, 0] * f[:, 1] - w[:, 1] * f[:, 0]) / denom
        u = (w[:, 0] * d[1] - w[:, 1] * d[0]) / denom
    hit = ~par & (t * length >= -eps) & (t * length <= length + eps) & (u * flen >= -eps) & (u * flen <= flen + eps)
    bad = hit & ~(incident & (t * length <= eps))
    return not bool(bad.any())


def _pick_free_member(d: Drawing, members: list[int], crossed: set[tuple[int, int]], u: int, v: int) -> int | None:
    free = [w for w in members if edge_key(u, w) not in crossed and edge_key(w, v) not in crossed]
    if not free:
        return None
    straight = [w for w in free if not d.edge_polylines[edge_key(u, w)] and not d.edge_polylines[edge_key(w, v)]]
    return (straight or free)[0]


def _feature_arrays(d: Drawing):
    from .routing import _drawing_segments

    segs, ends = _drawing_segments(d)
    pts = [tuple(p) for p in d.vertex_pos.values()]
    pts += [tuple(p) for b in d.edge_polylines.values() for p in b]
    return segs, ends, np.array(pts, dtype=float).reshape(-1, 2)


def _clearance_of_vertex(d: Drawing, w: int, segs, ends, pts) -> float:
    from .routing import _seg_point_dist

    pw = np.array(d.vertex_pos[w], dtype=float)
    mask = (ends[:, 0] != w) & (ends[:, 1] != w)
    dmin = float(_seg_point_dist(segs[mask], pw).min()) if mask.any() else math.inf
    pd = np.hypot(*(pts - pw).T)
    pd = pd[pd > 0]
    if len(pd):
        dmin = min(dmin, float(pd.min()))
    return dmin if math.isfinite(dmin) else 1.0


def _strictly_inside(pts: np.ndarray, a, b, c, eps: float) -> np.ndarray:
    def side(p, q):
        return (q[0] - p[0]) * (pts[:, 1] - p[1]) - (q[1] - p[1]) * (pts[:, 0] - p[0])

    s1, s2, s3 = side(a, b), side(b, c), side(c, a)
    return ((s1 > eps) & (s2 > eps) & (s3 > eps)) | ((s1 < -eps) & (s2 < -eps) & (s3 < -eps))


def _place_copies(d: Drawing, u: int, v: int, w: int, news: tuple[int, ...]) -> bool:
    """Draw the vertices ``news`` (each adjacent to exactly u and v) next to ``w``.

    With straight edges at ``w`` the copies go on the ray from the midpoint
    of uv through w, beyond w: the triangles u-v-copy are then nested, so the
    new edges cross neither each other nor, once the outermost pair is clear,
    anything else.
    """
    segs, ends, pts = _feature_arrays(d)
    pw = np.array(d.vertex_pos[w], dtype=float)
    pu = np.array(d.vertex_pos[u], dtype=float)
    pv = np.array(d.vertex_pos[v], dtype=float)
    dmin = _clearance_of_vertex(d, w, segs, ends, pts)
    eps = 1e-9 * max(d.diameter(), 1e-300)
    out = pw - 0.5 * (pu + pv)
    if np.hypot(*out) <= eps:
        out = np.array([-(pv - pu)[1], (pv - pu)[0]])
    o = out / np.hypot(*out)
    straight = not d.edge_polylines[edge_key(u, w)] and not d.edge_polylines[edge_key(w, v)]
    others = np.array([not (np.allclose(p, pu) or np.allclose(p, pv) or np.allclose(p, pw)) for p in pts], dtype=bool)

    def commit(q, new):
        d.vertex_pos[new] = Point(float(q[0]), float(q[1]))
        d.edge_polylines[edge_key(u, new)] = []
        d.edge_polylines[edge_key(v, new)] = []

    if straight:
        radius = 0.5 * dmin
        for _ in range(40):
            far = pw + radius * o
            sliver = _strictly_inside(pts[others], pu, pv, far, eps * eps) & ~_strictly_inside(
                pts[others], pu, pv, pw, -eps * eps
            )
            if (
                not sliver.any()
                and _segment_clear(pu, far, segs, ends, pts, u, eps)
                and _segment_clear(pv, far, segs, ends, pts, v, eps)
            ):
                count = len(news)
                for j, new in enumerate(news, start=1):
                    commit(pw + radius * (j / count) * o, new)
                return True
            radius *= 0.5
        return False

    # bent edges at w: place copies one at a time around w
    dirs = [o, -o, np.array([-o[1], o[0]]), np.array([o[1], -o[0]])]
    dirs += [np.array([math.cos(a), math.sin(a)]) for a in np.linspace(0, 2 * math.pi, 16, endpoint=False)]
    for new in news:
        radius = 0.25 * dmin
        placed = False
        while not placed and radius > 1e4 * eps:
            for dr in dirs:
                q = pw + radius * dr
                if _segment_clear(pu, q, segs, ends, pts, u, eps) and _segment_clear(pv, q, segs, ends, pts, v, eps):
                    commit(q, new)
                    placed = True
                    break
            radius *= 0.5
        if not placed:
            return False
        segs, ends, pts = _feature_arrays(d)
        dmin = _clearance_of_vertex(d, w, segs, ends, pts)
    return True


def vc_lift_drawing(result: VcKernelResult, d_kernel: Drawing, tol: float = DEFAULT_TOL) -> Drawing:
    """Extend a valid kernel drawing to the original graph.

    Every trimmed member is drawn with straight edges right next to a member
    of its type whose two edges are crossing-free.
    """
    from .routing import regrow_pruned

    if result.verdict != KERNEL:
        raise LiftError("cannot lift a rejected instance")
    report = validate(result.kernel, d_kernel, result.budget, tol)
    if not report.valid:
        raise LiftError(f"kernel drawing is not valid: {report.violations[:3]}")
    d = d_kernel.relabeled(result.old_of)

    kernel_ids = set(result.old_of)
    for (u, v), removed in sorted(result.trimmed.items()):
        members = sorted(
            w for w in kernel_ids
            if w not in (u, v) and result.original.neighbors(w) == frozenset((u, v))
        )
        crossed = _crossed_edges(_graph_of(d), tol)
        w = _pick_free_member(d, members, crossed, u, v)
        if w is None:
            raise LiftError(
                f"no member of the type on cover pair ({u}, {v}) is drawn crossing-free;"
                f" all {len(members)} kept members have a crossing edge"
            )
        if not _place_copies(d, u, v, w, removed):
            raise LiftError(f"no free spot next to vertex {w} for the trimmed members of ({u}, {v})")

    regrow_pruned(d, result.removal_log, tol)
    final = validate(result.original, d, result.original_budget, tol)
    if not final.valid:
        raise LiftError(f"lifted drawing failed validation: {final.violations[:5]}")
    return d


def _graph_of(d: Drawing) -> tuple[Graph, Drawing, list[int]]:
    """Densely relabelled graph and drawing of what ``d`` draws, plus the id map."""
    ids = sorted(d.vertex_pos)
    new_of = {v: i for i, v in enumerate(ids)}
    g = Graph(len(ids), [(new_of[a], new_of[b]) for a, b in d.edge_polylines])
    return g, _dense(d, new_of), ids


def _dense(d: Drawing, new_of: dict[int, int]) -> Drawing:
    pos = {new_of[v]: p for v, p in d.vertex_pos.items()}
    polys = {}
    for (a, b), bends in d.edge_polylines.items():
        x, y = new_of[a], new_of[b]
        polys[edge_key(x, y)] = list(bends) if x < y else list(reversed(bends))
    return Drawing(pos, polys)


def _crossed_edges(packed: tuple[Graph, Drawing, list[int]], tol: float) -> set[tuple[int, int]]:
    g, dd, ids = packed
    out = set()
    seg_owner = {}
    for e in g.edges:
        for s in dd.segments(e):
            seg_owner[s] = e
    for ev in crossing_census(g, dd, tol, include_overlaps=True):
        for s in (ev.seg1, ev.seg2):
            e = seg_owner.get(s)
            if e is not None:
                out.add(edge_key(ids[e[0]], ids[e[1]]))
    return out


# ---------------------------------------------------------------------------
# neighbourhood diversity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NdCoverResult:
    cover: VertexCover | None
    excess: int
    reason: str = ""

    @property
    def rejected(self) -> bool:
        return self.cover is None


def nd_to_vertex_cover(g: Graph, ndp: NdPartition, budget: BendBudget) -> NdCoverResult:
    """Vertex cover of size at most ``5 nd + b`` built from a twin partition, or a rejection.

    Clique parts go in whole; a part of more than 5 vertices holds a K6 and
    needs bends.  Of two adjacent independent parts the smaller goes in; more
    than 3 on both sides holds a K(4,4).  All excess sizes draw on one pool of
    ``b`` bends.
    """
    cover: set[int] = set()
    excess = 0
    charged: set[int] = set()
    notes = []
    for i, (part, kind) in enumerate(zip(ndp.parts, ndp.kinds)):
        if kind == "clique":
            cover.update(part)
            if len(part) > 5:
                excess += len(part) - 5
                notes.append(f"clique part of size {len(part)}")
    independent = [i for i, kind in enumerate(ndp.kinds) if kind == "independent"]
    for x in range(len(independent)):
        for y in range(x + 1, len(independent)):
            i, j = independent[x], independent[y]
            pi, pj = ndp.parts[i], ndp.parts[j]
            if not g.has_edge(pi[0], pj[0]):
                continue
            small = i if (len(pi), i) <= (len(pj), j) else j
            part = ndp.parts[small]
            cover.update(part)
            if small not in charged and len(part) > 3:
                charged.add(small)
                excess += len(part) - 3
                notes.append(f"independent part of size {len(part)} joined to one of size {max(len(pi), len(pj))}")
    if excess > budget.total:
        return NdCoverResult(None, excess, f"excess {excess} > b = {budget.total}: " + "; ".join(notes))
    vc = VertexCover(frozenset(cover))
    assert vc.covers(g)
    return NdCoverResult(vc, excess)
