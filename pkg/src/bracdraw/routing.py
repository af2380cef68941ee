"""Geometric surgery used when lifting kernel drawings back to full graphs.

``PathRouter`` draws a long path between two already placed endpoints,
spending its own interior vertices to turn every crossing into a right
angle.  ``regrow_pruned`` re-attaches pruned pendant trees in small free
wedges around their anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drawing import BendBudget, Drawing, validate
from .geometry import DEFAULT_TOL, Point
from .graph import Edge, Graph, Removal, edge_key


class RoutingError(RuntimeError):
    pass


class _Degenerate(Exception):
    """The chosen base route touches the drawing in a way we do not handle."""


class _Insufficient(Exception):
    def __init__(self, needed: int, available: int):
        super().__init__(f"route needs {needed} interior vertices, path has {available}")
        self.needed = needed
        self.available = available


# detour offsets, as fractions of the endpoint distance
_DETOURS = (1e-3, -1e-3, 4e-3, -4e-3, 1.6e-2, -1.6e-2, 6.4e-2, -6.4e-2, 0.2, -0.2)
# rays closer than this (radians) to the route direction count as collinear
_MIN_RAY_ANGLE = 1e-6
# below this |cos| the reflection construction gets too thin; use the cone one
_MIN_REFLECT_COS = 0.05


def _seg_point_dist(segs: np.ndarray, p: np.ndarray) -> np.ndarray:
    a = segs[:, :2]
    d = segs[:, 2:] - a
    ll = np.einsum("ij,ij->i", d, d)
    w = p - a
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(ll > 0, np.einsum("ij,ij->i", w, d) / ll, 0.0)
    t = np.clip(t, 0.0, 1.0)
    diff = w - t[:, None] * d
    return np.hypot(diff[:, 0], diff[:, 1])


def _drawing_segments(d: Drawing) -> tuple[np.ndarray, np.ndarray]:
    """All segments as (S, 4) plus, per segment, the vertex at each end (-1 for a bend)."""
    rows, ends = [], []
    for (u, v), bends in d.edge_polylines.items():
        pts = [d.vertex_pos[u], *bends, d.vertex_pos[v]]
        k = len(pts) - 1
        for j in range(k):
            rows.append((pts[j][0], pts[j][1], pts[j + 1][0], pts[j + 1][1]))
            ends.append((u if j == 0 else -1, v if j == k - 1 else -1))
    return np.array(rows, dtype=float).reshape(-1, 4), np.array(ends, dtype=int).reshape(-1, 2)


def _scale(d: Drawing) -> float:
    s = d.diameter()
    return s if s > 0 else 1.0


@dataclass
class _Event:
    t: float  # arc length along the base segment
    x: np.ndarray
    rays: list[np.ndarray]
    segs: list[int]
    anchored: bool  # a vertex or bend point sits at x


class PathRouter:
    """Routes long paths into a drawing, one after another."""

    def __init__(self, d: Drawing, tol: float = DEFAULT_TOL):
        self.drawing = d.copy()
        self.tol = tol
        self.log: list[str] = []

    def route_all(self, paths: list[list[int]]) -> None:
        for i, path in enumerate(paths):
            pending = [(p[0], p[-1]) for p in paths[i + 1:]]
            self.route(path, pending)

    def route(self, path: list[int], pending: list[tuple[int, int]] = ()) -> None:
        if len(path) < 2:
            raise RoutingError("path needs two endpoints")
        s, t = path[0], path[-1]
        ps = np.array(self.drawing.vertex_pos[s], dtype=float)
        pt = np.array(self.drawing.vertex_pos[t], dtype=float)
        span = float(np.hypot(*(pt - ps)))
        if span == 0:
            raise RoutingError(f"path endpoints {s} and {t} coincide")
        normal = np.array([-(pt - ps)[1], (pt - ps)[0]]) / span
        options: list[np.ndarray | None] = [None]
        options += [0.5 * (ps + pt) + off * span * normal for off in _DETOURS]
        failures = []
        best_short: _Insufficient | None = None
        for w in options:
            base = [ps, pt] if w is None else [ps, w, pt]
            try:
                positions = self._lift(base, len(path) - 2, pending)
            except _Degenerate as exc:
                failures.append(f"degenerate: {exc}")
                continue
            except _Insufficient as exc:
                failures.append(str(exc))
                if best_short is None or exc.needed < best_short.needed:
                    best_short = exc
                continue
            trial = self.drawing.copy()
            for v, p in zip(path[1:-1], positions):
                trial.vertex_pos[v] = Point(float(p[0]), float(p[1]))
            for a, b in zip(path, path[1:]):
                trial.edge_polylines[edge_key(a, b)] = []
            report = _validate_partial(trial, self.tol)
            if report.valid:
                self.drawing = trial
                self.log.append(f"path {s}..{t}: {'straight' if w is None else 'detour'}, {len(path) - 2} interior vertices")
                return
            failures.append(f"invalid: {report.violations[:2]}")
        if best_short is not None and len(failures) == len(options) and all("needs" in f for f in failures):
            raise RoutingError(
                f"path {s}..{t} has {best_short.available} interior vertices but its crossings need {best_short.needed}"
            )
        raise RoutingError(f"could not route path {s}..{t}: {failures[:4]}")

    # -- geometry -----------------------------------------------------------

    def _features(self, base: list[np.ndarray], pending: list[tuple[int, int]]):
        d = self.drawing
        segs, _ = _drawing_segments(d)
        extra = [
            (*d.vertex_pos[a], *d.vertex_pos[b]) for a, b in pending
        ]
        if extra:
            segs = np.vstack([segs, np.array(extra, dtype=float)])
        pts = [tuple(p) for p in d.vertex_pos.values()]
        for bends in d.edge_polylines.values():
            pts.extend(tuple(p) for p in bends)
        pts.extend(tuple(p) for p in base)
        return segs, np.array(pts, dtype=float).reshape(-1, 2)

    def _lift(self, base: list[np.ndarray], available: int, pending) -> list[np.ndarray]:
        segs, pts = self._features(base, pending)
        scale = max(_scale(self.drawing), float(np.hypot(*(base[-1] - base[0]))))
        ceps = 1e-7 * scale
        # waypoints from s to t; free[i] marks waypoints[i] -> waypoints[i+1] as crossing-free
        waypoints: list[np.ndarray] = [base[0]]
        free: list[bool] = []
        for k, (a, b) in enumerate(zip(base, base[1:])):
            for ev in self._events(a, b, segs, pts, ceps, first=(k == 0), last=(k == len(base) - 2)):
                corners = self._detour(ev, a, b, segs, pts, ceps)
                if not corners:
                    continue
                waypoints.append(corners[0])
                free.append(True)
                for c in corners[1:]:
                    waypoints.append(c)
                    free.append(False)
            waypoints.append(b)
            free.append(True)

        needed = len(waypoints) - 2
        if needed > available:
            raise _Insufficient(needed, available)
        extra = available - needed
        if extra:
            lengths = [
                float(np.hypot(*(waypoints[i + 1] - waypoints[i]))) if free[i] else -1.0
                for i in range(len(free))
            ]
            i = int(np.argmax(lengths))
            a, b = waypoints[i], waypoints[i + 1]
            fill = [a + (b - a) * (j / (extra + 1)) for j in range(1, extra + 1)]
            waypoints = waypoints[: i + 1] + fill + waypoints[i + 1:]
        return waypoints[1:-1]

    def _events(self, a, b, segs, pts, ceps, first: bool, last: bool) -> list[_Event]:
        d = b - a
        length = float(np.hypot(*d))
        dh = d / length
        hits: list[tuple[float, int]] = []
        anchors: list[tuple[float, np.ndarray]] = []

        if len(segs):
            c = segs[:, :2]
            f = segs[:, 2:] - c
            flen = np.hypot(f[:, 0], f[:, 1])
            w = c - a
            denom = d[0] * f[:, 1] - d[1] * f[:, 0]
            par = np.abs(denom) <= 1e-12 * length * flen
            # collinear neighbours: any shared stretch or interior contact is degenerate
            for k in np.nonzero(par)[0]:
                off = abs(dh[0] * w[k, 1] - dh[1] * w[k, 0])
                if off > ceps:
                    continue
                t0 = float(np.dot(w[k], dh))
                t1 = float(np.dot(segs[k, 2:] - a, dh))
                lo, hi = max(0.0, min(t0, t1)), min(length, max(t0, t1))
                if hi < lo - ceps:
                    continue
                if hi - lo > ceps or (ceps < lo < length - ceps):
                    raise _Degenerate("route runs along an existing segment")
            ok = ~par
            with np.errstate(invalid="ignore", divide="ignore"):
                t = (w[:, 0] * f[:, 1] - w[:, 1] * f[:, 0]) / denom
                u = (w[:, 0] * d[1] - w[:, 1] * d[0]) / denom
            tl = t * length
            ul = u * flen
            ok &= (tl >= -ceps) & (tl <= length + ceps) & (ul >= -ceps) & (ul <= flen + ceps)
            for k in np.nonzero(ok)[0]:
                tk = float(tl[k])
                if tk <= ceps:
                    if first:
                        continue
                    raise _Degenerate("contact at a route corner")
                if tk >= length - ceps:
                    if last:
                        continue
                    raise _Degenerate("contact at a route corner")
                hits.append((tk, int(k)))

        if len(pts):
            rel = pts - a
            along = rel @ dh
            perp = np.abs(rel[:, 0] * dh[1] - rel[:, 1] * dh[0])
            near = (perp <= ceps) & (along > ceps) & (along < length - ceps)
            for k in np.nonzero(near)[0]:
                anchors.append((float(along[k]), pts[k]))

        items = sorted([(tk, "s", k) for tk, k in hits] + [(tk, "p", i) for i, (tk, _) in enumerate(anchors)])
        clusters: list[list[tuple[float, str, int]]] = []
        for it in items:
            if clusters and it[0] - clusters[-1][-1][0] <= 4 * ceps:
                clusters[-1].append(it)
            else:
                clusters.append([it])

        events = []
        for cl in clusters:
            seg_ids = sorted({k for _, kind, k in cl if kind == "s"})
            anchor_pts = [anchors[k][1] for _, kind, k in cl if kind == "p"]
            tk = float(np.mean([it[0] for it in cl]))
            x = anchor_pts[0].copy() if anchor_pts else a + dh * tk
            rays = []
            for k in seg_ids:
                p, q = segs[k, :2], segs[k, 2:]
                dp, dq = float(np.hypot(*(p - x))), float(np.hypot(*(q - x)))
                if dp <= 8 * ceps:
                    rays.append((q - x) / dq)
                elif dq <= 8 * ceps:
                    rays.append((p - x) / dp)
                else:
                    u = (q - p) / float(np.hypot(*(q - p)))
                    rays.extend([u, -u])
            events.append(_Event(tk, x, rays, seg_ids, bool(anchor_pts)))
        return events

    def _detour(self, ev: _Event, a, b, segs, pts, ceps) -> list[np.ndarray]:
        d = b - a
        dh = d / float(np.hypot(*d))
        if not ev.anchored and len(ev.segs) == 1 and len(ev.rays) == 2:
            u = ev.rays[0]
            if abs(float(dh @ u)) <= 1e-3 * self.tol:
                return []  # already a right-angle crossing

        mask = np.ones(len(segs), dtype=bool)
        mask[ev.segs] = False
        dmin = math.inf
        if mask.any():
            dmin = float(_seg_point_dist(segs[mask], ev.x).min())
        if len(pts):
            pd = np.hypot(*(pts - ev.x).T)
            pd = pd[pd > 8 * ceps]
            if len(pd):
                dmin = min(dmin, float(pd.min()))
        eps = 0.25 * dmin
        if not math.isfinite(eps) or eps < 1e3 * ceps:
            raise _Degenerate(f"crossing at {ev.x.tolist()} has no room (radius {eps:g})")
        x = ev.x

        for u in ev.rays:
            ang = abs(math.atan2(dh[0] * u[1] - dh[1] * u[0], float(dh @ u)))
            if ang < _MIN_RAY_ANGLE or math.pi - ang < _MIN_RAY_ANGLE:
                raise _Degenerate("a segment leaves the crossing along the route")

        if not ev.anchored and len(ev.segs) == 1 and len(ev.rays) == 2:
            u = ev.rays[0]
            c = float(dh @ u)
            if abs(c) >= _MIN_REFLECT_COS:
                v1 = x - eps * dh
                v3 = x + eps * dh
                v2 = x + 2 * eps * c * u - eps * dh  # v3 mirrored in the crossed line
                return [v1, v2, v3]

        left = np.array([-dh[1], dh[0]])
        side = [float(r @ left) for r in ev.rays]
        n_left = sum(1 for s in side if s > 0)
        n_right = len(side) - n_left
        e2 = left if n_left <= n_right else -left
        local = []
        for r in ev.rays:
            y = float(r @ e2)
            if y > 0:
                local.append(math.atan2(y, float(r @ dh)))
        thetas = sorted(local, reverse=True)
        rho = 0.5 * eps

        def world(lx: float, ly: float) -> np.ndarray:
            return x + lx * dh + ly * e2

        corners = [world(-eps, 0.0)]
        if not thetas:
            corners.append(world(0.0, rho))
        bounds = [math.pi, *thetas, 0.0]
        for j, th in enumerate(thetas, start=1):
            gap = min(bounds[j - 1] - th, th - bounds[j + 1])
            if gap <= 1e-9:
                raise _Degenerate("rays at the crossing coincide")
            h = rho * math.tan(gap / 3)
            if h < 1e2 * ceps:
                raise _Degenerate("rays at the crossing are too close together")
            cx, cy = rho * math.cos(th), rho * math.sin(th)
            tx, ty = math.sin(th), -math.cos(th)  # towards decreasing angle
            corners.append(world(cx - h * tx, cy - h * ty))
            corners.append(world(cx + h * tx, cy + h * ty))
        corners.append(world(eps, 0.0))
        return corners


def _validate_partial(d: Drawing, tol: float):
    """Validate whatever part of the final graph ``d`` already draws."""
    ids = sorted(d.vertex_pos)
    new_of = {v: i for i, v in enumerate(ids)}
    g = Graph(len(ids), [(new_of[u], new_of[v]) for u, v in d.edge_polylines])
    relabeled = Drawing(
        {new_of[v]: p for v, p in d.vertex_pos.items()},
        {},
    )
    for (u, v), bends in d.edge_polylines.items():
        a, b = new_of[u], new_of[v]
        relabeled.edge_polylines[edge_key(a, b)] = list(bends) if a < b else list(reversed(bends))
    return validate(g, relabeled, BendBudget(10**18), tol)


def _tree_layout(root: int, children: dict[int, list[int]]) -> dict[int, tuple[int, float]]:
    """(depth, lateral) for a rooted tree: leaves get consecutive slots and
    an inner node sits midway between its first and last leaf.  Drawn with
    depth as one axis, edges never cross."""
    out: dict[int, tuple[int, float]] = {}
    next_leaf = 0
    # iterative post-order
    stack: list[tuple[int, int, bool]] = [(root, 0, False)]
    span: dict[int, tuple[float, float]] = {}
    while stack:
        v, depth, done = stack.pop()
        kids = children.get(v, [])
        if not kids:
            span[v] = (next_leaf, next_leaf)
            out[v] = (depth, float(next_leaf))
            next_leaf += 1
            continue
        if not done:
            stack.append((v, depth, True))
            for c in reversed(kids):
                stack.append((c, depth + 1, False))
            continue
        lo = span[kids[0]][0]
        hi = span[kids[-1]][1]
        span[v] = (lo, hi)
        out[v] = (depth, 0.5 * (lo + hi))
    return out


def _place_tree(
    d: Drawing,
    root: int,
    children: dict[int, list[int]],
    parent: dict[int, int],
    center: np.ndarray,
    radius: float,
    bisector: float,
    half: float,
) -> None:
    """Lay the pendant tree below ``root`` (already at ``center``) inside the
    cone of half-angle ``half`` around direction ``bisector``."""
    lay = _tree_layout(root, children)
    depth_max = max(dp for dp, _ in lay.values())
    if depth_max == 0:
        return
    y0 = lay[root][1]
    ymax = max(0.5, max(abs(y - y0) for _, y in lay.values()))
    step = radius / depth_max
    k = step * math.tan(half) / ymax
    bx, by = math.cos(bisector), math.sin(bisector)
    nx, ny = -by, bx
    for v, (dp, y) in lay.items():
        if v == root:
            continue
        r = dp * step
        lat = (y - y0) * k
        d.vertex_pos[v] = Point(float(center[0] + r * bx + lat * nx), float(center[1] + r * by + lat * ny))
        d.edge_polylines[edge_key(v, parent[v])] = []


def regrow_pruned(d: Drawing, log: tuple[Removal, ...] | list[Removal], tol: float = DEFAULT_TOL) -> None:
    """Re-insert vertices removed by degree-one pruning, in place."""
    if not log:
        return
    removed = {r.vertex for r in log}
    parent = {r.vertex: r.anchor for r in log if r.anchor is not None}
    children: dict[int, list[int]] = {}
    for r in log:
        if r.anchor is not None:
            children.setdefault(r.anchor, []).append(r.vertex)
    for kids in children.values():
        kids.sort()

    anchors = sorted(a for a in children if a not in removed)
    roots = [r.vertex for r in log if r.anchor is None]

    segs, ends = _drawing_segments(d)
    pts = [tuple(p) for p in d.vertex_pos.values()]
    for bends in d.edge_polylines.values():
        pts.extend(tuple(p) for p in bends)
    pts_arr = np.array(pts, dtype=float).reshape(-1, 2)

    plans = []
    for a in anchors:
        pa = np.array(d.vertex_pos[a], dtype=float)
        mask = (ends[:, 0] != a) & (ends[:, 1] != a) if len(segs) else np.zeros(0, dtype=bool)
        dmin = math.inf
        if mask.any():
            dmin = float(_seg_point_dist(segs[mask], pa).min())
        pd = np.hypot(*(pts_arr - pa).T)
        pd = pd[pd > 0]
        if len(pd):
            dmin = min(dmin, float(pd.min()))
        if not math.isfinite(dmin):
            dmin = 1.0
        # directions of the segments leaving a
        angles = []
        for k in np.nonzero(~mask)[0]:
            if ends[k, 0] == a:
                v = segs[k, 2:] - segs[k, :2]
            else:
                v = segs[k, :2] - segs[k, 2:]
            angles.append(math.atan2(v[1], v[0]))
        if angles:
            angles.sort()
            gaps = [(angles[(i + 1) % len(angles)] - angles[i]) % (2 * math.pi) for i in range(len(angles))]
            if len(angles) == 1:
                gaps = [2 * math.pi]
            i = int(np.argmax(gaps))
            bis = angles[i] + 0.5 * gaps[i]
            usable = min(gaps[i], math.pi)
        else:
            bis, usable = 0.0, math.pi
        half = 0.25 * usable
        radius = 0.45 * dmin * math.cos(half)
        plans.append((a, pa, radius, bis, half))

    for a, pa, radius, bis, half in plans:
        _place_tree(d, a, children, parent, pa, radius, bis, half)

    if roots:
        x0, y0, x1, y1 = d.bbox()
        delta = max(d.diameter(), 1.0)
        for k, r in enumerate(sorted(roots)):
            center = np.array([x1 + delta * (2 * k + 1), y0], dtype=float)
            d.vertex_pos[r] = Point(float(center[0]), float(center[1]))
            _place_tree(d, r, children, parent, center, 0.45 * delta, 0.5 * math.pi, 0.25 * math.pi)
