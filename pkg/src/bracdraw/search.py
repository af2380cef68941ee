"""Straight-line RAC feasibility search.

This is a semi-decision procedure: a drawing it returns has passed the
validator, but failing to find one proves nothing (except in grid mode,
where it proves there is no drawing on that particular grid).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import networkx as nx
import numpy as np
from networkx.algorithms.planar_drawing import combinatorial_embedding_to_pos
from scipy.optimize import least_squares, minimize

from .drawing import BendBudget, Drawing, straight_line_drawing, validate
from .geometry import DEFAULT_TOL
from .graph import Graph

log = logging.getLogger(__name__)

PLANAR = "planar"
NUMERIC = "numeric"
GRID = "grid"
MODES = (PLANAR, NUMERIC, GRID)

FOUND = "found"
BUDGET_EXHAUSTED = "budget-exhausted"
GRID_EXHAUSTED = "grid-exhausted"
NOT_PLANAR = "not-planar"
TOO_DENSE = "too-dense"
TOO_LARGE = "too-large-for-grid"

GRID_MAX_N = 5


@dataclass
class SearchResult:
    status: str
    drawing: Drawing | None = None
    restarts: int = 0
    iterations: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.drawing is not None


Accept = Callable[[Drawing], bool]


def _accept_all(d: Drawing) -> bool:
    return True


def _valid(g: Graph, d: Drawing, tol: float, accept: Accept) -> bool:
    return validate(g, d, BendBudget(0), tol).valid and accept(d)


def planar_shortcut(g: Graph, tol: float = DEFAULT_TOL, accept: Accept = _accept_all) -> SearchResult:
    """Crossing-free straight-line layout (on an integer grid) if ``g`` is planar."""
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    planar, emb = nx.check_planarity(h)
    if not planar:
        return SearchResult(NOT_PLANAR)
    if g.n == 0:
        return SearchResult(FOUND, Drawing({}, {}))
    pos = combinatorial_embedding_to_pos(emb)
    d = straight_line_drawing(g, {v: (float(x), float(y)) for v, (x, y) in pos.items()})
    if _valid(g, d, tol, accept):
        return SearchResult(FOUND, d)
    return SearchResult(NOT_PLANAR, notes=["planar layout rejected by acceptance check"])


# ---------------------------------------------------------------------------
# numeric penalty search
# ---------------------------------------------------------------------------


class _Penalty:
    """Smooth-ish penalty over vertex coordinates, with analytic gradient.

    Terms: squared cosine of every crossing between allowed pairs; squared
    escape distance for crossings between forbidden pairs (and, weighted by
    ``w_depth``, between allowed pairs, which favours fewer crossings); inverse-square
    barriers keeping vertices apart from each other and from non-incident
    edges; a soft box around the unit square.
    """

    def __init__(self, g: Graph, forbidden: set[tuple[int, int]]):
        self.n = g.n
        self.E = np.array(g.edges, dtype=int).reshape(-1, 2)
        m = len(self.E)
        pi, pj, fb = [], [], []
        for i in range(m):
            for j in range(i + 1, m):
                if set(g.edges[i]) & set(g.edges[j]):
                    continue
                pi.append(i)
                pj.append(j)
                fb.append((i, j) in forbidden)
        self.pi = np.array(pi, dtype=int)
        self.pj = np.array(pj, dtype=int)
        self.forb = np.array(fb, dtype=bool)
        vv = list(itertools.combinations(range(g.n), 2))
        self.va = np.array([a for a, _ in vv], dtype=int)
        self.vb = np.array([b for _, b in vv], dtype=int)
        ve = [(v, i) for v in range(g.n) for i, e in enumerate(g.edges) if v not in e]
        self.ve_v = np.array([v for v, _ in ve], dtype=int)
        self.ve_e = np.array([i for _, i in ve], dtype=int)
        self.d0 = 0.15 / math.sqrt(max(g.n, 1))
        self.w_bar = 1e-2
        self.w_forb = 10.0
        self.w_box = 1.0
        self.w_depth = 0.0

    def crossing_mask(self, P: np.ndarray) -> np.ndarray:
        A = P[self.E[:, 0]]
        B = P[self.E[:, 1]]
        a1, b1 = A[self.pi], B[self.pi]
        a2, b2 = A[self.pj], B[self.pj]
        d1 = b1 - a1
        d2 = b2 - a2

        def cr(u, v):
            return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

        o1 = cr(d1, a2 - a1)
        o2 = cr(d1, b2 - a1)
        o3 = cr(d2, a1 - a2)
        o4 = cr(d2, b1 - a2)
        return (o1 * o2 < 0) & (o3 * o4 < 0)

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        P = x.reshape(-1, 2)
        G = np.zeros_like(P)
        f = 0.0
        E = self.E
        if len(self.pi):
            A = P[E[:, 0]]
            B = P[E[:, 1]]
            D = B - A
            cross = self.crossing_mask(P)
            allowed = cross & ~self.forb
            if allowed.any():
                i, j = self.pi[allowed], self.pj[allowed]
                d1, d2 = D[i], D[j]
                dot = np.einsum("ij,ij->i", d1, d2)
                n1 = np.einsum("ij,ij->i", d1, d1)
                n2 = np.einsum("ij,ij->i", d2, d2)
                f += float(np.sum(dot * dot / (n1 * n2)))
                coef = (2 * dot / (n1 * n2))[:, None]
                g1 = coef * (d2 - (dot / n1)[:, None] * d1)
                g2 = coef * (d1 - (dot / n2)[:, None] * d2)
                np.add.at(G, E[i, 1], g1)
                np.add.at(G, E[i, 0], -g1)
                np.add.at(G, E[j, 1], g2)
                np.add.at(G, E[j, 0], -g2)
            bad = cross & self.forb
            if bad.any():
                f += self._escape(P, self.pi[bad], self.pj[bad], G, self.w_forb)
            if self.w_depth and allowed.any():
                f += self._escape(P, self.pi[allowed], self.pj[allowed], G, self.w_depth)

        # vertex-vertex barrier
        d0s = self.d0**2
        if len(self.va):
            diff = P[self.va] - P[self.vb]
            s = np.einsum("ij,ij->i", diff, diff)
            mask = s < d0s
            if mask.any():
                s_m = np.maximum(s[mask], 1e-18)
                r = d0s / s_m - 1
                f += self.w_bar * float(np.sum(r * r))
                dfds = self.w_bar * 2 * r * (-d0s / s_m**2)
                gv = (2 * dfds)[:, None] * diff[mask]
                np.add.at(G, self.va[mask], gv)
                np.add.at(G, self.vb[mask], -gv)
        # vertex-edge barrier
        if len(self.ve_v):
            p = P[self.ve_v]
            a = P[E[self.ve_e, 0]]
            b = P[E[self.ve_e, 1]]
            d = b - a
            ll = np.maximum(np.einsum("ij,ij->i", d, d), 1e-18)
            t = np.clip(np.einsum("ij,ij->i", p - a, d) / ll, 0.0, 1.0)
            c = a + t[:, None] * d
            diff = p - c
            s = np.einsum("ij,ij->i", diff, diff)
            mask = s < d0s
            if mask.any():
                s_m = np.maximum(s[mask], 1e-18)
                r = d0s / s_m - 1
                f += self.w_bar * float(np.sum(r * r))
                dfds = self.w_bar * 2 * r * (-d0s / s_m**2)
                gp = (2 * dfds)[:, None] * diff[mask]
                tm = t[mask][:, None]
                np.add.at(G, self.ve_v[mask], gp)
                np.add.at(G, E[self.ve_e[mask], 0], -gp * (1 - tm))
                np.add.at(G, E[self.ve_e[mask], 1], -gp * tm)
        # soft box
        lo, hi = -0.5, 1.5
        over = np.maximum(P - hi, 0) - np.maximum(lo - P, 0)
        f += self.w_box * float(np.sum(over * over))
        G += 2 * self.w_box * over
        return f, G.ravel()

    def _escape(self, P, i, j, G, weight: float) -> float:
        """Squared distance the cheapest endpoint must travel to undo the crossing."""
        E = self.E
        total = 0.0
        for ii, jj in zip(i, j):
            best = None
            for mover_edge, line_edge in ((ii, jj), (jj, ii)):
                c, dd = P[E[line_edge, 0]], P[E[line_edge, 1]]
                w = dd - c
                L = math.hypot(*w)
                for end in (0, 1):
                    a = P[E[mover_edge, end]]
                    z = a - c
                    N = w[0] * z[1] - w[1] * z[0]
                    delta = N / L
                    if best is None or abs(delta) < abs(best[0]):
                        dz = np.array([-w[1], w[0]]) / L
                        dw = np.array([z[1], -z[0]]) / L - N * w / L**3
                        best = (delta, E[mover_edge, end], E[line_edge, 0], E[line_edge, 1], dz, dw)
            delta, va, vc, vd, dz, dw = best
            total += weight * delta * delta
            k = weight * 2 * delta
            G[va] += k * dz
            G[vd] += k * dw
            G[vc] += k * (-dz - dw)
        return total

    def _barrier_rows(self, Q: np.ndarray, with_jac: bool):
        """Residuals ``sqrt(w) (d0^2/s - 1)`` for every vertex-vertex and
        vertex-edge pair closer than d0 (zero rows otherwise), plus Jacobian."""
        E = self.E
        d0s = self.d0**2
        c = math.sqrt(self.w_bar)
        nv = len(Q) * 2
        rows_vv, rows_ve = len(self.va), len(self.ve_v)
        r = np.zeros(rows_vv + rows_ve)
        J = np.zeros((rows_vv + rows_ve, nv)) if with_jac else None
        if rows_vv:
            diff = Q[self.va] - Q[self.vb]
            s = np.maximum(np.einsum("ij,ij->i", diff, diff), 1e-18)
            act = s < d0s
            r[:rows_vv][act] = c * (d0s / s[act] - 1)
            if with_jac and act.any():
                k = np.nonzero(act)[0]
                gv = (c * -d0s / s[k] ** 2 * 2)[:, None] * diff[k]
                for ax in (0, 1):
                    J[k, 2 * self.va[k] + ax] += gv[:, ax]
                    J[k, 2 * self.vb[k] + ax] -= gv[:, ax]
        if rows_ve:
            p = Q[self.ve_v]
            a = Q[E[self.ve_e, 0]]
            d = Q[E[self.ve_e, 1]] - a
            ll = np.maximum(np.einsum("ij,ij->i", d, d), 1e-18)
            t = np.clip(np.einsum("ij,ij->i", p - a, d) / ll, 0.0, 1.0)
            diff = p - (a + t[:, None] * d)
            s = np.maximum(np.einsum("ij,ij->i", diff, diff), 1e-18)
            act = s < d0s
            r[rows_vv:][act] = c * (d0s / s[act] - 1)
            if with_jac and act.any():
                k = np.nonzero(act)[0]
                gp = (c * -d0s / s[k] ** 2 * 2)[:, None] * diff[k]
                tk = t[k][:, None]
                row = rows_vv + k
                for ax in (0, 1):
                    J[row, 2 * self.ve_v[k] + ax] += gp[:, ax]
                    J[row, 2 * E[self.ve_e[k], 0] + ax] -= (gp * (1 - tk))[:, ax]
                    J[row, 2 * E[self.ve_e[k], 1] + ax] -= (gp * tk)[:, ax]
        return r, J

    def polish(self, x: np.ndarray) -> np.ndarray:
        """Drive the cosines of the current crossing set to zero
        (Levenberg-Marquardt), keeping the separation barriers so vertices
        cannot collapse onto each other or onto edges."""
        P = x.reshape(-1, 2)
        cross = self.crossing_mask(P) & ~self.forb if len(self.pi) else np.zeros(0, dtype=bool)
        if not cross.any():
            return x
        i, j = self.pi[cross], self.pj[cross]
        E = self.E
        x0 = x.copy()
        reg = 1e-3

        def resid(y):
            Q = y.reshape(-1, 2)
            D = Q[E[:, 1]] - Q[E[:, 0]]
            d1, d2 = D[i], D[j]
            dot = np.einsum("ij,ij->i", d1, d2)
            nn = np.sqrt(np.einsum("ij,ij->i", d1, d1) * np.einsum("ij,ij->i", d2, d2))
            bar, _ = self._barrier_rows(Q, False)
            return np.concatenate([dot / nn, bar, reg * (y - x0)])

        def jac(y):
            Q = y.reshape(-1, 2)
            D = Q[E[:, 1]] - Q[E[:, 0]]
            d1, d2 = D[i], D[j]
            n1 = np.einsum("ij,ij->i", d1, d1)
            n2 = np.einsum("ij,ij->i", d2, d2)
            dot = np.einsum("ij,ij->i", d1, d2)
            nn = np.sqrt(n1 * n2)
            cos = dot / nn
            g1 = d2 / nn[:, None] - (cos / n1)[:, None] * d1
            g2 = d1 / nn[:, None] - (cos / n2)[:, None] * d2
            J = np.zeros((len(i), len(y)))
            rows = np.arange(len(i))
            for col_v, sign, gg in ((E[i, 1], 1, g1), (E[i, 0], -1, g1), (E[j, 1], 1, g2), (E[j, 0], -1, g2)):
                for k in (0, 1):
                    np.add.at(J, (rows, 2 * col_v + k), sign * gg[:, k])
            _, JB = self._barrier_rows(Q, True)
            return np.vstack([J, JB, reg * np.eye(len(y))])

        try:
            # a box of half the barrier radius keeps the crossing structure
            # from changing under the step
            box = 0.5 * self.d0
            sol = least_squares(
                resid, x, jac=jac, method="trf", bounds=(x0 - box, x0 + box),
                xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200,
            )
        except Exception as exc:  # pragma: no cover - defensive
            log.debug("polish failed: %s", exc)
            return x
        return sol.x


def numeric_search(
    g: Graph,
    seed: int = 0,
    restarts: int = 64,
    iters: int = 2000,
    tol: float = DEFAULT_TOL,
    forbidden: set[tuple[int, int]] = frozenset(),
    accept: Accept = _accept_all,
) -> SearchResult:
    """Random restarts of L-BFGS on the penalty, each followed by a polish and
    a full validation.  Odd restarts first run a stage that also penalizes
    crossing depth, steering away from minima with surplus crossings."""
    if g.n == 0:
        return SearchResult(FOUND, Drawing({}, {}))
    rng = np.random.default_rng(seed)
    pen = _Penalty(g, set(forbidden))
    total_iters = 0
    for r in range(restarts):
        x0 = rng.uniform(0.0, 1.0, size=2 * g.n)
        opts = {"maxiter": iters, "gtol": 1e-14, "ftol": 1e-16}
        if r % 2:
            pen.w_depth = 1.0
            res = minimize(pen, x0, jac=True, method="L-BFGS-B", options=opts)
            total_iters += int(res.nit)
            x0 = res.x
            pen.w_depth = 0.0
        res = minimize(pen, x0, jac=True, method="L-BFGS-B", options=opts)
        total_iters += int(res.nit)
        x = pen.polish(res.x)
        P = x.reshape(-1, 2)
        d = straight_line_drawing(g, {v: (float(P[v, 0]), float(P[v, 1])) for v in g.vertices})
        if _valid(g, d, tol, accept):
            return SearchResult(FOUND, d, r + 1, total_iters)
    return SearchResult(BUDGET_EXHAUSTED, None, restarts, total_iters)


# ---------------------------------------------------------------------------
# exhaustive grid
# ---------------------------------------------------------------------------


def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def exact_straight_rac(g: Graph, pos: dict[int, tuple[int, int]]) -> bool:
    """Exact integer test of a straight-line RAC drawing (injective positions assumed)."""
    edges = g.edges
    for v in g.vertices:
        p = pos[v]
        for a, b in edges:
            if v in (a, b):
                continue
            if _orient(pos[a], pos[b], p) == 0 and _on_segment(pos[a], pos[b], p):
                return False
    for (a, b), (c, d) in itertools.combinations(edges, 2):
        pa, pb, pc, pd = pos[a], pos[b], pos[c], pos[d]
        shared = {a, b} & {c, d}
        if shared:
            w = shared.pop()
            x = b if a == w else a
            y = d if c == w else c
            px, py, pw = pos[x], pos[y], pos[w]
            # collinear and pointing the same way from w means overlap
            if _orient(pw, px, py) == 0 and (px[0] - pw[0]) * (py[0] - pw[0]) + (px[1] - pw[1]) * (py[1] - pw[1]) > 0:
                return False
            continue
        o1, o2 = _orient(pa, pb, pc), _orient(pa, pb, pd)
        o3, o4 = _orient(pc, pd, pa), _orient(pc, pd, pb)
        if o1 == o2 == o3 == o4 == 0:
            if _on_segment(pa, pb, pc) or _on_segment(pa, pb, pd) or _on_segment(pc, pd, pa):
                return False
            continue
        if o1 * o2 < 0 and o3 * o4 < 0:
            dot = (pb[0] - pa[0]) * (pd[0] - pc[0]) + (pb[1] - pa[1]) * (pd[1] - pc[1])
            if dot != 0:
                return False
    return True


def grid_search(
    g: Graph, width: int = 3, tol: float = DEFAULT_TOL, accept: Accept = _accept_all
) -> SearchResult:
    """Try every injective placement on a ``width`` x ``width`` grid (n <= 5)."""
    if g.n > GRID_MAX_N:
        return SearchResult(TOO_LARGE, notes=[f"grid mode handles n <= {GRID_MAX_N}"])
    points = [(x, y) for x in range(width) for y in range(width)]
    tried = 0
    for choice in itertools.permutations(points, g.n):
        tried += 1
        pos = dict(zip(g.vertices, choice))
        if exact_straight_rac(g, pos):
            d = straight_line_drawing(g, {v: (float(x), float(y)) for v, (x, y) in pos.items()})
            if _valid(g, d, tol, accept):
                return SearchResult(FOUND, d, iterations=tried)
    return SearchResult(GRID_EXHAUSTED, iterations=tried, notes=[f"no straight-line RAC drawing on the {width}x{width} grid"])


def density_ok(g: Graph) -> bool:
    """Necessary condition for straight-line RAC drawability: m <= 4n - 10 (n >= 4)."""
    return g.n < 4 or g.m <= 4 * g.n - 10


def straight_line_rac_search(
    g: Graph,
    mode: str = NUMERIC,
    seed: int = 0,
    restarts: int = 64,
    iters: int = 2000,
    tol: float = DEFAULT_TOL,
    grid_width: int = 3,
    forbidden: set[tuple[int, int]] = frozenset(),
    accept: Accept = _accept_all,
    density_filter: bool = True,
) -> SearchResult:
    if mode not in MODES:
        raise ValueError(f"unknown search mode {mode!r}")
    res = planar_shortcut(g, tol, accept)
    if res.found or mode == PLANAR:
        return res
    if mode == GRID:
        return grid_search(g, grid_width, tol, accept)
    if density_filter and not density_ok(g):
        return SearchResult(TOO_DENSE, notes=[f"m = {g.m} > 4n - 10 = {4 * g.n - 10}"])
    return numeric_search(g, seed, restarts, iters, tol, forbidden, accept)
