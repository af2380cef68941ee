"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import statistics
import sys
import time
from pathlib import Path

import networkx as nx
import pytest

from bracdraw.drawing import BendBudget, Drawing, bend_count, straight_line_drawing, validate
from bracdraw.generate import generate_instance
from bracdraw.geometry import Point
from bracdraw.graph import Graph, nd_partition, vertex_cover
from bracdraw.kernel_fen import LiftError, extract_kernel, fen_of, lift_drawing
from bracdraw.kernel_vc import KERNEL, REJECT, nd_to_vertex_cover, vc_kernelize, vc_lift_drawing
from bracdraw.routing import RoutingError
from bracdraw.search import NUMERIC
from bracdraw.solver import NO, YES, SolveOptions, solve

sys.path.insert(0, str(Path(__file__).parent))
from conftest import complete, complete_bipartite, cycle, random_graph, theta  # noqa: E402

TOL = 1e-9


@pytest.fixture
def announce(capsys):
    def _announce(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")

    return _announce


def _k5_witness() -> Drawing:
    return straight_line_drawing(complete(5), {0: (0, 0), 1: (6, 0), 2: (3, 6), 3: (2, 3), 4: (3, 4)})


def _restrict(d: Drawing, old_of) -> Drawing:
    """Sub-drawing on the kernel's vertices and edges, renamed to kernel ids."""
    new_of = {o: i for i, o in enumerate(old_of)}
    sub = Drawing(
        {o: d.vertex_pos[o] for o in old_of},
        {e: b for e, b in d.edge_polylines.items() if e[0] in new_of and e[1] in new_of},
    )
    return sub.relabeled(new_of)


# ---------------------------------------------------------------------------
# 1. validator ground truth
# ---------------------------------------------------------------------------


def test_criterion_1_validator_ground_truth(announce):
    t = time.perf_counter()
    g = complete(5)
    d = _k5_witness()
    good = validate(g, d, BendBudget(0), TOL)
    moved = d.copy()
    moved.vertex_pos[4] = Point(3.05, 4.0)
    bad = validate(g, moved, BendBudget(0), TOL)
    elapsed = time.perf_counter() - t
    kinds = {v.kind for v in bad.violations}
    ok = good.valid and good.crossing_count == 1 and not bad.valid and "non-right-crossing" in kinds and elapsed < 1.0
    announce(1, ok, f"witness valid={good.valid}, perturbed violations={sorted(kinds)}, {elapsed * 1000:.1f} ms")
    assert ok


# ---------------------------------------------------------------------------
# 2. feedback-edge kernel size and scaling
# ---------------------------------------------------------------------------


def _short_chain_ok(res) -> bool:
    """Independent check of the chain: every short path obeys the gap rule
    against its predecessor, and the kernel holds exactly the feedback edges
    plus the short paths."""
    if res.partition is None:
        return res.kernel.m == 0
    pp, ell = res.partition, res.partition.ell
    p = (pp.p0, *pp.lengths)
    i0 = len(res.split.short)
    if any(p[i] > 9 * ell * p[i - 1] for i in range(1, i0 + 1)):
        return False
    bound = sum(pp.p0 * (9 * ell * res.fen) ** i for i in range(ell + 1))
    return res.kernel.m == pp.p0 + sum(p[1 : i0 + 1]) and res.kernel.m <= bound


def test_criterion_2_fen_kernel_size(announce):
    sizes = (50, 500, 1000, 2500, 5000)
    times: dict[int, list[float]] = {n: [] for n in sizes}
    failures = []
    worst = 0.0
    count = 0
    for fen in (1, 2, 3, 4):
        for n in sizes:
            for seed in range(10):
                inst = generate_instance("bounded-fen", fen, n, 2, 1000 * fen + seed)
                t = time.perf_counter()
                res = extract_kernel(inst.graph, inst.budget)
                dt = time.perf_counter() - t
                times[n].append(dt)
                worst = max(worst, dt)
                count += 1
                if res.fen != fen or res.kernel.m > 2 * (36 * fen) ** (4 * fen) or not _short_chain_ok(res) or dt >= 1.0:
                    failures.append((fen, n, seed))
    ratio = statistics.median(times[5000]) / statistics.median(times[500])
    ok = count == 200 and not failures and ratio <= 20
    announce(2, ok, f"{count} instances, {len(failures)} failures, worst {worst:.3f} s, median time ratio n=5000/n=500 {ratio:.1f}")
    assert ok, failures[:5]


# ---------------------------------------------------------------------------
# 3. feedback-edge round trip
# ---------------------------------------------------------------------------


def _stretched(fen: int, rng: random.Random) -> Graph:
    """Short cycles plus a few long subdivided paths, so long paths appear."""
    if fen == 1:
        g = cycle(rng.randint(3, 6))
        extra = rng.randint(40, 120)
        edges = list(g.edges) + [(0, g.n)] + [(g.n + i, g.n + i + 1) for i in range(extra - 1)]
        return Graph(g.n + extra, edges)
    return theta([1, rng.randint(2, 3), rng.randint(80, 200)], n_extra=0)


def test_criterion_3_fen_round_trip(announce):
    rng = random.Random(3)
    done, fails, skipped, with_long = 0, [], 0, 0
    seed = 0
    opts = SolveOptions(restarts=8, iters=400, max_allocations=4)
    while done < 50 and seed < 200:
        fen = 1 + seed % 2
        if seed % 4 < 2:
            inst = generate_instance("bounded-fen", fen, rng.randint(10, 300), rng.randint(0, 2), seed, rng.randint(0, 3))
            g, budget = inst.graph, inst.budget
        else:
            g = _stretched(fen, rng)
            budget = BendBudget(rng.randint(0, 2), {e: rng.randint(0, 3) for e in g.edges})
        seed += 1
        res = extract_kernel(g, budget)
        out = solve(res.kernel, res.budget, opts)
        if out.verdict != YES:
            skipped += 1
            continue
        done += 1
        with_long += bool(res.long_paths)
        try:
            lifted = lift_drawing(res, out.drawing, TOL)
        except (LiftError, RoutingError) as exc:
            fails.append((seed, str(exc)))
            continue
        report = validate(g, lifted, budget, TOL)
        if not report.valid or bend_count(lifted)[0] != bend_count(out.drawing)[0]:
            fails.append((seed, report.violations[:2]))
    ok = done == 50 and not fails and with_long > 0
    announce(3, ok, f"{done} kernels drawn ({with_long} with long paths, {skipped} skipped as unsolved), {len(fails)} lift failures")
    assert ok, fails[:3]


# ---------------------------------------------------------------------------
# 4. vertex-cover kernel thresholds
# ---------------------------------------------------------------------------


def test_criterion_4_vc_thresholds(announce):
    k33 = complete_bipartite(3, 3)
    b0 = BendBudget(0, {e: 0 for e in k33.edges})
    r33 = vc_kernelize(k33, b0, vertex_cover(k33))
    solved = solve(r33.kernel, r33.budget, SolveOptions(mode=NUMERIC, seed=0)) if r33.verdict == KERNEL else None
    k33_ok = r33.verdict == KERNEL and r33.kernel.n == 6 and solved.verdict == YES
    k33_ok = k33_ok and validate(r33.kernel, solved.drawing, r33.budget, TOL).valid

    k38 = complete_bipartite(3, 8)
    r38 = vc_kernelize(k38, BendBudget(0, {e: 0 for e in k38.edges}), vertex_cover(k38))

    k250 = complete_bipartite(2, 50)
    r250 = vc_kernelize(k250, BendBudget(0, {e: 0 for e in k250.edges}), vertex_cover(k250))
    members = r250.kernel.n - 2
    ok = k33_ok and r38.verdict == REJECT and r250.verdict == KERNEL and members == 13
    announce(4, ok, f"K3,3 kernel+yes={k33_ok}, K3,8 verdict={r38.verdict}, K2,50 trims to {members} members")
    assert ok


# ---------------------------------------------------------------------------
# 5. vertex-cover kernel size
# ---------------------------------------------------------------------------


def test_criterion_5_vc_kernel_size(announce):
    rng = random.Random(5)
    kernels, rejects, fails = 0, 0, []
    for seed in range(100):
        param = rng.randint(2, 5)
        b = rng.randint(0, 2)
        inst = generate_instance("bounded-vc", param, rng.randint(param, 80), b, seed, rng.randint(0, 3))
        c = vertex_cover(inst.graph)
        assert c.size <= param
        res = vc_kernelize(inst.graph, inst.budget, c)
        if res.verdict == REJECT:
            rejects += 1
            continue
        kernels += 1
        k = res.k
        if res.kernel.n > k + 2**k * (b + 4) + k * k * (3 * k + 7 + b):
            fails.append(seed)
    ok = kernels + rejects == 100 and kernels > 0 and not fails
    announce(5, ok, f"{kernels} kernels within bound, {rejects} rejections, {len(fails)} over bound")
    assert ok, fails


# ---------------------------------------------------------------------------
# 6. solver soundness and known instances
# ---------------------------------------------------------------------------


def test_criterion_6_solver_known_instances(announce):
    timings = {}
    yes = {}
    for name, g in (("K5", complete(5)), ("K3,3", complete_bipartite(3, 3))):
        budget = BendBudget(0, {e: 0 for e in g.edges})
        t = time.perf_counter()
        out = solve(g, budget, SolveOptions(mode=NUMERIC, seed=0))
        timings[name] = time.perf_counter() - t
        yes[name] = out.verdict == YES and validate(g, out.drawing, budget, TOL).valid and timings[name] <= 60

    k6 = complete(6)
    k6_yes = 0
    for seed in range(10):
        out = solve(
            k6,
            BendBudget(0, {e: 0 for e in k6.edges}),
            SolveOptions(mode=NUMERIC, seed=seed, restarts=8, iters=300, density_filter=False),
        )
        k6_yes += out.verdict == YES

    rng = random.Random(6)
    pool = [complete(n) for n in range(2, 9)] + [complete_bipartite(3, 5), complete_bipartite(4, 4)]
    pool += [random_graph(rng.randint(2, 8), 0.6, rng) for _ in range(20)]
    three_ok = 0
    for g in pool:
        budget = BendBudget(3 * g.m, {e: 3 for e in g.edges})
        out = solve(g, budget, SolveOptions(restarts=1, iters=50, max_allocations=1))
        three_ok += out.verdict == YES and validate(g, out.drawing, budget, TOL).valid
    ok = all(yes.values()) and k6_yes == 0 and three_ok == len(pool)
    announce(
        6,
        ok,
        f"K5 yes={yes['K5']} ({timings['K5']:.1f} s), K3,3 yes={yes['K3,3']} ({timings['K3,3']:.1f} s), "
        f"K6 yes in {k6_yes}/10 seeds, three-bend yes on {three_ok}/{len(pool)}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 7. neighbourhood-diversity reduction
# ---------------------------------------------------------------------------


def _blow_up(sizes, kinds, base_edges) -> Graph:
    start = list(itertools.accumulate([0, *sizes]))
    edges = []
    for i, (s, kind) in enumerate(zip(sizes, kinds)):
        if kind == "clique":
            edges += itertools.combinations(range(start[i], start[i] + s), 2)
    for i, j in base_edges:
        edges += [(a, c) for a in range(start[i], start[i] + sizes[i]) for c in range(start[j], start[j] + sizes[j])]
    return Graph(start[-1], edges)


def test_criterion_7_nd_reduction(announce):
    rng = random.Random(7)
    accepted, rejected, fails = 0, 0, []
    for trial in range(150):
        parts = rng.randint(1, 5)
        sizes = [rng.randint(1, 6) for _ in range(parts)]
        kinds = [rng.choice(["clique", "independent"]) for _ in range(parts)]
        base = [e for e in itertools.combinations(range(parts), 2) if rng.random() < 0.5]
        g = _blow_up(sizes, kinds, base) if trial % 3 else random_graph(rng.randint(1, 10), 0.4, rng)
        b = rng.randint(0, 4)
        budget = BendBudget(b, {e: 3 for e in g.edges})
        ndp = nd_partition(g)
        res = nd_to_vertex_cover(g, ndp, budget)
        if res.rejected:
            rejected += 1
            continue
        accepted += 1
        if not res.cover.covers(g) or res.cover.size > 5 * ndp.nd + b:
            fails.append(trial)
    k6 = complete(6)
    k6_res = nd_to_vertex_cover(k6, nd_partition(k6), BendBudget(0, {e: 0 for e in k6.edges}))
    ok = not fails and accepted > 0 and k6_res.rejected
    announce(7, ok, f"{accepted} accepted covers within 5nd+b, {rejected} rejected, K6 b=0 rejected={k6_res.rejected}")
    assert ok, fails


# ---------------------------------------------------------------------------
# 8. oracle equivalence
# ---------------------------------------------------------------------------


def _connected_small_graphs() -> list[Graph]:
    out = []
    for h in nx.graph_atlas_g():
        if 1 <= h.number_of_nodes() <= 6 and nx.is_connected(h):
            out.append(Graph(h.number_of_nodes(), h.edges()))
    return out


def test_criterion_8_oracle_equivalence(announce):
    graphs = _connected_small_graphs()
    opts = SolveOptions(mode=NUMERIC, restarts=12, iters=400, max_allocations=8)
    stats = {"pairs": 0, "raw_agree": 0, "lift_resolved": 0, "restrict_resolved": 0, "unresolved": 0, "failures": 0}
    details = []
    for gi, g in enumerate(graphs):
        for b in (0, 1):
            budget = BendBudget(b, {e: 1 for e in g.edges})
            base = solve(g, budget, SolveOptions(**{**opts.__dict__, "seed": gi}))
            kernels = [("vc", vc_kernelize(g, budget, vertex_cover(g)))]
            if fen_of(g) <= 2:
                kernels.append(("fen", extract_kernel(g, budget)))
            for kind, res in kernels:
                stats["pairs"] += 1
                if kind == "vc" and res.verdict == REJECT:
                    kout = solve(res.kernel, res.budget, opts)
                else:
                    kout = solve(res.kernel, res.budget, SolveOptions(**{**opts.__dict__, "seed": 1000 + gi}))
                a, k = base.verdict == YES, kout.verdict == YES
                if base.verdict == NO and k or kout.verdict == NO and a:
                    stats["failures"] += 1
                    details.append((gi, b, kind, base.verdict, kout.verdict))
                    continue
                if a == k:
                    stats["raw_agree"] += 1
                    continue
                if k:
                    # kernel-yes / original-unknown: the lift certifies the original
                    lift = lift_drawing if kind == "fen" else vc_lift_drawing
                    try:
                        d = lift(res, kout.drawing, TOL)
                    except (LiftError, RoutingError):
                        d = None
                    if d is not None and validate(g, d, budget, TOL).valid:
                        stats["lift_resolved"] += 1
                        continue
                else:
                    # original-yes / kernel-unknown: the kernel is a subgraph
                    # with the same budget, so restriction certifies it
                    if not (kind == "vc" and res.verdict == REJECT):
                        d = _restrict(base.drawing, res.old_of)
                        if validate(res.kernel, d, res.budget, TOL).valid:
                            stats["restrict_resolved"] += 1
                            continue
                stats["unresolved"] += 1
                details.append((gi, b, kind, base.verdict, kout.verdict))
    ok = len(graphs) == 143 and stats["failures"] == 0 and stats["unresolved"] == 0
    announce(8, ok, f"{len(graphs)} graphs, " + ", ".join(f"{k}={v}" for k, v in stats.items()))
    assert ok, details[:10]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
