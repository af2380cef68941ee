import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bracdraw.drawing import BendBudget, Drawing, bend_count, straight_line_drawing, validate
from bracdraw.generate import generate_instance
from bracdraw.graph import Graph, degree_one_prune, feedback_edge_set
from bracdraw.kernel_fen import (
    LITERAL,
    PROOF,
    KernelError,
    LiftError,
    PathPartition,
    build_path_partition,
    extract_kernel,
    lift_drawing,
    split_short_long,
)
from bracdraw.solver import SolveOptions, YES, solve, three_bend_drawing

from conftest import complete, cycle, path, theta


def synthetic_partition(p0: int, lengths) -> PathPartition:
    """A partition with the given length profile; vertex ids are dummies."""
    paths, nxt = [], 0
    for ln in lengths:
        paths.append(tuple(range(nxt, nxt + ln + 1)))
        nxt += ln + 1
    feedback = frozenset((10**6 + 2 * i, 10**6 + 2 * i + 1) for i in range(p0))
    return PathPartition(tuple(paths), feedback, frozenset())


def _maximal_free_paths(tree_adj, special):
    """Reference: walk from every special vertex along each tree edge until
    the next special vertex (plain DFS, no shared code)."""
    out = set()
    for s in special:
        for w in tree_adj[s]:
            walk, prev = [s, w], s
            while walk[-1] not in special:
                nxt = [x for x in tree_adj[walk[-1]] if x != prev]
                prev = walk[-1]
                walk.append(nxt[0])
            out.add(frozenset(zip(walk, walk[1:])) | frozenset(zip(walk[1:], walk)))
    return out


def _check_partition(g: Graph, f, pp):
    fset = set(f.edges)
    tree = [e for e in g.edges if e not in fset]
    adj = {v: [] for v in g.vertices}
    for u, v in tree:
        adj[u].append(v)
        adj[v].append(u)
    special = {v for e in fset for v in e} | {v for v in g.vertices if len(adj[v]) >= 3}
    assert pp.special == special
    covered = []
    for p in pp.paths:
        assert p[0] in special and p[-1] in special
        assert not set(p[1:-1]) & special
        covered += [tuple(sorted(e)) for e in zip(p, p[1:])]
    assert sorted(covered) == sorted(tree)
    got = {frozenset(zip(p, p[1:])) | frozenset(zip(p[1:], p)) for p in pp.paths}
    assert got == _maximal_free_paths(adj, special)


def test_theta_partition():
    g = theta([2, 3, 4])
    f = feedback_edge_set(g)
    pp = build_path_partition(g, f)
    _check_partition(g, f, pp)
    assert {0, 1} <= pp.special
    assert f.size == 2


def test_cycle_partition_single_path():
    g = cycle(8)
    f = feedback_edge_set(g)
    pp = build_path_partition(g, f)
    assert pp.ell == 1 and pp.lengths == (7,)


def test_k4_partition():
    g = complete(4)
    f = feedback_edge_set(g)
    pp = build_path_partition(g, f)
    assert pp.special == {0, 1, 2, 3}
    assert pp.ell == 3 and pp.lengths == (1, 1, 1)


def test_partition_needs_pruned_graph():
    g = path(3)
    with pytest.raises(KernelError):
        build_path_partition(g, feedback_edge_set(g))


def test_split_gap_at_last_path():
    sp = split_short_long(synthetic_partition(1, [2, 3, 200]))
    # 200 > 9 * 3 * 3 = 81 first fires at i = 3
    assert sp.gap_index == 3
    assert sp.i0 == 2 and len(sp.long) == 1 and len(sp.long[0]) == 201


def test_split_no_gap():
    sp = split_short_long(synthetic_partition(2, [3, 4, 5]))
    assert sp.gap_index is None and sp.i0 == 3 and sp.long == ()


def test_split_single_path_both_rules():
    pp = synthetic_partition(1, [100])
    proof = split_short_long(pp, PROOF)
    literal = split_short_long(pp, LITERAL)
    assert proof.gap_index == literal.gap_index == 1
    assert proof.i0 == 0 and len(proof.long) == 1
    assert literal.i0 == 1 and literal.long == ()
    with pytest.raises(ValueError):
        split_short_long(pp, "other")


def test_tree_kernel_is_empty_and_lift_regrows():
    rng = random.Random(3)
    g = Graph(30, [(v, rng.randrange(v)) for v in range(1, 30)])
    res = extract_kernel(g, BendBudget(0))
    assert res.kernel.n == 0 and res.fen == 0 and len(res.removal_log) == 30
    d = lift_drawing(res, Drawing({}, {}))
    r = validate(g, d, BendBudget(0))
    assert r.valid and r.crossing_count == 0


def test_pendants_pruned_from_cycle():
    rng = random.Random(4)
    edges = list(cycle(8).edges)
    for v in range(8, 48):
        edges.append((v, rng.randrange(v)))
    res = extract_kernel(Graph(48, edges), BendBudget(0))
    assert res.kernel == cycle(8)
    assert sorted(res.old_of) == list(range(8))


def long_theta(long_len: int = 10_000):
    return theta([2, 3, long_len])


def test_long_theta_path_is_removed():
    g = long_theta()
    res = extract_kernel(g, BendBudget(0))
    assert len(res.long_paths) == 1 and len(res.long_paths[0]) - 1 >= 9_000
    assert res.kernel.m < 10
    assert res.kernel.m <= res.size_bound and res.kernel.m <= res.chain_bound()


def test_triangle_with_long_path_lifts():
    # triangle 0-1-2 plus a 100-edge path from 0 to 1
    edges = [(0, 1), (1, 2), (0, 2), (0, 3)]
    edges += [(v, v + 1) for v in range(3, 101)] + [(101, 1)]
    g = Graph(102, edges)
    budget = BendBudget.uniform(g, 0, 0)
    res = extract_kernel(g, budget)
    # the spanning tree may put a path edge in F, leaving 99 tree edges
    assert len(res.long_paths) == 1 and len(res.long_paths[0]) - 1 >= 99
    assert res.kernel.m <= 4
    kd = solve(res.kernel, res.budget, SolveOptions(mode="planar")).drawing
    d = lift_drawing(res, kd)
    r = validate(g, d, budget)
    assert r.valid and r.total_bends == 0


def test_theta_end_to_end_with_solver():
    g = long_theta(2000)
    budget = BendBudget.uniform(g, 2, 1)
    res = extract_kernel(g, budget)
    out = solve(res.kernel, res.budget, SolveOptions(restarts=4, iters=300))
    assert out.verdict == YES
    d = lift_drawing(res, out.drawing)
    r = validate(g, d, budget)
    assert r.valid and r.total_bends == bend_count(out.drawing)[0]


def test_lift_rejects_invalid_kernel_drawing():
    res = extract_kernel(long_theta(500), BendBudget(0))
    pos = {v: (0.0, float(v)) for v in res.kernel.vertices}  # all collinear
    with pytest.raises(LiftError):
        lift_drawing(res, straight_line_drawing(res.kernel, pos))


def _random_fen_graph(rng: random.Random, fen: int, n: int, long_paths: int) -> Graph:
    """A bounded-fen instance with some edges stretched into long paths."""
    inst = generate_instance("bounded-fen", fen, n, 0, rng.randrange(10**9))
    edges = list(inst.graph.edges)
    nxt = inst.graph.n
    for _ in range(long_paths):
        u, v = edges.pop(rng.randrange(len(edges)))
        ln = rng.choice([300, 1500, 4000])
        chain = list(range(nxt, nxt + ln - 1))
        nxt += ln - 1
        walk = [u, *chain, v]
        edges += list(zip(walk, walk[1:]))
    return Graph(nxt, edges)


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(4, 40), st.integers(0, 10**6))
def test_partition_properties(fen, n, seed):
    rng = random.Random(seed)
    g = _random_fen_graph(rng, min(fen, n * (n - 1) // 2 - n + 1), n, rng.randrange(3))
    gp = degree_one_prune(g).graph
    f = feedback_edge_set(gp)
    if f.size == 0:
        return
    pp = build_path_partition(gp, f)
    _check_partition(gp, f, pp)
    assert pp.ell <= 4 * f.size and len(pp.special) <= 4 * f.size
    res = extract_kernel(g, BendBudget(0))
    assert res.kernel.m <= res.size_bound and res.kernel.m <= res.chain_bound()


@settings(max_examples=12)
@given(st.integers(1, 3), st.integers(4, 12), st.integers(1, 3), st.integers(0, 10**6))
def test_lift_of_three_bend_kernel_drawing(fen, n, longs, seed):
    # the three-bend drawing crosses a lot, which exercises every routing case
    rng = random.Random(seed)
    fen = min(fen, n * (n - 1) // 2 - n + 1)
    g = _random_fen_graph(rng, fen, n, longs)
    budget = BendBudget(3 * g.m, {e: 3 for e in g.edges})
    res = extract_kernel(g, budget)
    kd = three_bend_drawing(res.kernel)
    assert validate(res.kernel, kd, res.budget).valid
    d = lift_drawing(res, kd)
    r = validate(g, d, budget)
    assert r.valid
    assert r.total_bends == bend_count(kd)[0]
