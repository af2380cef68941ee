"""Feedback-edge-number kernel: prune degree-one vertices, split the
remaining spanning tree into special-vertex-bounded paths, drop the paths
beyond the first large multiplicative gap, and lift drawings back.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .drawing import BendBudget, Drawing, validate
from .geometry import DEFAULT_TOL
from .graph import (
    Edge,
    FeedbackEdgeSet,
    Graph,
    Removal,
    degree_one_prune,
    edge_key,
    feedback_edge_set,
    iter_edges_of_path,
)

log = logging.getLogger(__name__)

PROOF = "proof"
LITERAL = "literal"


class KernelError(ValueError):
    pass


class KernelBoundError(KernelError):
    """A size bound that the construction guarantees was exceeded."""


class LiftError(RuntimeError):
    pass


@dataclass(frozen=True)
class PathPartition:
    """Paths of the spanning tree, ascending by length.

    Each path is a vertex sequence whose two ends are special and whose
    interior vertices are not.
    """

    paths: tuple[tuple[int, ...], ...]
    feedback: frozenset[Edge]
    special: frozenset[int]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) - 1 for p in self.paths)

    @property
    def ell(self) -> int:
        return len(self.paths)

    @property
    def p0(self) -> int:
        return len(self.feedback)


@dataclass(frozen=True)
class ShortLongSplit:
    i0: int
    gap_index: int | None  # minimal i with p_i > 9 * ell * p_{i-1}, if any
    rule: str
    short: tuple[tuple[int, ...], ...]
    long: tuple[tuple[int, ...], ...]


def build_path_partition(g: Graph, f: FeedbackEdgeSet) -> PathPartition:
    """Unique partition of the tree ``g - F`` into maximal special-free paths."""
    low = [v for v in g.vertices if g.degree(v) < 2]
    if low:
        raise KernelError(f"graph still has vertices of degree < 2: {low[:10]}")
    fset = set(f.edges)
    tree_adj: dict[int, list[int]] = {v: [] for v in g.vertices}
    for u, v in g.edges:
        if (u, v) not in fset:
            tree_adj[u].append(v)
            tree_adj[v].append(u)
    if len(g.edges) - len(fset) > g.n - 1:
        raise KernelError("graph minus the feedback set is not a forest")
    special = {v for e in fset for v in e}
    special |= {v for v in g.vertices if len(tree_adj[v]) >= 3}

    seen_edges: set[Edge] = set()
    paths: list[tuple[int, ...]] = []
    for s in sorted(special):
        for nxt in sorted(tree_adj[s]):
            if edge_key(s, nxt) in seen_edges:
                continue
            path = [s, nxt]
            seen_edges.add(edge_key(s, nxt))
            while path[-1] not in special:
                cur, prev = path[-1], path[-2]
                (step,) = [w for w in tree_adj[cur] if w != prev]
                seen_edges.add(edge_key(cur, step))
                path.append(step)
            if path[-1] < path[0]:
                path.reverse()
            paths.append(tuple(path))
    tree_edges = sum(len(a) for a in tree_adj.values()) // 2
    if len(seen_edges) != tree_edges:
        raise KernelError("tree edges not covered by special-bounded paths")
    paths.sort(key=lambda p: (len(p), p))
    return PathPartition(tuple(paths), frozenset(fset), frozenset(special))


def split_short_long(pp: PathPartition, rule: str = PROOF) -> ShortLongSplit:
    """Cut the ascending path lengths at the first gap ``p_i > 9 ell p_{i-1}``.

    ``rule="proof"`` makes the path past the gap the first long one (the
    reading under which every long path has enough vertices to be lifted);
    ``rule="literal"`` keeps it short, as the definition's inclusive bound
    reads.
    """
    if rule not in (PROOF, LITERAL):
        raise ValueError(f"unknown split rule {rule!r}")
    ell = pp.ell
    p = (pp.p0, *pp.lengths)
    gap = next((i for i in range(1, ell + 1) if p[i] > 9 * ell * p[i - 1]), None)
    if gap is None:
        i0 = ell
    else:
        i0 = gap if rule == LITERAL else gap - 1
    return ShortLongSplit(i0, gap, rule, pp.paths[:i0], pp.paths[i0:])


@dataclass
class FenKernelResult:
    kernel: Graph
    budget: BendBudget
    old_of: tuple[int, ...]  # kernel vertex -> original vertex
    long_paths: tuple[tuple[int, ...], ...]  # original ids, ascending length
    removal_log: tuple[Removal, ...]  # original ids, in removal order
    original: Graph
    original_budget: BendBudget
    fen: int
    partition: PathPartition | None = None
    split: ShortLongSplit | None = None
    rule: str = PROOF
    notes: list[str] = field(default_factory=list)

    @property
    def size_bound(self) -> int:
        return 2 * (36 * self.fen) ** (4 * self.fen)

    def chain_bound(self) -> int:
        if self.partition is None:
            return 0
        ell, p0 = self.partition.ell, self.partition.p0
        return sum(p0 * (9 * ell * self.fen) ** i for i in range(ell + 1))


def fen_of(g: Graph) -> int:
    return g.m - g.n + len(g.components())


def extract_kernel(g: Graph, budget: BendBudget, rule: str = PROOF) -> FenKernelResult:
    """Reduce ``(g, budget)`` to the short-path subgraph plus a lifting recipe.

    The kernel keeps every special vertex, including those whose incident
    tree paths are all long (they appear as isolated vertices), so that a
    kernel drawing fixes all long-path endpoints.
    """
    pruned = degree_one_prune(g)
    gp, old_of_p = pruned.graph, pruned.old_of
    fen = fen_of(g)
    f = feedback_edge_set(gp)
    assert f.size == fen

    if f.size == 0:
        # a forest: everything was pruned
        return FenKernelResult(
            Graph(0), BendBudget(budget.total, {}), (), (), pruned.log, g, budget, 0, rule=rule
        )

    pp = build_path_partition(gp, f)
    split = split_short_long(pp, rule)
    if len(pp.special) > 4 * fen or pp.ell > 4 * fen:
        raise KernelBoundError(f"{len(pp.special)} special vertices / {pp.ell} paths exceed 4*fen = {4 * fen}")

    short_edges = set(f.edges)
    for path in split.short:
        short_edges.update(iter_edges_of_path(list(path)))
    kernel, old_of_k = gp.edge_subgraph(short_edges, pp.special)
    old_of = tuple(old_of_p[v] for v in old_of_k)

    beta = {}
    for u, v in kernel.edges:
        beta[(u, v)] = budget.cap(edge_key(old_of[u], old_of[v]))
    result = FenKernelResult(
        kernel,
        BendBudget(budget.total, beta),
        old_of,
        tuple(tuple(old_of_p[v] for v in path) for path in split.long),
        pruned.log,
        g,
        budget,
        fen,
        pp,
        split,
        rule,
    )
    if kernel.m > result.size_bound:
        raise KernelBoundError(f"kernel has {kernel.m} edges > {result.size_bound}")
    if kernel.m > result.chain_bound():
        raise KernelBoundError(f"kernel has {kernel.m} edges > chain bound {result.chain_bound()}")
    return result


def lift_drawing(result: FenKernelResult, d_short: Drawing, tol: float = DEFAULT_TOL) -> Drawing:
    """Extend a valid drawing of the kernel to one of the original graph.

    Long paths are routed one at a time, ascending by length: each is first
    drawn straight between its endpoints and then bent (by moving its own
    interior vertices) around every non-right crossing.  Pruned vertices are
    re-grown last.  No bend budget is consumed.
    """
    from .routing import PathRouter, regrow_pruned

    report = validate(result.kernel, d_short, result.budget, tol)
    if not report.valid:
        raise LiftError(f"kernel drawing is not valid: {report.violations[:3]}")
    d = d_short.relabeled(result.old_of)
    router = PathRouter(d, tol)
    router.route_all([list(p) for p in result.long_paths])
    d = router.drawing
    regrow_pruned(d, result.removal_log, tol)

    final = validate(result.original, d, result.original_budget, tol)
    if not final.valid:
        raise LiftError(f"lifted drawing failed validation: {final.violations[:5]}")
    return d
