"""Simple undirected graphs on dense integer vertices, plus the structural
parameters used by the kernels: feedback edge sets, vertex covers and
neighborhood-diversity partitions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class GraphError(ValueError):
    pass


class Graph:
    """Immutable simple undirected graph with vertices ``0 .. n-1``."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(n)]
        keys: set[Edge] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = edge_key(u, v)
            if key in keys:
                raise GraphError(f"parallel edge {key}")
            keys.add(key)
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(keys))
        self._adj = tuple(frozenset(s) for s in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in sorted(self._adj[x]):
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def induced(self, keep: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``keep``, relabelled densely.

        Returns the subgraph and ``old_of`` with ``old_of[new] = old``.
        """
        keep = set(keep)
        return self.edge_subgraph(
            [e for e in self.edges if e[0] in keep and e[1] in keep], keep
        )

    def edge_subgraph(
        self, edges: Iterable[Edge], extra_vertices: Iterable[int] = ()
    ) -> tuple["Graph", list[int]]:
        """Subgraph spanned by ``edges`` plus ``extra_vertices``, relabelled densely."""
        edges = [edge_key(*e) for e in edges]
        verts = set(extra_vertices)
        for u, v in edges:
            verts.add(u)
            verts.add(v)
        old_of = sorted(verts)
        new_of = {old: i for i, old in enumerate(old_of)}
        return Graph(len(old_of), [(new_of[u], new_of[v]) for u, v in edges]), old_of


# ---------------------------------------------------------------------------
# Feedback edge set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeedbackEdgeSet:
    edges: frozenset[Edge]

    @property
    def size(self) -> int:
        return len(self.edges)


def spanning_forest(g: Graph) -> list[Edge]:
    """Edges of a DFS spanning forest (iterative, smallest neighbour first)."""
    seen = [False] * g.n
    tree: list[Edge] = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [(root, iter(sorted(g.neighbors(root))))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if not seen[w]:
                    seen[w] = True
                    tree.append(edge_key(v, w))
                    stack.append((w, iter(sorted(g.neighbors(w)))))
                    break
            else:
                stack.pop()
    return tree


def feedback_edge_set(g: Graph) -> FeedbackEdgeSet:
    """Minimum feedback edge set: the complement of a spanning forest."""
    tree = set(spanning_forest(g))
    return FeedbackEdgeSet(frozenset(e for e in g.edges if e not in tree))


# ---------------------------------------------------------------------------
# Vertex cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexCover:
    vertices: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def covers(self, g: Graph) -> bool:
        return all(u in self.vertices or v in self.vertices for u, v in g.edges)


def _maximal_matching(g: Graph) -> list[Edge]:
    matched: set[int] = set()
    matching = []
    for u, v in g.edges:
        if u not in matched and v not in matched:
            matched.update((u, v))
            matching.append((u, v))
    return matching


def _cover_within(adj: dict[int, set[int]], k: int) -> set[int] | None:
    """Cover of size <= k for the graph given by ``adj`` (mutated and restored)."""
    v = max(adj, key=lambda x: (len(adj[x]), -x), default=None)
    if v is None or not adj[v]:
        return set()
    if k <= 0:
        return None
    deg = len(adj[v])
    # edges left > k * maxdeg cannot be covered by k vertices
    if sum(len(s) for s in adj.values()) // 2 > k * deg:
        return None

    def remove(vs: Iterable[int]) -> list[tuple[int, set[int]]]:
        removed = []
        for x in vs:
            nbrs = adj.pop(x)
            for y in nbrs:
                adj[y].discard(x)
            removed.append((x, nbrs))
        return removed

    def restore(removed: list[tuple[int, set[int]]]) -> None:
        for x, nbrs in reversed(removed):
            adj[x] = nbrs
            for y in nbrs:
                adj[y].add(x)

    removed = remove([v])
    sub = _cover_within(adj, k - 1)
    restore(removed)
    if sub is not None:
        return sub | {v}
    nbrs = sorted(adj[v])
    if len(nbrs) > k:
        return None
    removed = remove(nbrs)
    sub = _cover_within(adj, k - len(nbrs))
    restore(removed)
    if sub is not None:
        return sub | set(nbrs)
    return None


def vertex_cover(g: Graph, mode: str = "exact") -> VertexCover:
    """Vertex cover of ``g``.

    ``exact`` branches on a maximum-degree vertex (take it, or take all its
    neighbours) with iterative deepening from the matching lower bound.
    ``approx2`` takes both endpoints of a maximal matching.
    """
    matching = _maximal_matching(g)
    if mode == "approx2":
        return VertexCover(frozenset(v for e in matching for v in e))
    if mode != "exact":
        raise ValueError(f"unknown vertex cover mode {mode!r}")
    adj = {v: set(g.neighbors(v)) for v in g.vertices if g.degree(v)}
    k = len(matching)
    while True:
        cover = _cover_within(adj, k)
        if cover is not None:
            return VertexCover(frozenset(cover))
        k += 1


# ---------------------------------------------------------------------------
# Neighborhood diversity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NdPartition:
    parts: tuple[tuple[int, ...], ...]
    kinds: tuple[str, ...]  # "clique" or "independent"; singletons are "independent"

    @property
    def nd(self) -> int:
        return len(self.parts)

    def part_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts) for v in part}


def are_twins(g: Graph, a: int, b: int) -> bool:
    return g.neighbors(a) - {b} == g.neighbors(b) - {a}


def nd_partition(g: Graph) -> NdPartition:
    """Minimum twin partition.

    The twin relation is an equivalence, and a vertex cannot have both a
    true (adjacent) twin and a false (non-adjacent) twin, so the classes are
    exactly the groups of equal open or equal closed neighbourhoods.
    """
    by_open: dict[frozenset[int], list[int]] = {}
    by_closed: dict[frozenset[int], list[int]] = {}
    for v in g.vertices:
        by_open.setdefault(g.neighbors(v), []).append(v)
        by_closed.setdefault(g.neighbors(v) | {v}, []).append(v)
    assigned: dict[int, int] = {}
    parts: list[tuple[int, ...]] = []
    kinds: list[str] = []
    for v in g.vertices:
        if v in assigned:
            continue
        false_twins = by_open[g.neighbors(v)]
        true_twins = by_closed[g.neighbors(v) | {v}]
        if len(true_twins) > 1:
            part, kind = true_twins, "clique"
        else:
            part, kind = false_twins, "independent"
        for x in part:
            assigned[x] = len(parts)
        parts.append(tuple(part))
        kinds.append(kind)
    return NdPartition(tuple(parts), tuple(kinds))


# ---------------------------------------------------------------------------
# Degree-one pruning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Removal:
    vertex: int
    anchor: int | None  # the unique neighbour at removal time; None if isolated


@dataclass(frozen=True)
class PruneResult:
    graph: Graph
    old_of: tuple[int, ...]  # old_of[new id] = id in the input graph
    log: tuple[Removal, ...] = field(default=())


def degree_one_prune(g: Graph) -> PruneResult:
    """Repeatedly delete vertices of degree at most one.

    What remains is the 2-core, which does not depend on the deletion order.
    Vertices left isolated by a deletion (and isolated input vertices) are
    deleted too with ``anchor=None``, so a tree prunes to the empty graph.
    """
    deg = [g.degree(v) for v in g.vertices]
    alive = [True] * g.n
    queue = deque(v for v in g.vertices if deg[v] <= 1)
    log: list[Removal] = []
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        anchor = None
        for w in g.neighbors(v):
            if alive[w]:
                anchor = w
                deg[w] -= 1
                if deg[w] == 1 or deg[w] == 0:
                    queue.append(w)
        log.append(Removal(v, anchor))
    kept = [v for v in g.vertices if alive[v]]
    sub, old_of = g.induced(kept)
    return PruneResult(sub, tuple(old_of), tuple(log))


def iter_edges_of_path(path: list[int]) -> Iterator[Edge]:
    for a, b in zip(path, path[1:]):
        yield edge_key(a, b)
