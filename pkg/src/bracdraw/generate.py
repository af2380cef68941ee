"""Seeded random instances with a prescribed structural parameter."""

from __future__ import annotations

import random

from .drawing import BendBudget
from .graph import Graph, edge_key
from .io import Instance

BOUNDED_FEN = "bounded-fen"
BOUNDED_VC = "bounded-vc"


class GenerationError(ValueError):
    pass


def _random_tree(n: int, rng: random.Random) -> set[tuple[int, int]]:
    return {edge_key(v, rng.randrange(v)) for v in range(1, n)}


def _relabel(n: int, edges, rng: random.Random) -> list[tuple[int, int]]:
    perm = list(range(n))
    rng.shuffle(perm)
    return sorted(edge_key(perm[u], perm[v]) for u, v in edges)


def generate_instance(kind: str, param: int, n: int, b: int, seed: int, beta: int = 3) -> Instance:
    """bounded-fen: random tree plus exactly ``param`` extra edges, so the
    feedback edge number is ``param``.  bounded-vc: a cover of ``param``
    vertices, every other vertex joined to a random cover subset of size at
    least 2 (plus random edges inside the cover), so the vertex cover number
    is at most ``param``."""
    if n < 0 or param < 0 or b < 0:
        raise GenerationError("n, param and b must be non-negative")
    if beta not in (0, 1, 2, 3):
        raise GenerationError(f"beta {beta} is outside 0..3")
    rng = random.Random(seed)
    if kind in (BOUNDED_FEN, "fen"):
        if n == 0:
            if param:
                raise GenerationError("the empty graph has no room for extra edges")
            edges: set = set()
        else:
            room = n * (n - 1) // 2 - (n - 1)
            if param > room:
                raise GenerationError(f"{param} extra edges exceed the {room} non-tree pairs on {n} vertices")
            edges = _random_tree(n, rng)
            while len(edges) < n - 1 + param:
                u, v = rng.randrange(n), rng.randrange(n)
                if u != v:
                    edges.add(edge_key(u, v))
    elif kind in (BOUNDED_VC, "vc"):
        if param > n:
            raise GenerationError(f"cover size {param} exceeds n = {n}")
        if param < 2 and n > param:
            raise GenerationError("non-cover vertices need at least 2 cover neighbours, so param must be >= 2")
        cover = list(range(param))
        edges = {edge_key(a, c) for i, a in enumerate(cover) for c in cover[i + 1:] if rng.random() < 0.5}
        for w in range(param, n):
            size = rng.randint(2, param)
            edges.update(edge_key(w, c) for c in rng.sample(cover, size))
    else:
        raise GenerationError(f"unknown generator kind {kind!r}")
    es = _relabel(n, edges, rng)
    g = Graph(n, es)
    return Instance(g, BendBudget(b, {e: beta for e in g.edges}))
