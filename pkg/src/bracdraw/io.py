"""Text formats: instances, drawings and kernel files (an instance plus a
``# recipe`` comment block, so kernel files still parse as instances)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .drawing import BendBudget, Drawing
from .geometry import Point
from .graph import Graph, GraphError, Removal, edge_key

INSTANCE_HEADER = "brac 1"
DRAWING_HEADER = "bracdraw 1"


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class Instance:
    graph: Graph
    budget: BendBudget


def _content_lines(text: str):
    """(line number, tokens) for every line with content outside comments."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def _int(tok: str, no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(no, f"{what} must be an integer, got {tok!r}") from None


def _float(tok: str, no: int) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(no, f"coordinate must be a number, got {tok!r}") from None
    if not math.isfinite(x):
        raise ParseError(no, f"coordinate {tok!r} is not finite")
    return x


def parse_instance(text: str) -> Instance:
    lines = list(_content_lines(text))
    if not lines or lines[0][1] != INSTANCE_HEADER.split():
        raise ParseError(lines[0][0] if lines else 1, f"expected header '{INSTANCE_HEADER}'")
    n = b = None
    edges: dict[tuple[int, int], int] = {}
    for no, toks in lines[1:]:
        key = toks[0]
        if key == "n":
            if n is not None:
                raise ParseError(no, "duplicate 'n' line")
            if len(toks) != 2:
                raise ParseError(no, "expected 'n <count>'")
            n = _int(toks[1], no, "vertex count")
            if n < 0:
                raise ParseError(no, "vertex count must be non-negative")
        elif key == "b":
            if b is not None:
                raise ParseError(no, "duplicate 'b' line")
            if len(toks) != 2:
                raise ParseError(no, "expected 'b <total>'")
            b = _int(toks[1], no, "bend budget")
            if b < 0:
                raise ParseError(no, "bend budget must be non-negative")
        elif key == "e":
            if n is None:
                raise ParseError(no, "edge before 'n' line")
            if len(toks) != 4:
                raise ParseError(no, "expected 'e <u> <v> <beta>'")
            u = _int(toks[1], no, "vertex")
            v = _int(toks[2], no, "vertex")
            beta = _int(toks[3], no, "beta")
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(no, f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise ParseError(no, f"self-loop at vertex {u}")
            if beta not in (0, 1, 2, 3):
                raise ParseError(no, f"beta {beta} is outside 0..3")
            k = edge_key(u, v)
            if k in edges:
                raise ParseError(no, f"duplicate edge {k}")
            edges[k] = beta
        else:
            raise ParseError(no, f"unknown record {key!r}")
    last = lines[-1][0]
    if n is None:
        raise ParseError(last, "missing 'n' line")
    if b is None:
        raise ParseError(last, "missing 'b' line")
    try:
        g = Graph(n, edges)
    except GraphError as exc:  # pragma: no cover - caught above
        raise ParseError(last, str(exc)) from None
    return Instance(g, BendBudget(b, edges))


def serialize_instance(inst: Instance) -> str:
    out = [INSTANCE_HEADER, f"n {inst.graph.n}", f"b {inst.budget.total}"]
    out += [f"e {u} {v} {inst.budget.cap((u, v))}" for u, v in inst.graph.edges]
    return "\n".join(out) + "\n"


def format_coord(x: float, digits: int | None = None) -> str:
    """Shortest round-trip repr by default; ``digits`` significant digits otherwise."""
    if digits is None:
        s = repr(float(x))
    else:
        s = f"{x:.{digits}g}"
    return "0" if s in ("0.0", "-0.0", "-0") else s


def parse_drawing(text: str, instance: Instance | None = None) -> Drawing:
    lines = list(_content_lines(text))
    if not lines or lines[0][1] != DRAWING_HEADER.split():
        raise ParseError(lines[0][0] if lines else 1, f"expected header '{DRAWING_HEADER}'")
    g = instance.graph if instance else None
    pos: dict[int, Point] = {}
    polys: dict[tuple[int, int], list[Point]] = {}
    for no, toks in lines[1:]:
        if toks[0] == "v":
            if len(toks) != 4:
                raise ParseError(no, "expected 'v <id> <x> <y>'")
            v = _int(toks[1], no, "vertex id")
            if g is not None and not (0 <= v < g.n):
                raise ParseError(no, f"unknown vertex {v}")
            if v in pos:
                raise ParseError(no, f"duplicate vertex {v}")
            pos[v] = Point(_float(toks[2], no), _float(toks[3], no))
        elif toks[0] == "p":
            if len(toks) < 3 or (len(toks) - 3) % 2:
                raise ParseError(no, "expected 'p <u> <v>' followed by coordinate pairs")
            u = _int(toks[1], no, "vertex id")
            v = _int(toks[2], no, "vertex id")
            k = edge_key(u, v)
            if g is not None and not (0 <= u < g.n and 0 <= v < g.n and g.has_edge(u, v)):
                raise ParseError(no, f"edge ({u}, {v}) is not in the instance")
            if k in polys:
                raise ParseError(no, f"duplicate edge {k}")
            coords = [_float(t, no) for t in toks[3:]]
            bends = [Point(coords[i], coords[i + 1]) for i in range(0, len(coords), 2)]
            polys[k] = bends if u < v else list(reversed(bends))
        else:
            raise ParseError(no, f"unknown record {toks[0]!r}")
    if g is not None:
        last = lines[-1][0]
        missing = [v for v in g.vertices if v not in pos]
        if missing:
            raise ParseError(last, f"no position for vertices {missing[:10]}")
        missing_e = [e for e in g.edges if e not in polys]
        if missing_e:
            raise ParseError(last, f"no polyline for edges {missing_e[:10]}")
    return Drawing(pos, polys)


def serialize_drawing(d: Drawing, digits: int | None = None) -> str:
    out = [DRAWING_HEADER]
    for v in sorted(d.vertex_pos):
        p = d.vertex_pos[v]
        out.append(f"v {v} {format_coord(p.x, digits)} {format_coord(p.y, digits)}")
    for e in sorted(d.edge_polylines):
        parts = [f"p {e[0]} {e[1]}"]
        for p in d.edge_polylines[e]:
            parts.append(f"{format_coord(p.x, digits)} {format_coord(p.y, digits)}")
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# kernel files
# ---------------------------------------------------------------------------


def _recipe_original(g: Graph, budget: BendBudget) -> list[str]:
    out = [f"# orig n {g.n}", f"# orig b {budget.total}"]
    out += [f"# orig e {u} {v} {budget.cap((u, v))}" for u, v in g.edges]
    return out


def _recipe_common(old_of, log) -> list[str]:
    out = [f"# map {i} {o}" for i, o in enumerate(old_of)]
    out += [f"# prune {r.vertex} {-1 if r.anchor is None else r.anchor}" for r in log]
    return out


def serialize_fen_kernel(result) -> str:
    lines = [serialize_instance(Instance(result.kernel, result.budget)).rstrip("\n")]
    lines += ["# recipe fen 1", f"# rule {result.rule}", f"# fen {result.fen}"]
    lines += _recipe_original(result.original, result.original_budget)
    lines += _recipe_common(result.old_of, result.removal_log)
    lines += ["# long " + " ".join(map(str, p)) for p in result.long_paths]
    return "\n".join(lines) + "\n"


def serialize_vc_kernel(result) -> str:
    lines = [serialize_instance(Instance(result.kernel, result.budget)).rstrip("\n")]
    lines += ["# recipe vc 1", f"# verdict {result.verdict}", f"# k {result.k}", f"# strictness {result.strictness}"]
    if result.reason:
        lines.append(f"# reason {result.reason}")
    lines += _recipe_original(result.original, result.original_budget)
    lines += _recipe_common(result.old_of, result.removal_log)
    for (u, v), ms in sorted(result.trimmed.items()):
        lines.append(f"# trim {u} {v} " + " ".join(map(str, ms)))
    return "\n".join(lines) + "\n"


def parse_kernel_file(text: str):
    """Rebuild a FenKernelResult or VcKernelResult from a kernel file."""
    from .kernel_fen import FenKernelResult
    from .kernel_vc import VcKernelResult

    kernel = parse_instance(text)
    kind = None
    fields: dict[str, list] = {"map": [], "prune": [], "long": [], "trim": [], "orig e": []}
    scalars: dict[str, str] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s.startswith("#"):
            continue
        toks = s[1:].split()
        if not toks:
            continue
        head = toks[0]
        try:
            if head == "recipe":
                kind = toks[1]
            elif head == "orig":
                if toks[1] == "e":
                    fields["orig e"].append(tuple(int(t) for t in toks[2:5]))
                else:
                    scalars["orig " + toks[1]] = toks[2]
            elif head in ("map", "prune"):
                fields[head].append(tuple(int(t) for t in toks[1:3]))
            elif head in ("long", "trim"):
                fields[head].append(tuple(int(t) for t in toks[1:]))
            elif head in ("rule", "fen", "verdict", "k", "strictness"):
                scalars[head] = toks[1]
            elif head == "reason":
                scalars[head] = s[1:].strip()[len("reason"):].strip()
        except (IndexError, ValueError):
            raise ParseError(no, f"malformed recipe line {s!r}") from None
    if kind not in ("fen", "vc"):
        raise ParseError(1, "kernel file has no '# recipe fen|vc' block")
    try:
        n = int(scalars["orig n"])
        b = int(scalars["orig b"])
    except (KeyError, ValueError):
        raise ParseError(1, "recipe lacks the original instance") from None
    beta = {edge_key(u, v): c for u, v, c in fields["orig e"]}
    try:
        original = Graph(n, beta)
    except GraphError as exc:
        raise ParseError(1, f"recipe original graph: {exc}") from None
    obudget = BendBudget(b, beta)
    mapping = dict(fields["map"])
    old_of = tuple(mapping[i] for i in range(len(mapping)))
    if len(old_of) != kernel.graph.n and scalars.get("verdict") != "reject":
        raise ParseError(1, f"recipe maps {len(old_of)} vertices, kernel has {kernel.graph.n}")
    log = tuple(Removal(v, None if a < 0 else a) for v, a in fields["prune"])
    if kind == "fen":
        from .kernel_fen import fen_of

        return FenKernelResult(
            kernel.graph,
            kernel.budget,
            old_of,
            tuple(fields["long"]),
            log,
            original,
            obudget,
            fen_of(original),
            rule=scalars.get("rule", "proof"),
        )
    trimmed = {(t[0], t[1]): tuple(t[2:]) for t in fields["trim"]}
    return VcKernelResult(
        scalars.get("verdict", "kernel"),
        kernel.graph,
        kernel.budget,
        old_of,
        log,
        trimmed,
        original,
        obudget,
        int(scalars.get("k", 0)),
        scalars.get("strictness", "lemma"),
        scalars.get("reason", ""),
    )
