"""Command-line entry point.

Exit codes: 0 yes/valid, 1 no/invalid/reject, 2 unknown, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io as bio
from .drawing import DrawingStructureError, validate
from .generate import GenerationError, generate_instance
from .geometry import DEFAULT_TOL
from .graph import nd_partition, vertex_cover
from .kernel_fen import LITERAL, PROOF, KernelError, LiftError, extract_kernel, lift_drawing
from .kernel_vc import KERNEL, LEMMA, THEOREM, nd_to_vertex_cover, vc_kernelize, vc_lift_drawing
from .routing import RoutingError
from .search import MODES, NUMERIC
from .solver import NO, YES, SolveOptions, solve
from .svg import render_svg

EXIT_OK = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str) -> bio.Instance:
    return bio.parse_instance(_read(path))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    inst = _load_instance(args.instance)
    d = bio.parse_drawing(_read(args.drawing), inst)
    report = validate(inst.graph, d, inst.budget, args.tol)
    print(report.verdict)
    print(f"bends\t{report.total_bends}\ncrossings\t{report.crossing_count}")
    for v in report.violations:
        print(f"{v.kind}\t{v.location}\t{v.details}")
    return EXIT_OK if report.valid else EXIT_NO


def cmd_kernel_fen(args) -> int:
    inst = _load_instance(args.instance)
    res = extract_kernel(inst.graph, inst.budget, args.rule)
    _emit(bio.serialize_fen_kernel(res), args.output)
    print(
        f"fen {res.fen}: kernel {res.kernel.n} vertices, {res.kernel.m} edges; {len(res.long_paths)} long paths",
        file=sys.stderr,
    )
    if args.report:
        from .report import write_fen_report

        base = (args.output or Path(args.instance).stem + ".kernel") + ".report"
        tsv, png = write_fen_report(res, base)
        print(f"report: {tsv} {png}", file=sys.stderr)
    return EXIT_OK


def cmd_kernel_vc(args) -> int:
    inst = _load_instance(args.instance)
    cover = vertex_cover(inst.graph, args.cover)
    strictness = THEOREM if args.strict_theorem else LEMMA
    res = vc_kernelize(inst.graph, inst.budget, cover, strictness)
    _emit(bio.serialize_vc_kernel(res), args.output)
    if res.verdict == KERNEL:
        print(f"cover size {res.k}: kernel {res.kernel.n} vertices, {res.kernel.m} edges", file=sys.stderr)
        return EXIT_OK
    print(f"reject: {res.reason}", file=sys.stderr)
    return EXIT_NO


def cmd_kernel_nd(args) -> int:
    inst = _load_instance(args.instance)
    ndp = nd_partition(inst.graph)
    res = nd_to_vertex_cover(inst.graph, ndp, inst.budget)
    print(f"nd\t{ndp.nd}")
    for part, kind in zip(ndp.parts, ndp.kinds):
        print(f"part\t{kind}\t{' '.join(map(str, part))}")
    if res.rejected:
        print(f"reject\t{res.reason}")
        return EXIT_NO
    print(f"cover\t{' '.join(map(str, sorted(res.cover.vertices)))}")
    print(f"excess\t{res.excess}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    opts = SolveOptions(
        mode=args.mode,
        seed=args.seed,
        restarts=args.restarts,
        iters=args.iters,
        tol=args.tol,
        max_allocations=args.max_allocations,
    )
    out = solve(inst.graph, inst.budget, opts)
    print(out.verdict)
    for note in out.notes:
        print(f"note\t{note}")
    for k, v in sorted(out.stats.items()):
        print(f"{k}\t{v}")
    if out.verdict == YES:
        if args.output:
            Path(args.output).write_text(bio.serialize_drawing(out.drawing))
        else:
            sys.stdout.write(bio.serialize_drawing(out.drawing))
        return EXIT_OK
    return EXIT_NO if out.verdict == NO else EXIT_UNKNOWN


def cmd_lift(args) -> int:
    res = bio.parse_kernel_file(_read(args.kernel_result))
    kernel_inst = bio.Instance(res.kernel, res.budget)
    d_kernel = bio.parse_drawing(_read(args.kernel_drawing), kernel_inst)
    kind = "fen" if hasattr(res, "long_paths") else "vc"
    if kind != args.kind:
        raise UsageError(f"{args.kernel_result} is a {kind} kernel, not {args.kind}")
    try:
        d = lift_drawing(res, d_kernel, args.tol) if kind == "fen" else vc_lift_drawing(res, d_kernel, args.tol)
    except (LiftError, RoutingError) as exc:
        print(f"lift failed: {exc}", file=sys.stderr)
        return EXIT_NO
    _emit(bio.serialize_drawing(d), args.output)
    return EXIT_OK


def cmd_render(args) -> int:
    inst = _load_instance(args.instance)
    d = bio.parse_drawing(_read(args.drawing), inst)
    _emit(render_svg(inst.graph, d, inst.budget, args.tol), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = {"fen": "bounded-fen", "vc": "bounded-vc"}[args.kind]
    try:
        inst = generate_instance(kind, args.param, args.n, args.b, args.seed, args.beta)
    except GenerationError as exc:
        raise UsageError(str(exc)) from None
    _emit(bio.serialize_instance(inst), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bracdraw", description="Bend-restricted right-angle-crossing drawings: validate, kernelize, solve.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tol_arg(q):
        q.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance (default 1e-9)")

    q = sub.add_parser("validate", help="check a drawing against an instance")
    q.add_argument("instance")
    q.add_argument("drawing")
    tol_arg(q)
    q.set_defaults(func=cmd_validate)

    q = sub.add_parser("kernel", help="kernelize an instance")
    ks = q.add_subparsers(dest="kernel_kind", required=True, parser_class=_Parser)
    k = ks.add_parser("fen", help="feedback-edge kernel")
    k.add_argument("instance")
    k.add_argument("-o", "--output")
    k.add_argument("--report", action="store_true", help="also write <out>.report.tsv and .png")
    k.add_argument("--rule", choices=[PROOF, LITERAL], default=PROOF, help="short/long split rule")
    k.set_defaults(func=cmd_kernel_fen)
    k = ks.add_parser("vc", help="vertex-cover kernel")
    k.add_argument("instance")
    k.add_argument("--cover", choices=["exact", "approx2"], default="exact")
    strict = k.add_mutually_exclusive_group()
    strict.add_argument("--strict-lemma", action="store_true", help="reject threshold max(2,7-i)+b (default)")
    strict.add_argument("--strict-theorem", action="store_true", help="reject threshold max(3,7-i)+b")
    k.add_argument("-o", "--output")
    k.set_defaults(func=cmd_kernel_vc)
    k = ks.add_parser("nd", help="vertex cover from the twin partition")
    k.add_argument("instance")
    k.set_defaults(func=cmd_kernel_nd)

    q = sub.add_parser("solve", help="search for a drawing")
    q.add_argument("instance")
    q.add_argument("--mode", choices=MODES, default=NUMERIC)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--restarts", type=int, default=64)
    q.add_argument("--iters", type=int, default=2000)
    q.add_argument("--max-allocations", type=int, default=256)
    q.add_argument("-o", "--output", help="write the drawing here")
    tol_arg(q)
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("lift", help="extend a kernel drawing to the original instance")
    q.add_argument("kind", choices=["fen", "vc"])
    q.add_argument("kernel_result")
    q.add_argument("kernel_drawing")
    q.add_argument("-o", "--output")
    tol_arg(q)
    q.set_defaults(func=cmd_lift)

    q = sub.add_parser("render", help="render a drawing to SVG")
    q.add_argument("instance")
    q.add_argument("drawing")
    q.add_argument("-o", "--output")
    tol_arg(q)
    q.set_defaults(func=cmd_render)

    q = sub.add_parser("gen", help="generate a random instance")
    q.add_argument("kind", choices=["fen", "vc"])
    q.add_argument("--param", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--beta", type=int, default=3, choices=[0, 1, 2, 3])
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except bio.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DrawingStructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KernelError as exc:
        print(f"kernel error: {exc}", file=sys.stderr)
        return EXIT_NO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
