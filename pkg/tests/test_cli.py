import subprocess
import sys
from pathlib import Path

import pytest

from bracdraw.cli import main
from bracdraw.drawing import validate
from bracdraw.io import parse_drawing, parse_instance

FIX = Path(__file__).parent / "fixtures"


def run(*args) -> int:
    """Exit code of the CLI, whether returned or raised by argparse."""
    try:
        return main([str(a) for a in args])
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize(
    "args,code",
    [
        (("validate", FIX / "k5.brac", FIX / "k5_valid.draw"), 0),
        (("validate", FIX / "k5.brac", FIX / "k5_invalid.draw"), 1),
        (("validate", FIX / "selfloop.brac", FIX / "k5_valid.draw"), 3),
        (("validate", FIX / "k5.brac", FIX / "missing.draw"), 3),
        (("kernel", "vc", FIX / "k33.brac"), 0),
        (("kernel", "vc", FIX / "k38.brac"), 1),
        (("kernel", "vc", FIX / "k38.brac", "--strict-theorem", "--cover", "approx2"), 1),
        (("kernel", "nd", FIX / "k33.brac"), 0),
        (("kernel", "nd", FIX / "k6.brac"), 1),
        (("solve", FIX / "k5.brac", "--restarts", "16", "--iters", "500"), 0),
        (("solve", FIX / "k6.brac", "--restarts", "2", "--iters", "100"), 2),
        (("solve", FIX / "k5.brac", "--mode", "grid"), 1),
        (("solve", FIX / "k5.brac", "--mode", "bogus"), 3),
        (("kernel", "vc", FIX / "k33.brac", "--strict-lemma", "--strict-theorem"), 3),
        (("gen", "fen", "--param", "9", "--n", "3", "--b", "0", "--seed", "1"), 3),
        (("gen", "vc", "--param", "3", "--n", "9", "--b", "0"), 3),
        (("frobnicate",), 3),
    ],
)
def test_exit_codes(args, code, capsys):
    assert run(*args) == code


def test_validate_output(capsys):
    run("validate", FIX / "k5.brac", FIX / "k5_invalid.draw")
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "invalid" and out[-1].startswith("non-right-crossing")


def test_solve_writes_valid_drawing(tmp_path, capsys):
    out = tmp_path / "d.draw"
    assert run("solve", FIX / "k33.brac", "--restarts", "16", "--iters", "500", "-o", out) == 0
    inst = parse_instance((FIX / "k33.brac").read_text())
    assert validate(inst.graph, parse_drawing(out.read_text(), inst), inst.budget).valid


def test_fen_pipeline(tmp_path, capsys):
    g, k, kd, full, svg = (tmp_path / x for x in ("g.brac", "k.brac", "k.draw", "full.draw", "full.svg"))
    assert run("gen", "fen", "--param", "2", "--n", "200", "--b", "1", "--seed", "5", "-o", g) == 0
    assert run("kernel", "fen", g, "-o", k, "--report") == 0
    tsv = tmp_path / "k.brac.report.tsv"
    png = tmp_path / "k.brac.report.png"
    assert tsv.exists() and png.read_bytes()[:4] == b"\x89PNG"
    assert tsv.read_text().splitlines()[1] == "index\tlength\tthreshold\tclass"
    assert run("solve", k, "--restarts", "8", "--iters", "300", "-o", kd) == 0
    assert run("lift", "fen", k, kd, "-o", full) == 0
    assert run("validate", g, full) == 0
    assert run("render", g, full, "-o", svg) == 0
    assert svg.read_text().startswith("<svg")
    assert run("lift", "vc", k, kd) == 3  # wrong kernel kind


def test_vc_pipeline(tmp_path, capsys):
    g, k, kd, full = (tmp_path / x for x in ("g.brac", "k.brac", "k.draw", "full.draw"))
    lines = ["brac 1", "n 42", "b 0"] + [f"e {c} {w} 0" for c in (0, 1) for w in range(2, 42)]
    g.write_text("\n".join(lines) + "\n")
    assert run("kernel", "vc", g, "-o", k) == 0
    assert parse_instance(k.read_text()).graph.n == 15
    assert run("solve", k, "--mode", "planar", "-o", kd) == 0
    assert run("lift", "vc", k, kd, "-o", full) == 0
    assert run("validate", g, full) == 0


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "bracdraw", "validate", str(FIX / "k5.brac"), str(FIX / "k5_valid.draw")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and r.stdout.startswith("valid")
