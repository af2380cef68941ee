"""Tabular and graphical summary of a feedback-edge kernel: the ascending
path lengths, the gap threshold at each step, and where the split fell."""

from __future__ import annotations

import csv
from pathlib import Path

from .kernel_fen import FenKernelResult


def fen_rows(result: FenKernelResult) -> list[dict]:
    if result.partition is None or result.split is None:
        return []
    pp, sp = result.partition, result.split
    ell = pp.ell
    p = (pp.p0, *pp.lengths)
    rows = [{"index": 0, "length": p[0], "threshold": "", "class": "feedback"}]
    for i in range(1, ell + 1):
        rows.append(
            {
                "index": i,
                "length": p[i],
                "threshold": 9 * ell * p[i - 1],
                "class": "short" if i <= sp.i0 else "long",
            }
        )
    return rows


def write_fen_report(result: FenKernelResult, base: str | Path) -> tuple[Path, Path]:
    """Write ``<base>.tsv`` and ``<base>.png``; return both paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    base = Path(base)
    tsv, png = base.parent / (base.name + ".tsv"), base.parent / (base.name + ".png")
    rows = fen_rows(result)
    with tsv.open("w", newline="") as fh:
        fh.write(f"# fen={result.fen} rule={result.rule} kernel_n={result.kernel.n} kernel_m={result.kernel.m}\n")
        w = csv.DictWriter(fh, fieldnames=["index", "length", "threshold", "class"], delimiter="\t", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=100)
    if rows:
        colours = {"feedback": "#7f7f7f", "short": "#1f77b4", "long": "#d62728"}
        ax.bar([r["index"] for r in rows], [r["length"] for r in rows], color=[colours[r["class"]] for r in rows])
        steps = [r for r in rows if r["threshold"] != ""]
        ax.step([r["index"] for r in steps], [r["threshold"] for r in steps], where="mid", color="black", lw=1, label="gap threshold")
        ax.axvline(result.split.i0 + 0.5, color="#2ca02c", ls="--", lw=1, label="split")
        ax.set_yscale("log")
        ax.legend(loc="upper left")
    else:
        ax.text(0.5, 0.5, "acyclic after pruning: empty kernel", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("path index (0 = feedback edges)")
    ax.set_ylabel("length")
    ax.set_title(f"fen = {result.fen}, kernel {result.kernel.n} vertices / {result.kernel.m} edges")
    fig.tight_layout()
    fig.savefig(png, metadata={"Software": None})
    plt.close(fig)
    return tsv, png
