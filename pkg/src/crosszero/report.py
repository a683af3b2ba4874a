"""File reports for solver runs and generated puzzles.

A report directory receives delimited data (CSV) plus rendered figures
(PNG via the non-interactive matplotlib backend), so batch runs can be
audited without rerunning them.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .puzzle import Puzzle
from .solver import Workbench

STATUS_COLORS = {
    "open": "#888888",
    "awaiting-interaction": "#e0a030",
    "branched": "#b0b0d0",
    "solved": "#2a9d42",
    "no-rational-solution": "#3a6ea5",
    "contradictory": "#777799",
    "resource-limit": "#c23b3b",
}


def _depth(case_id: str) -> int:
    return case_id.count(".")


def write_solve_report(wb: Workbench, outdir: str | Path) -> list[Path]:
    """cases.csv, families.csv, and two figures summarising the tree."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = []
    for cid in sorted(wb.tree.nodes, key=lambda s: tuple(int(p) for p in s.split("."))):
        node = wb.tree.node(cid)
        terms = [eq.poly.term_count for eq in node.equations]
        rows.append(
            {
                "case": cid,
                "status": node.status,
                "depth": _depth(cid),
                "assumption": "" if node.assumption is None else f"{node.assumption[0]} {node.assumption[1]}",
                "equations": len(node.equations),
                "total_terms": sum(terms),
                "max_terms": max(terms, default=0),
                "bindings": len(node.bindings),
                "note": node.note,
            }
        )
    path = out / "cases.csv"
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    written.append(path)

    path = out / "families.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "case", "free_params", "bindings", "binding_terms", "inequalities"])
        for fam in wb.families:
            writer.writerow(
                [
                    fam.id,
                    fam.case_id,
                    " ".join(f"u{v}" for v in sorted(fam.free_params)),
                    len(fam.bindings),
                    sum(n.term_count + d.term_count for _, n, d in fam.bindings),
                    len(fam.inequalities),
                ]
            )
    written.append(path)

    by_depth: dict[int, dict[str, int]] = {}
    for row in rows:
        by_depth.setdefault(row["depth"], {}).setdefault(row["status"], 0)
        by_depth[row["depth"]][row["status"]] += 1
    fig, ax = plt.subplots(figsize=(8, 4.5))
    depths = sorted(by_depth)
    bottoms = {d: 0 for d in depths}
    for status, color in STATUS_COLORS.items():
        heights = [by_depth[d].get(status, 0) for d in depths]
        if any(heights):
            ax.bar(depths, heights, bottom=[bottoms[d] for d in depths], label=status, color=color)
            for d, h in zip(depths, heights):
                bottoms[d] += h
    ax.set_xlabel("tree depth")
    ax.set_ylabel("cases")
    ax.set_title("case tree by depth and status")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out / "tree.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for status, color in STATUS_COLORS.items():
        xs = [r["depth"] for r in rows if r["status"] == status]
        ys = [max(r["total_terms"], 1) for r in rows if r["status"] == status]
        if xs:
            ax.scatter(xs, ys, s=14, color=color, label=status)
    ax.set_yscale("log")
    ax.set_xlabel("tree depth")
    ax.set_ylabel("total terms (log)")
    ax.set_title("equation size per case")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out / "terms.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    written.append(path)

    return written


def write_puzzle_figure(puzzle: Puzzle, path: str | Path) -> Path:
    """Draw the interleaved puzzle grid to a PNG file."""
    n = puzzle.n
    size = 2 * n - 1
    fig, ax = plt.subplots(figsize=(1.1 * size, 1.1 * size))
    ax.set_xlim(0, size)
    ax.set_ylim(0, size)
    ax.invert_yaxis()
    ax.axis("off")
    for i in range(n):
        for j in range(n):
            x, y = 2 * j, 2 * i
            ax.add_patch(plt.Rectangle((x, y), 1, 1, fill=False, linewidth=1.0))
            ax.text(x + 0.5, y + 0.5, str(puzzle.cell((i, j))), ha="center", va="center", fontsize=9)
            if j < n - 1:
                ax.text(x + 1.5, y + 0.5, puzzle.grid.row_ops[i][j], ha="center", va="center", fontsize=11)
            if i < n - 1:
                ax.text(x + 0.5, y + 1.5, puzzle.grid.col_ops[i][j], ha="center", va="center", fontsize=11)
            if i < n - 1 and j < n - 1:
                ax.text(x + 1.5, y + 1.5, puzzle.grid.diag_ops[i][j], ha="center", va="center", fontsize=11, color="#777777")
    fig.tight_layout()
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out
