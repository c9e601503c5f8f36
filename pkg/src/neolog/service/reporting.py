"""Report rendering: aligned text tables, delimited files and figures.

The stage report is written as CSV next to a PNG bar chart of survivors
per stage (with precision/recall curves when a gold set was supplied).
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..filters import StageReport
from ..metrics import render_stage_table

STAGE_CSV_HEADER = ["stage_label", "remaining", "gold_matches", "precision", "recall", "f1"]


def stage_reports_csv(reports: Sequence[StageReport]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(STAGE_CSV_HEADER)
    for r in reports:
        writer.writerow([
            r.stage_label,
            r.remaining,
            "" if r.gold_matches is None else r.gold_matches,
            "" if r.precision is None else f"{r.precision:.6f}",
            "" if r.recall is None else f"{r.recall:.6f}",
            "" if r.f1 is None else f"{r.f1:.6f}",
        ])
    return buffer.getvalue().encode("utf-8")


def stage_reports_figure(reports: Sequence[StageReport], path: str | Path) -> Path:
    """Survivor counts per stage as a horizontal bar chart; precision and
    recall overlaid on a second axis when available. Writes a PNG.
    """
    path = Path(path)
    labels = [r.stage_label for r in reports]
    remaining = [r.remaining for r in reports]

    fig, ax = plt.subplots(figsize=(9, 0.45 * len(reports) + 1.8))
    positions = range(len(reports))
    ax.barh(list(positions), remaining, color="#4878a8")
    ax.set_yticks(list(positions))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("surviving candidate groups")
    if max(remaining, default=0) > 0:
        ax.set_xscale("symlog")
    for pos, value in zip(positions, remaining):
        ax.text(value, pos, f" {value}", va="center", fontsize=8)

    if any(r.precision is not None for r in reports):
        ax2 = ax.twiny()
        precision = [r.precision for r in reports]
        recall = [r.recall for r in reports]
        ax2.plot(precision, list(positions), "o-", color="#b0413e", label="precision")
        ax2.plot(recall, list(positions), "s--", color="#5a9367", label="recall")
        ax2.set_xlim(0, 1.05)
        ax2.set_xlabel("precision / recall")
        ax2.legend(loc="lower right", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_stage_report_files(reports: Sequence[StageReport], out_dir: str | Path) -> List[Path]:
    """Write stages.csv and stages.png into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "stages.csv"
    csv_path.write_bytes(stage_reports_csv(reports))
    png_path = stage_reports_figure(reports, out_dir / "stages.png")
    return [csv_path, png_path]


def stage_table_text(reports: Sequence[StageReport]) -> str:
    return render_stage_table(reports)
