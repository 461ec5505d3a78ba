"""Figure rendering for simulation reports and parameter sweeps.

Every CLI report path that writes a delimited file can also render a
matplotlib figure next to it (same basename, .png).  Rendering is
headless; the Agg backend is forced before pyplot is imported.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulator import SimulationReport, SweepTable

_DPI = 150


def figure_path(output_path: str | Path) -> Path:
    return Path(output_path).with_suffix(".png")


def render_report_figure(report: SimulationReport, path: str | Path) -> Path:
    """Bar chart of games ending at each prize level, with outcome detail."""
    path = Path(path)
    levels = [r.prize_level for r in report.rows]
    labels = [f"${lv:,}" if lv else "$0" for lv in levels]
    x = range(len(levels))

    fig, (top, bottom) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)
    top.bar(x, [r.ending for r in report.rows], color="#31688e")
    top.set_ylabel("games ending at prize")
    top.set_title(
        f"{report.n_games:,} games: avg ${report.avg_winnings:,.2f}, "
        f"std ${report.std_winnings:,.2f}, avg right {report.avg_right:.2f}"
    )

    width = 0.27
    bottom.bar([i - width for i in x], [r.right for r in report.rows], width,
               label="right", color="#35b779")
    bottom.bar(list(x), [r.wrong for r in report.rows], width,
               label="wrong", color="#d8576b")
    bottom.bar([i + width for i in x], [r.stop for r in report.rows], width,
               label="walked", color="#fca636")
    bottom.set_ylabel("questions at prize level")
    bottom.set_xticks(list(x))
    bottom.set_xticklabels(labels, rotation=60, ha="right", fontsize=8)
    bottom.legend(frameon=False)

    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_sweep_figure(table: SweepTable, path: str | Path) -> Path:
    """Line plot for one sweep: winnings with a std band, or accuracy."""
    path = Path(path)
    xs = [row[0] for row in table.rows]
    fig, ax = plt.subplots(figsize=(7, 5))

    if table.header == ("value", "accuracy"):
        ax.plot(xs, [row[1] for row in table.rows], marker="o", color="#31688e")
        ax.set_ylabel("QA accuracy")
        ax.set_ylim(0.0, 1.0)
    else:
        avg = [row[1] for row in table.rows]
        std = [row[2] for row in table.rows]
        ax.plot(xs, avg, marker="o", color="#31688e", label="avg winnings")
        ax.fill_between(
            xs,
            [a - s for a, s in zip(avg, std)],
            [a + s for a, s in zip(avg, std)],
            alpha=0.2,
            color="#31688e",
            label="± std dev",
        )
        ax.set_ylabel("winnings ($)")
        ax.legend(frameon=False)

    ax.set_xlabel(table.dimension)
    ax.set_title(f"sweep over {table.dimension}")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
