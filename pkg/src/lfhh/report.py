"""Figures for difftest campaigns."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import CLASSIFICATIONS, CampaignReport  # noqa: E402

_COLORS = {
    "AgreeYes": "#4c72b0",
    "AgreeNo": "#8da0cb",
    "UnsoundMismatch": "#c44e52",
    "InconclusiveTimeout": "#dd8452",
    "InconclusiveNonPattern": "#937860",
    "HarnessError": "#000000",
}


def plot_campaign(report: CampaignReport, path: str | Path) -> Path:
    """Stacked bars of case classifications per term size, written to ``path``."""
    path = Path(path)
    sizes = sorted(report.totals_by_size)
    fig, ax = plt.subplots(figsize=(7, 4))
    bottom = [0] * len(sizes)
    for c in CLASSIFICATIONS:
        counts = [report.totals_by_size[s].get(c, 0) for s in sizes]
        if not any(counts):
            continue
        ax.bar([str(s) for s in sizes], counts, bottom=bottom, label=c, color=_COLORS[c])
        bottom = [b + n for b, n in zip(bottom, counts)]
    ax.set_xlabel("term size")
    ax.set_ylabel("judgments")
    ax.set_title(f"kernel vs. encoded prover (max size {report.config.max_term_size}, "
                 f"depth x{report.config.depth_mult})")
    if sizes:
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
