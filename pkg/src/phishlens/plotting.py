"""Matplotlib figures for the report command (Agg backend, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .models import CLASSIFIERS, EvaluationReport  # noqa: E402
from .selection import CorrelationMatrix  # noqa: E402

# no Software/date metadata, so reruns produce byte-identical files
_PNG_METADATA = {"Software": None}

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    # explicit format: the CLI stages output under a non-.png temp name
    fig.savefig(path, format="png", dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def plot_accuracy_grid(report: EvaluationReport, path) -> None:
    """Grouped bars: accuracy per classifier for each feature count."""
    cols = report.columns
    x = np.arange(len(cols))
    width = 0.8 / len(CLASSIFIERS)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 3.6))
        for i, name in enumerate(CLASSIFIERS):
            acc = [report.accuracy(name, n) for n in cols]
            bars = ax.bar(x + (i - 1) * width, acc, width, label=name)
            ax.bar_label(bars, fmt="%.3f", fontsize=6, padding=1)
        ax.set_xticks(x, [str(n) for n in cols])
        ax.set_xlabel("Number of features")
        ax.set_ylabel("Classification rate")
        ax.set_ylim(0, 1.08)
        ax.set_title(f"Test accuracy ({report.protocol}, seed {report.seed})")
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_correlation(cm: CorrelationMatrix, path) -> None:
    n = len(cm.features)
    size = max(4.0, 0.45 * n + 2.0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(size + 1.0, size))
        im = ax.imshow(cm.matrix, vmin=-1, vmax=1, cmap="RdBu_r")
        ax.set_xticks(range(n), cm.features, rotation=60, ha="right")
        ax.set_yticks(range(n), cm.features)
        if n <= 25:
            for i in range(n):
                for j in range(n):
                    v = cm.matrix[i, j]
                    ax.text(j, i, f"{v:.1f}", ha="center", va="center", fontsize=6,
                            color="white" if abs(v) > 0.6 else "black")
        ax.spines[:].set_visible(False)
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        ax.set_title("Pearson correlation among selected features")
        fig.tight_layout()
        _save(fig, path)
