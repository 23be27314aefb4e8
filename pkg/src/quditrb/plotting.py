"""Deterministic decay plots rendered to SVG.

The Agg backend is forced before pyplot loads so rendering works headless, and
the SVG writer is configured (fixed hash salt, no Date metadata) so the same
dataset always produces the same bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_decay_plot(
    path: str | Path,
    lengths,
    means,
    fit=None,
    prediction=None,
    title: str = "Clifford decay",
) -> Path:
    """Plot per-length mean survival with optional fitted and predicted curves.

    fit and prediction are any objects exposing .curve(lengths), such as
    DecayFit and DecayPrediction.
    """
    lengths = np.asarray(lengths, dtype=float)
    means = np.asarray(means, dtype=float)
    with plt.rc_context({"svg.hashsalt": "quditrb", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        try:
            ax.plot(lengths, means, "o", color="#1f77b4", label="mean survival")
            grid = np.linspace(lengths.min(), lengths.max(), 200)
            if fit is not None:
                ax.plot(grid, fit.curve(grid), "-", color="#d62728", label="fit")
            if prediction is not None:
                ax.plot(grid, prediction.curve(grid), "--", color="#2ca02c", label="prediction")
            ax.set_xlabel("sequence length")
            ax.set_ylabel("survival probability")
            ax.set_title(title)
            ax.legend()
            fig.tight_layout()
            out = Path(path)
            fig.savefig(out, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return out
