"""Static log-log scatter plots with a fitted regression line."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .families import RegressionFit


def loglog_svg(path: str | Path, orders, values, fit: RegressionFit, title: str, ylabel: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "chimera-qsearch"
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ax.loglog(orders, values, "o", label=ylabel)
    xs = np.geomspace(min(orders), max(orders), 50)
    ax.loglog(xs, np.exp(fit.intercept) * xs**fit.slope, "--", label=f"slope {fit.slope:.3f}")
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
