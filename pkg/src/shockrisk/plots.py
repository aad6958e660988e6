"""Figure rendering for the CLI report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import ruin

__all__ = ["render_survival_figure", "render_paths_figure"]


def render_survival_figure(curve, ana, path) -> None:
    """Two panels: the estimated survival curve and its density estimate."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(curve.u, curve.delta, lw=1.2)
    ax1.axhline(ana.delta0, color="gray", ls="--", lw=0.8, label=r"$\delta(0)$")
    ax1.set_xlabel("initial capital u")
    ax1.set_ylabel(r"survival probability $\delta(u)$")
    ax1.set_ylim(0, 1.02)
    ax1.legend(loc="lower right")
    if curve.density is not None:
        ax2.plot(curve.u[1:], curve.density[1:], lw=1.0)
    ax2.set_xlabel("u")
    ax2.set_ylabel("density of the maximal loss")
    fig.suptitle(f"maximal-loss estimate, {curve.meta.get('samples', '?')} samples")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_paths_figure(batch, model, path) -> None:
    """Histogram of the conditional deficit at ruin with its closed-form
    density overlaid."""
    deficits = batch.deficit[batch.ruined]
    fig, ax = plt.subplots(figsize=(6, 4))
    if deficits.size:
        ax.hist(deficits, bins=80, density=True, alpha=0.55, label="simulated deficit")
        grid = np.linspace(0, np.quantile(deficits, 0.999), 400)
        ax.plot(grid, ruin.deficit_pdf(model, grid), "k-", lw=1.2, label="ladder-height density")
        ax.legend()
    else:
        ax.text(0.5, 0.5, "no ruined paths", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("deficit at ruin")
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
