"""Report figures written next to the CSV output (non-interactive backend)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_search_history(history, path: Path, title: str = "") -> Path:
    """Best fitness and mutation scale per generation."""
    gen = np.array([h[0] for h in history])
    best = np.array([h[1] for h in history])
    scale = np.array([h[2] for h in history])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(gen, best, color="tab:blue")
    ax1.axhline(0.0, color="k", lw=0.8, ls="--")
    ax1.set_ylabel("best fitness (bits)")
    if title:
        ax1.set_title(title)
    ax2.semilogy(gen, scale, color="tab:orange")
    ax2.set_ylabel("mutation scale s")
    ax2.set_xlabel("generation")
    return _finish(fig, Path(path))


def plot_sweep(cells: list[dict], path: Path, param: str, title: str = "") -> Path:
    """Heat map of minimum slack over (dimension, parameter)."""
    dims = sorted({c["d"] for c in cells})
    vals = sorted({c[param] for c in cells}, key=lambda v: math.inf if v == "inf" else float(v))
    grid = np.full((len(dims), len(vals)), np.nan)
    for c in cells:
        grid[dims.index(c["d"]), vals.index(c[param])] = c["min_slack"]
    fig, ax = plt.subplots(figsize=(1.2 * len(vals) + 2.5, 0.6 * len(dims) + 2))
    lim = np.nanmax(np.abs(grid)) if np.isfinite(grid).any() else 1.0
    im = ax.imshow(grid, cmap="RdBu", vmin=-lim, vmax=lim, aspect="auto")
    ax.set_xticks(range(len(vals)), [str(v) for v in vals])
    ax.set_yticks(range(len(dims)), [str(d) for d in dims])
    ax.set_xlabel(param)
    ax.set_ylabel("d")
    for i in range(len(dims)):
        for j in range(len(vals)):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.3g}", ha="center", va="center", fontsize=8)
    fig.colorbar(im, ax=ax, label="min slack (bits)")
    if title:
        ax.set_title(title)
    return _finish(fig, Path(path))


def plot_slacks(rows: list[dict], path: Path, title: str = "") -> Path:
    """Bar chart of slack per evaluated relation; violations in red."""
    labels = [f"{r.get('scenario', '')}\n{r['relation']}".strip() for r in rows]
    slack = [r["slack"] if math.isfinite(r["slack"]) else np.nan for r in rows]
    colors = ["tab:red" if r["violated"] else "tab:green" for r in rows]
    fig, ax = plt.subplots(figsize=(max(4, 0.7 * len(rows) + 2), 4))
    ax.bar(range(len(rows)), slack, color=colors)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xticks(range(len(rows)), labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("slack (bits)")
    if title:
        ax.set_title(title)
    return _finish(fig, Path(path))
