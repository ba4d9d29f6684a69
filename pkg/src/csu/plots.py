"""Figure rendering for the report paths.

Each helper draws one matplotlib figure and writes it to a file next to
the delimited report; nothing is shown interactively (the Agg backend is
forced since this module only ever renders to disk).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_correlation_heatmap(corr, path, title="statistics correlation"):
    corr = np.asarray(corr)
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    im = ax.imshow(corr, vmin=-1.0, vmax=1.0, cmap="RdBu_r", interpolation="nearest")
    ax.set_title(title)
    ax.set_xlabel("channel")
    ax.set_ylabel("channel")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_spectrum_plot(report, path, title="covariance spectrum"):
    vals = np.asarray(report.eigenvalues)
    ratios = np.asarray(report.explained_variance_ratio)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.4, 3.6))
    ax1.bar(np.arange(1, vals.size + 1), vals, color="#4878a8")
    ax1.set_xlabel("eigenvalue index")
    ax1.set_ylabel("eigenvalue")
    ax1.set_title(f"{title} (rank {report.rank})")
    if ratios.size:
        ax2.plot(np.arange(1, ratios.size + 1), ratios, marker="o", color="#a85448")
        ax2.set_ylim(0.0, 1.05)
    ax2.set_xlabel("leading eigenvalues kept")
    ax2.set_ylabel("explained variance (cumulative)")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_harness_metrics(rows, path):
    """Grouped bars, one panel per harness metric, methods on the x axis."""
    methods = [r["method"] for r in rows]
    metrics = ("frechet_to_target", "out_of_hull_fraction", "correlation_deviation")
    fig, axes = plt.subplots(1, 3, figsize=(11.0, 3.4))
    for ax, metric in zip(axes, metrics):
        ax.bar(methods, [r[metric] for r in rows], color="#6890b8")
        ax.set_title(metric.replace("_", " "))
        ax.tick_params(axis="x", rotation=30)
        ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
