"""Matplotlib rendering of reports to image files (headless Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .simulate import CoverageReport  # noqa: E402
from .subset import ConfidenceSubset, WinCounts, mle  # noqa: E402

__all__ = ["coverage_figure", "analysis_figure"]

_MARKERS = {"finite": "o", "asymptotic": "s", "oracle": "^"}


def coverage_figure(report: CoverageReport, path: str) -> str:
    """Two-panel coverage and mean-size figure; returns the written path."""
    fig, (ax_cov, ax_size) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ns = list(report.n_grid)
    log_x = len(ns) > 1 and max(ns) / max(min(ns), 1) >= 10
    for meth in report.methods:
        rows = [r for r in report.rows if r.method == meth]
        rows.sort(key=lambda r: r.n)
        xs = [r.n for r in rows]
        marker = _MARKERS.get(meth, "d")
        ax_cov.errorbar(
            xs,
            [r.coverage for r in rows],
            yerr=[r.se_coverage for r in rows],
            marker=marker,
            capsize=3,
            label=meth,
        )
        ax_size.errorbar(
            xs,
            [r.mean_size for r in rows],
            yerr=[r.se_size for r in rows],
            marker=marker,
            capsize=3,
            label=meth,
        )
    ax_cov.axhline(1.0 - report.delta, color="k", ls="--", lw=1.0, label=r"$1-\delta$")
    ax_cov.set_xlabel("n")
    ax_cov.set_ylabel("coverage")
    ax_cov.set_ylim(min(0.8, 1.0 - 2 * report.delta), 1.02)
    ax_size.set_xlabel("n")
    ax_size.set_ylabel("mean subset size")
    ax_size.set_ylim(bottom=0)
    if log_x:
        ax_cov.set_xscale("log")
        ax_size.set_xscale("log")
    ax_cov.legend(fontsize=8)
    ax_size.legend(fontsize=8)
    fig.suptitle(report.descriptor or "coverage experiment", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def analysis_figure(counts: WinCounts, subset: ConfidenceSubset, path: str) -> str:
    """Sorted frequency bars with the selection threshold; returns the path."""
    p_hat = mle(counts).as_array()
    order = sorted(range(len(p_hat)), key=lambda i: (-p_hat[i], i))
    labels = [counts.labels[i] for i in order]
    vals = [p_hat[i] for i in order]
    member = [counts.labels[i] in subset.members for i in order]

    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(labels) + 1.5), 3.4))
    colors = ["tab:blue" if m else "lightgray" for m in member]
    ax.bar(range(len(vals)), vals, color=colors)
    threshold = max(p_hat) - subset.width
    if threshold > 0:
        ax.axhline(threshold, color="k", ls="--", lw=1.0, label="selection threshold")
        ax.legend(fontsize=8)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_ylabel("empirical frequency")
    ax.set_title(
        f"{len(subset.members)} of {counts.alphabet_size} selected "
        f"({subset.method}, width {subset.width:.4g})",
        fontsize=9,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
