"""Matplotlib report figures written alongside the delimited outputs."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import BoundaryNorm, ListedColormap

from .domains import SphereDomain, TorusDomain
from .render import PALETTE, default_slice_positions, render_slices

__all__ = [
    "save_energy_trace_figure",
    "save_partition_figure",
    "save_table_figure",
]


def _label_cmap(k):
    colors = PALETTE[np.arange(k) % len(PALETTE)] / 255.0
    cmap = ListedColormap(colors)
    norm = BoundaryNorm(np.arange(k + 1) - 0.5, k)
    return cmap, norm


def save_energy_trace_figure(traces, best, path):
    """Energy per iteration for every finished trial; the best one is bold."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for idx, trace in traces:
        if trace is None or len(trace) == 0:
            continue
        is_best = idx == best
        ax.plot(
            np.arange(len(trace)),
            trace,
            lw=2.2 if is_best else 0.9,
            alpha=1.0 if is_best else 0.45,
            label=f"trial {idx}" + (" (best)" if is_best else ""),
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("normalized energy")
    ax.grid(True, alpha=0.3)
    if len(traces) <= 12:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _imshow_labels(ax, plane, k, length=None):
    cmap, norm = _label_cmap(k)
    extent = None
    if length is not None:
        extent = (-length / 2, length / 2, -length / 2, length / 2)
    ax.imshow(plane.T, cmap=cmap, norm=norm, origin="lower", extent=extent, interpolation="nearest")


def save_partition_figure(labeling, path):
    """Quick preview of a labeling: plane, central slices, or sphere chart."""
    dom = labeling.domain
    k = labeling.k
    if isinstance(dom, SphereDomain):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        cmap, norm = _label_cmap(k)
        ax.imshow(
            labeling.labels,
            cmap=cmap,
            norm=norm,
            origin="upper",
            extent=(0, 2 * np.pi, np.pi, 0),
            interpolation="nearest",
            aspect="auto",
        )
        ax.set_xlabel("phi")
        ax.set_ylabel("theta")
    elif dom.d == 2:
        fig, ax = plt.subplots(figsize=(4.6, 4.6))
        _imshow_labels(ax, labeling.labels, k, dom.length)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    elif dom.d == 3:
        fig, axes = plt.subplots(1, 3, figsize=(10, 3.6))
        for ax_idx, ax in enumerate(axes):
            cut = np.take(labeling.labels, dom.n // 2, axis=ax_idx)
            _imshow_labels(ax, cut, k, dom.length)
            ax.set_title(f"x{ax_idx + 1} = 0 cut", fontsize=9)
    else:
        positions = default_slice_positions(dom.length)
        cuts = render_slices(labeling, axis=0, positions=positions)
        fig, axes = plt.subplots(2, 4, figsize=(11, 5.6))
        for (pos, img), ax in zip(cuts, axes.ravel()):
            ax.imshow(img, interpolation="nearest")
            ax.set_title(f"x1 = {pos:g}", fontsize=8)
            ax.set_xticks([])
            ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_table_figure(rows, path):
    """Computed-vs-reference comparison chart for one table bundle.

    rows: list of dicts with keys label, reference, computed (may be None),
    tolerance, passed.
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = np.arange(len(rows))
    refs = [r["reference"] for r in rows]
    tols = [r["tolerance"] for r in rows]
    ax.errorbar(xs, refs, yerr=tols, fmt="s", color="black", capsize=4, label="reference +- tol")
    got_xs = [x for x, r in zip(xs, rows) if r["computed"] is not None]
    got = [r["computed"] for r in rows if r["computed"] is not None]
    colors = ["tab:green" if r["passed"] else "tab:red" for r in rows if r["computed"] is not None]
    ax.scatter(got_xs, got, c=colors, zorder=3, label="computed")
    ax.set_xticks(xs)
    ax.set_xticklabels([r["label"] for r in rows], rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("normalized energy")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
