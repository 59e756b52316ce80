"""SVG figure emission for experiment reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Spectra routinely reach the round-off floor; clip for log axes.
_FLOOR = 1e-17


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_quantile_steps(path, steps, oracle=None, title: str = "") -> None:
    """Step plot of the repeated quantile bounds over the reference spectrum."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    idx = np.arange(1, len(steps) + 1)
    ax.semilogy(idx, np.maximum(steps, _FLOOR), drawstyle="steps-mid", color="tab:red",
                label="repeated quantile bounds")
    if oracle is not None:
        vals = np.asarray(getattr(oracle, "eigenvalues", oracle), dtype=float)
        ax.semilogy(np.arange(1, len(vals) + 1), np.maximum(vals, _FLOOR), ".",
                    color="tab:blue", markersize=4, label="reference spectrum")
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("magnitude")
    if title:
        ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_spectrum_pairs(path, pairs, labels, title: str = "") -> None:
    """Stacked panels of exact vs approximate spectra (one panel per pair)."""
    fig, axes = plt.subplots(len(pairs), 1, figsize=(7, 3 * len(pairs)), squeeze=False)
    for ax, (exact, approx), label in zip(axes[:, 0], pairs, labels):
        idx = np.arange(1, len(exact) + 1)
        ax.semilogy(idx, np.maximum(exact, _FLOOR), ".", color="tab:blue", label="full matrix")
        ax.semilogy(np.arange(1, len(approx) + 1), np.maximum(approx, _FLOOR), ".",
                    color="tab:red", label="column-subset approximation")
        ax.set_ylabel("magnitude")
        ax.set_title(label)
        ax.legend(fontsize=8)
    axes[-1, 0].set_xlabel("eigenvalue index")
    fig.tight_layout()
    _save(fig, path)


def plot_matched_sets(path, source, matched, title: str = "") -> None:
    """Scatter of the source set against the moment-matched representatives."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    src = np.sort(np.asarray(source, dtype=float))
    mat = np.sort(np.asarray(matched, dtype=float))
    ax.plot(np.arange(1, src.size + 1), src, "o", color="tab:blue", label="source set")
    xs = (src.size / mat.size) * (np.arange(1, mat.size + 1) - 0.5) + 0.5
    ax.plot(xs, mat, "_", color="tab:red", markersize=18, markeredgewidth=3,
            label="moment-matched set")
    ax.set_xlabel("index (sorted by magnitude)")
    ax.set_ylabel("magnitude")
    if title:
        ax.set_title(title)
    ax.legend()
    _save(fig, path)


def plot_sweep(path, candidates, misfits, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(list(candidates), [misfits[c] for c in candidates], "o-")
    ax.set_xlabel("candidate scaling dimension")
    ax.set_ylabel("misfit")
    ax.set_xticks(list(candidates))
    if title:
        ax.set_title(title)
    _save(fig, path)
