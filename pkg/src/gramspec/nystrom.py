"""Naive column-subset low-rank spectrum approximation (the baseline).

The approximation C W^+ C^T from a uniformly random column subset tracks
the leading spectrum well only when the matrix has low numerical rank;
its failure for sharp kernels is what motivates the quantile estimator.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .kernels import KernelSpec, SymmetricSpectrum, cross_gram
from .rng import NS_NYSTROM, substream
from .validation import as_descending, as_point_matrix

PINV_REL_TOL = 1e-12


def nystrom_spectrum(X, kernel: KernelSpec, subset_size: int, seed: int) -> SymmetricSpectrum:
    """Spectrum of the column-subset approximation, zero-padded to n.

    The subset indices are drawn uniformly without replacement; the pivot
    block is pseudo-inverted with a relative eigenvalue cutoff.
    """
    pts = as_point_matrix(X)
    n = pts.shape[0]
    s = int(subset_size)
    if not (1 <= s <= n):
        raise InputError(f"subset_size must be in [1, {n}], got {s}")
    rng = substream(seed, NS_NYSTROM)
    idx = np.sort(rng.choice(n, size=s, replace=False))
    C = cross_gram(kernel, pts, pts[idx])
    W = 0.5 * (C[idx] + C[idx].T)
    w_vals, w_vecs = np.linalg.eigh(W)
    cutoff = PINV_REL_TOL * float(np.max(np.abs(w_vals)))
    inv_sqrt = np.where(w_vals > cutoff, 1.0 / np.sqrt(np.maximum(w_vals, cutoff)), 0.0)
    M = C @ (w_vecs * inv_sqrt)
    # Nonzero spectrum of C W^+ C^T equals that of M^T M (s x s).
    small = 0.5 * (M.T @ M + (M.T @ M).T)
    vals = np.linalg.eigvalsh(small)[::-1]
    return SymmetricSpectrum(np.concatenate([vals, np.zeros(n - s)]))


def spectrum_fit_metric(approx, exact, first: int = 100, floor_rel: float = 1e-14) -> float:
    """Mean absolute log10 ratio over the leading eigenvalues.

    Eigenvalues are floored at ``floor_rel`` times the top exact eigenvalue
    so that rank-deficient tails produce a large finite penalty.
    """
    a = as_descending(approx)
    e = as_descending(exact)
    count = min(first, a.size, e.size)
    floor = floor_rel * float(e[0])
    if floor <= 0:
        raise InputError("exact spectrum must have a positive top eigenvalue")
    a_f = np.maximum(a[:count], floor)
    e_f = np.maximum(e[:count], floor)
    return float(np.mean(np.abs(np.log10(a_f / e_f))))
