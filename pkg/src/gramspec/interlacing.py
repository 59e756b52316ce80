"""Sandwich bounds between a large spectrum and a small moment-matched one.

With both sequences sorted descending and the conventions sigma_0 = +inf,
sigma_{k+1} = 0 on the small side, element j of the large sequence should
satisfy ``b[ceil(j*k/n) - 1] >= a[j] >= b[ceil(j*k/n) + 1]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .validation import as_descending

# Comparisons carry a small relative slack so that exact ties (e.g. constant
# sets, where matched values equal the originals up to rounding) do not flip.
REL_SLACK = 1e-9


@dataclass(frozen=True)
class InterlacingResult:
    """Per-index sandwich flags plus summary statistics."""

    flags: np.ndarray
    coverage: float
    excess: np.ndarray  # per-index amount by which the sandwich is violated
    upper: np.ndarray  # upper bound used at each index (+inf allowed)
    lower: np.ndarray  # lower bound used at each index

    def mean_relative_violation(self, scale: float) -> float:
        """Mean sandwich violation normalized by ``scale`` (e.g. top eigenvalue)."""
        if scale <= 0:
            return float(np.mean(self.excess > 0))
        return float(np.mean(self.excess) / scale)


def interlacing_check(a, b) -> InterlacingResult:
    """Check the sandwich bounds of a small set against a large one.

    ``a`` is the large sequence (length n), ``b`` the small one (length k);
    both are coerced to descending order.  When k does not divide n the same
    ceiling indices are used and a warning is emitted.
    """
    av = as_descending(a)
    bv = as_descending(b)
    n, k = av.size, bv.size
    if n % k != 0:
        warnings.warn(f"k={k} does not divide n={n}; ceiling indices are used as-is", stacklevel=2)
    padded = np.concatenate(([np.inf], bv, [0.0]))
    j = np.arange(1, n + 1)
    i = np.ceil(j * k / n).astype(int)
    upper = padded[i - 1]
    lower = padded[i + 1]
    slack = REL_SLACK * max(av[0], bv[0], 1e-300)
    flags = (upper >= av - slack) & (av >= lower - slack)
    over = np.maximum(0.0, np.where(np.isinf(upper), 0.0, av - upper))
    under = np.maximum(0.0, lower - av)
    excess = over + under
    return InterlacingResult(
        flags=flags,
        coverage=float(np.mean(flags)),
        excess=excess,
        upper=upper,
        lower=lower,
    )


def repeat_steps(values, repeat_factor: int) -> np.ndarray:
    """Each value repeated ``repeat_factor`` times, preserving order."""
    return np.repeat(np.asarray(values, dtype=float), int(repeat_factor))
