"""Power-sum moments and moment-matched representative sets.

Moment sequences are the bridge between a large set of nonnegative reals
and the small set that mimics it: matching the first k mean power sums is
what produces the interlacing bounds checked in :mod:`gramspec.interlacing`.

Hankel and Newton-identity arithmetic runs in software extended precision
(mpmath); the conditioning of these computations degrades exponentially
with k, and double precision already struggles near k = 6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from .errors import InfeasibleMomentsError, InputError, NumericalError
from .validation import as_descending


def working_dps(k: int) -> int:
    """Decimal digits used for moment/Hankel arithmetic at degree k."""
    return max(40, 30 + 6 * int(k))


@dataclass(frozen=True)
class MomentSequence:
    """Moments mu_0..mu_r of a finite multiset of reals.

    ``mean`` normalization divides each power sum by the set size, so
    mu_0 == 1; ``raw`` keeps plain power sums.  ``exact`` carries the
    mpmath values the sequence was computed with, so downstream Hankel
    work does not have to start from rounded doubles.
    """

    values: tuple
    normalization: str = "mean"
    exact: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if self.normalization not in ("mean", "raw"):
            raise InputError("normalization must be 'mean' or 'raw'")
        if not all(np.isfinite(v) for v in vals):
            raise InputError("moments must be finite")
        if self.normalization == "mean" and vals and abs(vals[0] - 1.0) > 1e-12:
            raise InputError("mean-normalized moments must have mu_0 = 1")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def mp_values(self) -> list:
        """Moments as mpmath numbers, preferring the exact copies."""
        if self.exact is not None:
            return list(self.exact)
        return [mp.mpf(v) for v in self.values]


def moments_from_values(values: Sequence[float], r_max: int, normalization: str = "mean") -> MomentSequence:
    """Moments of a multiset of reals, computed in extended precision."""
    arr = [float(v) for v in np.asarray(values, dtype=float).ravel()]
    if len(arr) < 1:
        raise InputError("need at least one value")
    if r_max < 1:
        raise InputError("r_max must be >= 1")
    n = len(arr)
    with mp.workdps(working_dps(max(2, r_max // 2))):
        xs = [mp.mpf(v) for v in arr]
        exact = []
        for r in range(r_max + 1):
            s = mp.fsum(x**r for x in xs)
            exact.append(s / n if normalization == "mean" else s)
        return MomentSequence(tuple(float(e) for e in exact), normalization, tuple(exact))


def spectral_moments(spectrum, r_max: int) -> MomentSequence:
    """Mean power sums of a spectrum: value r is (sum_i sigma_i^r) / size."""
    eigs = as_descending(spectrum)
    return moments_from_values(eigs, r_max, "mean")


def _elementary_from_power_sums(p: list) -> list:
    """Newton's identities: power sums p_1..p_k -> elementary symmetric e_1..e_k."""
    k = len(p)
    e = [mp.mpf(1)]
    for r in range(1, k + 1):
        acc = mp.mpf(0)
        for i in range(1, r + 1):
            acc += (-1) ** (i - 1) * e[r - i] * p[i - 1]
        e.append(acc / r)
    return e[1:]


def _poly_roots_companion(coeffs: list) -> list:
    """Roots of a monic polynomial via its companion matrix.

    Unlike iterative root polishing this stays well behaved on multiple
    roots (clusters shrink with working precision instead of stalling).
    """
    k = len(coeffs) - 1
    if k == 1:
        return [-coeffs[1]]
    C = mp.matrix(k, k)
    for i in range(1, k):
        C[i, i - 1] = 1
    for i in range(k):
        C[i, k - 1] = -coeffs[k - i]
    try:
        return list(mp.eig(C, left=False, right=False))
    except Exception as exc:  # pragma: no cover - pathological inputs
        raise NumericalError(f"companion eigensolve failed: {exc}") from None


def moment_match_set(S: Sequence[float], k: int) -> np.ndarray:
    """The k nonnegative reals whose mean power sums match those of S for r = 1..k.

    Targets are power sums p_r = (k/n) * sum(a_i^r); Newton's identities
    convert them to elementary symmetric polynomials and the output is the
    root multiset of the resulting degree-k polynomial, descending.

    Raises InfeasibleMomentsError when the roots are complex or negative
    beyond tolerance, i.e. S is not representable by k nonnegative reals
    with uniform weights.
    """
    arr = np.asarray(S, dtype=float).ravel()
    if arr.size < 1:
        raise InputError("S must be non-empty")
    if np.any(arr < 0):
        raise InputError("S must be nonnegative")
    k = int(k)
    if not (1 <= k <= arr.size):
        raise InputError("k must satisfy 1 <= k <= len(S)")
    n = arr.size
    with mp.workdps(working_dps(k)):
        xs = [mp.mpf(float(v)) for v in arr]
        p = [mp.mpf(k) / n * mp.fsum(x**r for x in xs) for r in range(1, k + 1)]
        e = _elementary_from_power_sums(p)
        coeffs = [mp.mpf(1)] + [(-1) ** (j + 1) * e[j] for j in range(k)]
        roots = _poly_roots_companion(coeffs)
        scale = max(abs(r) for r in roots) if roots else mp.mpf(1)
        scale = max(scale, mp.mpf(1e-300))
        out = []
        for r in roots:
            if abs(mp.im(r)) > 1e-8 * max(abs(r), 1e-3 * scale):
                raise InfeasibleMomentsError(
                    f"moment matching for k={k} produced a complex root {complex(r)}"
                )
            x = mp.re(r)
            if x < -1e-8 * scale:
                raise InfeasibleMomentsError(
                    f"moment matching for k={k} produced a negative root {float(x)}"
                )
            out.append(max(x, mp.mpf(0)))
    return np.sort(np.array([float(x) for x in out]))[::-1]
