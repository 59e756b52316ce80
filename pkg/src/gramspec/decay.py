"""Monte-Carlo verification of the fast-decay condition on a kernel.

For a closed walk visiting l distinct vertices, the relevant quantity is
the ratio of the walk-product integral over [0, s]^l to the same integral
over [0, 1]^l.  A kernel with fast decay away from the diagonal keeps this
ratio near s; the largest observed deviation over a grid of walks and
scales is the epsilon estimate.

Numerator and denominator share one uniform sample (the numerator points
are the denominator points scaled by s), which removes most of the ratio
variance and makes ratio(s=1) equal to 1 exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NumericalError
from .kernels import KernelSpec
from .rng import NS_DECAY, NS_WALKS, substream

MIN_SAMPLES = 10_000
DEFAULT_RANDOM_WALKS = 8


@dataclass(frozen=True)
class Walk:
    """A closed walk on a complete graph, as the visited vertex sequence.

    Vertices are labeled 1..l by first appearance; consecutive repeats are
    allowed (they contribute unit kernel factors for unit-diagonal kernels).
    """

    vertices: tuple

    def __post_init__(self):
        v = tuple(int(x) for x in self.vertices)
        if len(v) < 2 or v[0] != v[-1]:
            raise InputError("a walk must be closed: first and last vertex equal")
        object.__setattr__(self, "vertices", v)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def n_distinct(self) -> int:
        return len(set(self.vertices))


def canonical_walk(r: int, l: int) -> Walk:
    """The deterministic representative: visit 1..l in order, return to 1,
    and pad with stays at 1 up to length r."""
    r, l = int(r), int(l)
    if l < 1 or l > r:
        raise InputError(f"need 1 <= l <= r, got l={l}, r={r}")
    if l == 1:
        return Walk((1,) * (r + 1))
    seq = list(range(1, l + 1)) + [1] * (r - l + 1)
    return Walk(tuple(seq))


def _relabel(seq) -> tuple:
    seen, out = {}, []
    for v in seq:
        if v not in seen:
            seen[v] = len(seen) + 1
        out.append(seen[v])
    return tuple(out)


def random_closed_walk(r: int, l: int, rng: np.random.Generator) -> Walk:
    """A uniformly sampled closed walk of length r visiting exactly l vertices."""
    r, l = int(r), int(l)
    if l < 1 or l > r:
        raise InputError(f"need 1 <= l <= r, got l={l}, r={r}")
    for _ in range(10_000):
        seq = [1] + list(rng.integers(1, l + 1, size=r - 1)) + [1]
        if len(set(seq)) == l:
            return Walk(_relabel(seq))
    raise NumericalError(f"could not sample a closed walk with r={r}, l={l}")


def walk_product(kernel: KernelSpec, walk: Walk, points: np.ndarray) -> np.ndarray:
    """Product of kernel factors along the walk, per sample row.

    ``points`` has shape (N, l) for scalar variables or (N, l, dim) for the
    multidimensional variant; one variable per distinct vertex.
    """
    v = np.asarray(walk.vertices) - 1
    out = np.ones(points.shape[0])
    for a, b in zip(v[:-1], v[1:]):
        if a == b:
            out *= kernel.at_zero()
            continue
        diff = points[:, a, ...] - points[:, b, ...]
        sq = diff * diff if diff.ndim == 1 else np.einsum("ij,ij->i", diff, diff)
        out *= kernel.of_sq_dist(sq)
    return out


def _ratio_from_samples(f_num: np.ndarray, f_den: np.ndarray, volume: float) -> tuple:
    mu_d = float(f_den.mean())
    if mu_d <= 0:
        raise NumericalError(
            "denominator integral estimate is not positive; increase samples or soften the kernel"
        )
    mu_n = float(f_num.mean())
    ratio = float(volume * mu_n / mu_d)
    influence = (volume / mu_d) * f_num - (volume * mu_n / mu_d**2) * f_den
    n = f_num.size
    hw = float(1.96 * influence.std(ddof=1) / np.sqrt(n)) if n > 1 else float("inf")
    return ratio, hw


def decay_ratio(
    kernel: KernelSpec,
    walk: Walk,
    s: float,
    n_samples: int,
    rng,
    dim: int = 1,
) -> tuple:
    """Monte-Carlo estimate of the [0,s]^l vs [0,1]^l walk-integral ratio.

    Returns (ratio, halfwidth).  ``rng`` may be a Generator or an integer
    seed.  The same draws serve both integrals, so s=1 returns exactly 1.
    """
    if not (0 < s <= 1):
        raise InputError("s must lie in (0, 1]")
    if n_samples < MIN_SAMPLES:
        raise InputError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    if isinstance(rng, (int, np.integer)):
        rng = substream(int(rng), NS_DECAY)
    l = walk.n_distinct
    shape = (int(n_samples), l) if dim == 1 else (int(n_samples), l, int(dim))
    U = rng.random(shape)
    f_den = walk_product(kernel, walk, U)
    f_num = f_den if s == 1.0 else walk_product(kernel, walk, s * U)
    return _ratio_from_samples(f_num, f_den, float(s) ** (l * dim))


@dataclass(frozen=True)
class DecayCell:
    l: int
    s: float
    ratio: float
    halfwidth: float
    walk: Walk


@dataclass(frozen=True)
class DecayReport:
    """Ratio estimates over the (l, s) grid and the resulting epsilon."""

    entries: dict  # (l, s) -> (ratio, halfwidth), canonical walks
    epsilon_hat: float
    t_effective: float
    cells: tuple  # every evaluated DecayCell, random walks included

    def rows(self) -> list:
        """Canonical-grid rows (l, s, ratio, halfwidth) in grid order."""
        return [(l, s, r, h) for (l, s), (r, h) in sorted(self.entries.items())]


def epsilon_estimate(
    kernel: KernelSpec,
    l_max: int,
    s_grid: Sequence[float],
    n_samples: int,
    seed: int,
    random_walks: int = DEFAULT_RANDOM_WALKS,
    dim: int = 1,
    workers: int = 1,
) -> DecayReport:
    """Fill the decay report over canonical walks for l = 1..l_max and all s.

    ``random_walks`` extra sampled walks per level (of slightly longer
    length) also contribute to epsilon_hat; the keyed entries always refer
    to the canonical walk of each level.
    """
    s_values = [float(s) for s in s_grid]
    if not s_values or any(not (0 < s <= 1) for s in s_values):
        raise InputError("s_grid must be a non-empty subset of (0, 1]")
    if l_max < 1:
        raise InputError("l_max must be >= 1")
    walk_rng = substream(seed, NS_WALKS)
    jobs = []
    for l in range(1, l_max + 1):
        walks = [canonical_walk(l, l)]
        for j in range(random_walks):
            walks.append(random_closed_walk(l + 1 + j % 2, l, walk_rng))
        for widx, walk in enumerate(walks):
            jobs.append((l, widx, walk))

    def run(job):
        l, widx, walk = job
        rng = substream(seed, NS_DECAY, l, widx)
        shape = (int(n_samples), l) if dim == 1 else (int(n_samples), l, int(dim))
        U = rng.random(shape)
        f_den = walk_product(kernel, walk, U)
        cells = []
        for s in s_values:
            f_num = f_den if s == 1.0 else walk_product(kernel, walk, s * U)
            ratio, hw = _ratio_from_samples(f_num, f_den, s ** (l * dim))
            cells.append(DecayCell(l, s, ratio, hw, walk))
        return cells

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_job = list(pool.map(run, jobs))
    else:
        per_job = [run(job) for job in jobs]

    entries = {}
    all_cells = []
    for (l, widx, _), cells in zip(jobs, per_job):
        all_cells.extend(cells)
        if widx == 0:
            for c in cells:
                entries[(c.l, c.s)] = (c.ratio, c.halfwidth)
    eps = max(abs(c.ratio - c.s) for c in all_cells)
    return DecayReport(entries, float(eps), min(s_values), tuple(all_cells))


def gaussian_limit_check(
    lambdas: Sequence[float],
    walk: Walk,
    s: float,
    n_samples: int,
    seed: int,
    dim: int = 1,
) -> list:
    """Ratio per length scale for an increasing ladder of gaussian kernels.

    The same uniform draws serve every rung, so the trend in the output
    reflects the kernels rather than sampling noise.
    """
    lams = [float(x) for x in lambdas]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise InputError("lambdas must be strictly increasing")
    if not (0 < s <= 1):
        raise InputError("s must lie in (0, 1]")
    rng = substream(seed, NS_DECAY)
    l = walk.n_distinct
    shape = (int(n_samples), l) if dim == 1 else (int(n_samples), l, int(dim))
    U = rng.random(shape)
    out = []
    for lam in lams:
        kernel = KernelSpec("gaussian", lam)
        f_den = walk_product(kernel, walk, U)
        f_num = f_den if s == 1.0 else walk_product(kernel, walk, s * U)
        ratio, _ = _ratio_from_samples(f_num, f_den, s ** (l * dim))
        out.append(ratio)
    return out
