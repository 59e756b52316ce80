"""Randomized eigenvalue-quantile estimation for kernel Gram matrices.

One trial draws a common scaling z, picks k base points (a subsample of a
given set, or fresh uniforms), multiplies every coordinate by (1/z)^(1/d),
and takes the spectrum of the resulting k x k Gram matrix.  Averaging the
sorted spectra over many trials yields the quantile bounds; power sums of
the per-trial spectra yield the trace-ratio diagnostics.

Determinism contract: trial t draws from the substream (seed, NS_TRIAL, t),
the draw order inside a trial is fixed (z first, then points), and results
are written into an indexed buffer reduced in index order, so the output is
bitwise identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from .errors import InputError
from .interlacing import InterlacingResult, interlacing_check, repeat_steps
from .kernels import KernelSpec, PointSet, gram_matrix
from .rng import NS_TRIAL, substream
from .scaling import ScalingDistribution, sample_scaling, solve_scaling
from .validation import as_descending, as_point_matrix

SUBSAMPLE = "subsample-from-x"
FRESH = "fresh-uniform"

# Fixed trial chunk; results never depend on how chunks map to workers.
_TRIAL_CHUNK = 1024


def default_trials(k: int) -> int:
    """Default trial count; empirically the needed m grows with k alone."""
    return 2000 * int(k) ** 2


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters of one quantile-estimation run."""

    k: int
    n: int
    d: int
    kernel: KernelSpec
    trials: int
    seed: int
    scaling: ScalingDistribution
    sampling_mode: str = SUBSAMPLE
    ambient_dim: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.k < 1 or self.n < self.k or self.n % self.k != 0:
            raise InputError(f"need 1 <= k <= n with k | n; got k={self.k}, n={self.n}")
        if self.d < 1:
            raise InputError("scaling dimension d must be >= 1")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.sampling_mode not in (SUBSAMPLE, FRESH):
            raise InputError(f"sampling_mode must be {SUBSAMPLE!r} or {FRESH!r}")
        if self.scaling.k != self.k or self.scaling.n != self.n:
            raise InputError(
                f"scaling distribution was solved for (k={self.scaling.k}, n={self.scaling.n}), "
                f"not (k={self.k}, n={self.n})"
            )

    @property
    def repeat_factor(self) -> int:
        return self.n // self.k

    def point_dim(self) -> int:
        return self.ambient_dim if self.ambient_dim is not None else self.d


def _base_points(config: EstimatorConfig, X) -> Optional[np.ndarray]:
    if config.sampling_mode == SUBSAMPLE:
        if X is None:
            raise InputError("subsample mode requires a point set X")
        pts = as_point_matrix(X)
        if pts.shape[0] != config.n:
            raise InputError(f"X has {pts.shape[0]} points but config.n = {config.n}")
        return pts
    return None


def _trial_gram(config: EstimatorConfig, pts: Optional[np.ndarray], trial_index: int) -> np.ndarray:
    rng = substream(config.seed, NS_TRIAL, int(trial_index))
    z = sample_scaling(config.scaling, rng)
    if pts is not None:
        base = pts[rng.choice(config.n, size=config.k, replace=False)]
    else:
        base = rng.random((config.k, config.point_dim()))
    return gram_matrix(config.kernel, base * (1.0 / z) ** (1.0 / config.d))


def sample_trial_gram(config: EstimatorConfig, X, trial_index: int) -> np.ndarray:
    """The k x k Gram matrix of one randomized trial (deterministic per index)."""
    return _trial_gram(config, _base_points(config, X), trial_index)


def run_trials(config: EstimatorConfig, X=None) -> np.ndarray:
    """Per-trial sorted spectra, shape (trials, k), row-wise descending."""
    pts = _base_points(config, X)
    m, k = config.trials, config.k
    eig = np.empty((m, k))

    def fill(lo: int, hi: int) -> None:
        mats = np.empty((hi - lo, k, k))
        for t in range(lo, hi):
            mats[t - lo] = _trial_gram(config, pts, t)
        eig[lo:hi] = np.linalg.eigvalsh(mats)[:, ::-1]

    spans = [(lo, min(lo + _TRIAL_CHUNK, m)) for lo in range(0, m, _TRIAL_CHUNK)]
    if config.workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(lambda s: fill(*s), spans))
    else:
        for span in spans:
            fill(*span)
    return eig


@dataclass(frozen=True)
class QuantileEstimate:
    """Averaged sorted spectra over m trials, with per-index spread."""

    averaged_eigenvalues: np.ndarray
    per_trial_stddev: np.ndarray
    repeat_factor: int
    m_used: int

    def __post_init__(self):
        avg = np.asarray(self.averaged_eigenvalues, dtype=float)
        if np.any(np.diff(avg) > 1e-12 * max(1.0, abs(float(avg[0])))):
            raise InputError("averaged eigenvalues must be non-increasing")
        object.__setattr__(self, "averaged_eigenvalues", avg)
        object.__setattr__(self, "per_trial_stddev", np.asarray(self.per_trial_stddev, dtype=float))

    @property
    def k(self) -> int:
        return self.averaged_eigenvalues.size

    def standard_errors(self) -> np.ndarray:
        return self.per_trial_stddev / np.sqrt(max(self.m_used, 1))


def estimate_quantiles(config: EstimatorConfig, X=None, trial_eigenvalues: Optional[np.ndarray] = None) -> QuantileEstimate:
    """Average the j-th largest trial eigenvalue over m independent trials."""
    eig = run_trials(config, X) if trial_eigenvalues is None else trial_eigenvalues
    avg = eig.mean(axis=0)
    std = eig.std(axis=0, ddof=1) if eig.shape[0] > 1 else np.zeros(config.k)
    return QuantileEstimate(avg, std, config.repeat_factor, eig.shape[0])


@dataclass(frozen=True)
class QuantileReport:
    """Step sequence of repeated quantile bounds, plus coverage when a
    reference spectrum is available."""

    steps: np.ndarray
    estimate: QuantileEstimate
    interlacing: Optional[InterlacingResult] = None

    @property
    def coverage(self) -> Optional[float]:
        return None if self.interlacing is None else self.interlacing.coverage


def quantile_report(est: QuantileEstimate, reference=None) -> QuantileReport:
    """Repeat each averaged eigenvalue n/k times; check the sandwich against
    a reference spectrum when one is supplied."""
    steps = repeat_steps(est.averaged_eigenvalues, est.repeat_factor)
    inter = None
    if reference is not None:
        ref = as_descending(reference)
        if ref.size != steps.size:
            raise InputError(f"reference has {ref.size} eigenvalues, expected {steps.size}")
        inter = interlacing_check(ref, est.averaged_eigenvalues)
    return QuantileReport(steps, est, inter)


@dataclass(frozen=True)
class TraceDiagnostics:
    """Per-power ratios of expected trial power sums to a reference spectrum."""

    ratios: np.ndarray  # index r-1 holds ratio for power r
    halfwidths: np.ndarray  # 95% normal-approximation half-widths

    def within(self, epsilon: float) -> bool:
        """True when every ratio r lies in [1 - (eps+hw_r), 1 + (eps+hw_r)]."""
        return bool(np.all(np.abs(self.ratios - 1.0) <= epsilon + self.halfwidths))


def trace_ratio_diagnostic(
    config: EstimatorConfig,
    X,
    reference,
    trial_eigenvalues: Optional[np.ndarray] = None,
) -> TraceDiagnostics:
    """Compare E[tr(B^r)/k] against the reference power sums for r = 1..k."""
    ref = as_descending(reference)
    eig = run_trials(config, X) if trial_eigenvalues is None else trial_eigenvalues
    m = eig.shape[0]
    ratios = np.empty(config.k)
    halfwidths = np.empty(config.k)
    for r in range(1, config.k + 1):
        per_trial = (eig**r).sum(axis=1) / config.k
        ref_val = float((ref**r).sum()) / ref.size
        if ref_val <= 0:
            raise InputError(f"reference power sum for r={r} is not positive")
        ratios[r - 1] = per_trial.mean() / ref_val
        spread = per_trial.std(ddof=1) if m > 1 else 0.0
        halfwidths[r - 1] = 1.96 * spread / np.sqrt(m) / ref_val
    return TraceDiagnostics(ratios, halfwidths)


class KernelQuantileEstimator(BaseEstimator):
    """Estimate all eigenvalue quantiles of a kernel Gram matrix from subsamples.

    scikit-learn style estimator: ``fit(X)`` runs the randomized trials on
    the rows of X and exposes ``quantiles_`` (the k averaged eigenvalues,
    descending), ``stddev_`` and ``repeat_factor_``.  Each quantile bound
    applies to n/k consecutive eigenvalues of the full Gram matrix of X.

    Parameters
    ----------
    k : subsample size; must divide n and, unless a pre-solved ``scaling``
        distribution is given, must be odd and >= 3.
    kernel : kernel family name ("gaussian" or "cauchy").
    length_scale : factor multiplying squared distances in the kernel.
    trials : number of randomized trials (default 2000 * k**2).
    d : scaling dimension used in the (1/z)^(1/d) factor; defaults to the
        ambient dimension of X.
    sampling : "subsample-from-x" (default) or "fresh-uniform".
    scaling : optional pre-solved ScalingDistribution.
    random_state : master seed for all trial substreams.
    workers : worker threads; the result does not depend on this.
    """

    def __init__(
        self,
        k: int = 7,
        kernel: str = "gaussian",
        length_scale: float = 1000.0,
        trials: Optional[int] = None,
        d: Optional[int] = None,
        sampling: str = SUBSAMPLE,
        scaling: Optional[ScalingDistribution] = None,
        random_state: int = 0,
        workers: int = 1,
    ):
        self.k = k
        self.kernel = kernel
        self.length_scale = length_scale
        self.trials = trials
        self.d = d
        self.sampling = sampling
        self.scaling = scaling
        self.random_state = random_state
        self.workers = workers

    def _config(self, n: int, ambient: int) -> EstimatorConfig:
        d = self.d if self.d is not None else ambient
        dist = self.scaling if self.scaling is not None else solve_scaling(self.k, n)
        return EstimatorConfig(
            k=self.k,
            n=n,
            d=d,
            kernel=KernelSpec(self.kernel, self.length_scale),
            trials=self.trials if self.trials is not None else default_trials(self.k),
            seed=self.random_state,
            scaling=dist,
            sampling_mode=self.sampling,
            ambient_dim=ambient,
            workers=self.workers,
        )

    def fit(self, X, y=None):
        pts = as_point_matrix(X)
        config = self._config(pts.shape[0], pts.shape[1])
        est = estimate_quantiles(config, pts)
        self.config_ = config
        self.n_features_in_ = pts.shape[1]
        self.quantiles_ = est.averaged_eigenvalues
        self.stddev_ = est.per_trial_stddev
        self.repeat_factor_ = est.repeat_factor
        self.estimate_ = est
        return self

    def quantile_steps(self) -> np.ndarray:
        """Quantile bounds repeated n/k times each (length n)."""
        self._check_fitted()
        return repeat_steps(self.quantiles_, self.repeat_factor_)

    def interlacing_coverage(self, reference) -> float:
        """Fraction of reference eigenvalues inside their sandwich bounds."""
        self._check_fitted()
        return quantile_report(self.estimate_, reference).coverage

    def _check_fitted(self):
        if not hasattr(self, "estimate_"):
            raise InputError("estimator is not fitted; call fit(X) first")
