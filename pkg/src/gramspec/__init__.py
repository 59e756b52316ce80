"""Eigenvalue quantile estimation for kernel Gram matrices.

Bounds for all eigenvalues of a large kernel matrix are obtained without
forming it: a small moment-matched matrix built from randomly scaled
subsamples interlaces the full spectrum in expectation, at O(m k^2) cost.
"""

from .decay import (
    DecayReport,
    Walk,
    canonical_walk,
    decay_ratio,
    epsilon_estimate,
    gaussian_limit_check,
    random_closed_walk,
)
from .errors import (
    DegenerateMomentsError,
    GramspecError,
    InfeasibleMomentsError,
    InputError,
    NumericalError,
    SolverFailureError,
    UnsupportedParityError,
)
from .estimator import (
    FRESH,
    SUBSAMPLE,
    EstimatorConfig,
    KernelQuantileEstimator,
    QuantileEstimate,
    QuantileReport,
    TraceDiagnostics,
    estimate_quantiles,
    quantile_report,
    run_trials,
    sample_trial_gram,
    trace_ratio_diagnostic,
)
from .experiments import (
    PRESETS,
    ExperimentReport,
    ExperimentSpec,
    SweepResult,
    dimension_sweep,
    full_spectrum_oracle,
    run_example,
)
from .interlacing import InterlacingResult, interlacing_check, repeat_steps
from .kernels import (
    KernelSpec,
    PointSet,
    SymmetricSpectrum,
    eigenvalues_sym,
    gram_matrix,
    kernel_eval,
    sample_uniform,
)
from .moments import MomentSequence, moment_match_set, moments_from_values, spectral_moments
from .nystrom import nystrom_spectrum, spectrum_fit_metric
from .orthopoly import CdfBounds, OrthoPolyBasis, cdf_bounds, christoffel, orthopoly_from_moments
from .scaling import (
    HankelPair,
    ScalingDistribution,
    ScalingMoments,
    StieltjesCheck,
    check_stieltjes_solvable,
    hankel_matrices,
    load_distribution,
    sample_scaling,
    save_distribution,
    scaling_moments,
    solve_scaling,
)

__version__ = "0.1.0"

__all__ = [
    "CdfBounds",
    "DecayReport",
    "DegenerateMomentsError",
    "EstimatorConfig",
    "ExperimentReport",
    "ExperimentSpec",
    "FRESH",
    "GramspecError",
    "HankelPair",
    "InfeasibleMomentsError",
    "InputError",
    "InterlacingResult",
    "KernelQuantileEstimator",
    "KernelSpec",
    "MomentSequence",
    "NumericalError",
    "OrthoPolyBasis",
    "PRESETS",
    "PointSet",
    "QuantileEstimate",
    "QuantileReport",
    "ScalingDistribution",
    "ScalingMoments",
    "SolverFailureError",
    "StieltjesCheck",
    "SUBSAMPLE",
    "SweepResult",
    "SymmetricSpectrum",
    "TraceDiagnostics",
    "UnsupportedParityError",
    "Walk",
    "canonical_walk",
    "cdf_bounds",
    "check_stieltjes_solvable",
    "christoffel",
    "decay_ratio",
    "dimension_sweep",
    "eigenvalues_sym",
    "epsilon_estimate",
    "estimate_quantiles",
    "full_spectrum_oracle",
    "gaussian_limit_check",
    "gram_matrix",
    "hankel_matrices",
    "interlacing_check",
    "kernel_eval",
    "load_distribution",
    "moment_match_set",
    "moments_from_values",
    "nystrom_spectrum",
    "orthopoly_from_moments",
    "quantile_report",
    "random_closed_walk",
    "repeat_steps",
    "run_example",
    "run_trials",
    "sample_scaling",
    "sample_trial_gram",
    "sample_uniform",
    "save_distribution",
    "scaling_moments",
    "solve_scaling",
    "spectral_moments",
    "spectrum_fit_metric",
    "trace_ratio_diagnostic",
]
