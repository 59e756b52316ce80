"""Point sets, radial kernels, Gram matrices and symmetric eigendecomposition.

These are the shared primitives: everything else in the package builds
kernel matrices through :func:`gram_matrix` and reads spectra through
:func:`eigenvalues_sym`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InputError
from .rng import substream
from .validation import as_point_matrix, check_symmetric

KERNEL_FAMILIES = ("gaussian", "cauchy", "custom-radial")

# Gram matrices of positive-definite kernels may pick up tiny negative
# eigenvalues from rounding; anything below -PSD_REL_TOL * max is a defect.
PSD_REL_TOL = 1e-10


@dataclass(frozen=True)
class PointSet:
    """n points in d-dimensional Euclidean space, stored as an (n, d) array."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", as_point_matrix(self.points))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class KernelSpec:
    """A radial kernel family with a length-scale multiplying squared distance.

    ``gaussian``: exp(-length_scale * r^2); ``cauchy``: 1 / (1 + length_scale * r^2);
    ``custom-radial``: profile(length_scale * r^2), with ``profile`` a vectorized
    function of the scaled squared distance.
    """

    family: str
    length_scale: float
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise InputError(f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}")
        if not (self.length_scale > 0):
            raise InputError("length_scale must be positive")
        if self.family == "custom-radial" and self.profile is None:
            raise InputError("custom-radial kernels require a profile function")

    def of_sq_dist(self, sq_dist):
        """Kernel value as a function of (unscaled) squared distance; vectorized."""
        t = self.length_scale * np.asarray(sq_dist, dtype=float)
        if self.family == "gaussian":
            return np.exp(-t)
        if self.family == "cauchy":
            return 1.0 / (1.0 + t)
        return np.asarray(self.profile(t), dtype=float)

    def at_zero(self) -> float:
        return float(self.of_sq_dist(0.0))


def sample_uniform(n: int, d: int, seed: int) -> PointSet:
    """Draw n points with coordinates i.i.d. uniform on [0, 1].

    The same seed reproduces the same point set bit for bit.
    """
    if n < 1 or d < 1:
        raise InputError("n and d must be positive")
    rng = substream(seed)
    return PointSet(rng.random((int(n), int(d))))


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel at a single pair of coordinate vectors."""
    xa = np.asarray(x, dtype=float).ravel()
    ya = np.asarray(y, dtype=float).ravel()
    if xa.shape != ya.shape:
        raise InputError(f"dimension mismatch: {xa.shape} vs {ya.shape}")
    diff = xa - ya
    return float(spec.of_sq_dist(float(np.dot(diff, diff))))


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Broadcasted pairwise squared distances; (a-b)^2 summed per coordinate is
    # exactly symmetric in floating point, which gram_matrix relies on.
    diff = A[:, None, :] - B[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def cross_gram(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel matrix between two point sets (rows of X vs rows of Y)."""
    A = as_point_matrix(X)
    B = as_point_matrix(Y)
    if A.shape[1] != B.shape[1]:
        raise InputError("point sets have different dimensions")
    return spec.of_sq_dist(_sq_dists(A, B))


def gram_matrix(spec: KernelSpec, P) -> np.ndarray:
    """Kernel Gram matrix of a point set.

    The result is exactly symmetric (upper triangle mirrored) and has an
    exact unit diagonal for the gaussian and cauchy families.
    """
    pts = as_point_matrix(P)
    K = spec.of_sq_dist(_sq_dists(pts, pts))
    K = np.triu(K) + np.triu(K, 1).T
    np.fill_diagonal(K, spec.at_zero())
    return K


@dataclass(frozen=True)
class SymmetricSpectrum:
    """All eigenvalues of a symmetric matrix, sorted in descending order."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        arr = np.sort(np.asarray(self.eigenvalues, dtype=float).ravel())[::-1]
        if arr.size < 1 or not np.all(np.isfinite(arr)):
            raise InputError("spectrum must be a non-empty finite sequence")
        object.__setattr__(self, "eigenvalues", arr)

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def trace(self) -> float:
        return float(self.eigenvalues.sum())

    def power_sum(self, r: int) -> float:
        return float(np.sum(self.eigenvalues**r))


def eigenvalues_sym(M) -> SymmetricSpectrum:
    """All eigenvalues of a symmetric matrix, descending."""
    arr = check_symmetric(M)
    vals = np.linalg.eigvalsh(0.5 * (arr + arr.T))
    return SymmetricSpectrum(vals)
