"""Input validation helpers used across the package."""

from __future__ import annotations

import numpy as np

from .errors import InputError


def as_point_matrix(X) -> np.ndarray:
    """Coerce ``X`` to a finite float64 matrix of shape (n, d).

    One-dimensional input is treated as n points on the line.
    """
    if hasattr(X, "points"):
        X = X.points
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"expected an (n, d) point matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("point matrix contains non-finite entries")
    return arr


def as_descending(values) -> np.ndarray:
    """Coerce to a finite 1-d float64 array sorted in descending order."""
    if hasattr(values, "eigenvalues"):
        values = values.eigenvalues
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < 1:
        raise InputError("expected at least one value")
    if not np.all(np.isfinite(arr)):
        raise InputError("values contain non-finite entries")
    return np.sort(arr)[::-1].copy()


def check_symmetric(M, rel_tol: float = 1e-12) -> np.ndarray:
    """Validate that ``M`` is a square symmetric float matrix and return it."""
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got shape {arr.shape}")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > rel_tol * scale:
        raise InputError("matrix is not symmetric within tolerance")
    return arr


def require(condition: bool, message: str) -> None:
    """Raise InputError with ``message`` unless ``condition`` holds."""
    if not condition:
        raise InputError(message)
