"""Pixel-field helpers shared by every other module.

Images are plain 2D ``float64`` numpy arrays indexed ``[row, col]``; row is
the first (``i``) index of the discrete gradient, column the second (``j``).
"""

import numpy as np


class DimensionError(ValueError):
    """Raised when two grids that must share a shape do not."""


def as_grid(x, name="grid"):
    """Return ``x`` as a finite 2D float64 array (copying only if needed)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 2D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_shape(a, b):
    if np.shape(a) != np.shape(b):
        raise DimensionError(f"shape mismatch: {np.shape(a)} vs {np.shape(b)}")


def dot(a, b):
    """Euclidean inner product ``sum(a * b)`` of two equally shaped grids."""
    check_same_shape(a, b)
    return float(np.vdot(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))


def axpy(alpha, x, y):
    """Return ``alpha * x + y`` as a new grid."""
    check_same_shape(x, y)
    return alpha * np.asarray(x, dtype=np.float64) + np.asarray(y, dtype=np.float64)


def norm(a):
    return float(np.linalg.norm(np.ravel(a)))
