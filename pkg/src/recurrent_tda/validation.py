"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

#: Relative asymmetry tolerated in a shape matrix.
SYMMETRY_TOLERANCE = 1e-12


def as_float_vector(x, name: str) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def as_float_matrix(x, name: str) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def check_points(x, name: str = "X") -> np.ndarray:
    """Validate an (n, d) point matrix with n >= 2, d >= 1."""
    x = as_float_matrix(x, name)
    if x.shape[0] < 2:
        raise ValueError(f"{name} needs at least 2 points, got {x.shape[0]}")
    if x.shape[1] < 1:
        raise ValueError(f"{name} needs at least 1 coordinate, got shape {x.shape}")
    return x


def check_shape_matrix(m, name: str = "shape") -> np.ndarray:
    """Validate a symmetric positive-definite shape matrix."""
    m = as_float_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    scale = max(float(np.max(np.abs(m))), 1.0)
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOLERANCE * scale:
        raise ValueError(f"{name} is not symmetric")
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None
    return m


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
