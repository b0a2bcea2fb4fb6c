"""Input validation helpers shared by the estimators and free functions."""
import numbers

import numpy as np
from sklearn.utils.validation import check_array

NORM_SLACK = 1e-12
PROB_TOL = 1e-12


def check_vector(v, n=None, name="v"):
    """Return ``v`` as a finite 1-D float64 array, optionally of length ``n``."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite coordinates")
    if n is not None and arr.size != n:
        raise ValueError(f"{name} has dimension {arr.size}, expected {n}")
    return arr


def check_vectors(X, n=None, name="X"):
    """2-D finite float array of row vectors; 1-D input is read as a column."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    X = check_array(X, dtype=np.float64, ensure_all_finite=True, ensure_min_samples=0)
    if n is not None and X.shape[1] != n:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {n}")
    return X


def check_norm_at_most_one(v, name="v"):
    norm = float(np.linalg.norm(v))
    if norm > 1.0 + NORM_SLACK:
        raise ValueError(f"{name} has l2 norm {norm:.15g} > 1")
    return norm


def check_unit(v, tol=1e-9, name="w"):
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector, has norm {norm:.15g}")
    return norm


def check_probabilities(p, name="probabilities"):
    """Nonnegative finite weights summing to one; never renormalized."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"{name} must be finite and nonnegative")
    total = float(p.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"{name} sum to {total!r}, not 1 within {PROB_TOL}")
    return p


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_open_unit(value, name):
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value
