"""Input validation helpers shared by the estimators and IO layers."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue

# Seeds may be any Python int; numpy wants a non-negative entropy value.
_SEED_MASK = 0xFFFFFFFFFFFFFFFF


def normalize_seed(seed: int) -> int:
    return int(seed) & _SEED_MASK


def as_frame_array(X, name: str = "X") -> np.ndarray:
    """Coerce a FeatureMatrix or array-like into a float64 (n_frames, dim) array."""
    values = getattr(X, "values", X)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one feature column")
    if arr.size and not np.isfinite(arr).all():
        raise NonFiniteValue(f"{name} contains non-finite values")
    return arr


def stack_frames(features) -> np.ndarray:
    """Stack one or many feature matrices into a single (N, dim) float64 array.

    Accepts a single 2-D array/FeatureMatrix or a sequence of them; all inputs
    must agree on dim.
    """
    if hasattr(features, "values") or (
        isinstance(features, np.ndarray) and features.ndim == 2
    ):
        features = [features]
    arrays = [as_frame_array(f, name=f"features[{i}]") for i, f in enumerate(features)]
    if not arrays:
        return np.empty((0, 1), dtype=np.float64)
    dim = arrays[0].shape[1]
    for i, arr in enumerate(arrays):
        if arr.shape[1] != dim:
            raise DimensionMismatch(
                f"features[{i}] has dim {arr.shape[1]}, expected {dim}"
            )
    return np.concatenate(arrays, axis=0) if len(arrays) > 1 else arrays[0]


def require_positive_int(name: str, value) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def require_non_negative(name: str, value) -> float:
    value = float(value)
    if not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value
