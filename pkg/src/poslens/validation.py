"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np

__all__ = ["as_float_matrix", "check_is_fitted"]


def as_float_matrix(X, allow_nan: bool = False) -> np.ndarray:
    """Coerce to a 2-D float64 array, optionally admitting NaN gaps."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={X.ndim}")
    if np.isinf(X).any():
        raise ValueError("matrix contains infinite values")
    if not allow_nan and np.isnan(X).any():
        raise ValueError("matrix contains NaN values")
    return X


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted; call fit() or load() first"
        )
