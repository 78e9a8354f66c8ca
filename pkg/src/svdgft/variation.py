"""Scalar variation measures of graph signals.

``gdv`` and ``dv`` take the adjacency matrix and sum ``a_ji`` against the
positive part of ``x_i - x_j``; the quadratic forms take the Laplacian.
"""

import numpy as np

from ._errors import GraphValidationError

__all__ = ["quadratic_variation", "l2_variation", "gdv", "dv", "all_metrics"]


def _pair(M, x):
    M = np.asarray(M, dtype=float)
    x = np.asarray(x, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or x.shape != (M.shape[0],):
        raise GraphValidationError(f"signal of shape {x.shape} does not match matrix of shape {M.shape}")
    return M, x


def quadratic_variation(L, x):
    """``x^T L x``; blind to edge direction since it equals ``x^T (L + L^T) x / 2``."""
    L, x = _pair(L, x)
    return float(x @ L @ x)


def l2_variation(L, x):
    """``||L x||_2``."""
    L, x = _pair(L, x)
    return float(np.linalg.norm(L @ x))


def _positive_differences(x):
    return np.maximum(x[:, None] - x[None, :], 0.0)


def gdv(A, x):
    """``sum_{i,j} a_ji (x_i - x_j)_+``."""
    A, x = _pair(A, x)
    return float(np.sum(A.T * _positive_differences(x)))


def dv(A, x):
    """``sum_{i,j} a_ji ((x_i - x_j)_+)^2``."""
    A, x = _pair(A, x)
    return float(np.sum(A.T * _positive_differences(x) ** 2))


def all_metrics(A, L, x):
    return {
        "quadratic_variation": quadratic_variation(L, x),
        "l2_variation": l2_variation(L, x),
        "gdv": gdv(A, x),
        "dv": dv(A, x),
    }
