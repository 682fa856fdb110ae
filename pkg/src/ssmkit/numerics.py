"""Shared numerical primitives for log-domain and Gaussian computations."""

from __future__ import annotations

import numpy as np
from scipy.linalg.lapack import dpstrf

from .errors import DegenerateWeightsError, ModelValidationError

__all__ = [
    "log_sum_exp",
    "normalize_log_weights",
    "effective_sample_size",
    "psd_sampling_factor",
    "gaussian_logpdf",
    "symmetrize",
]

_LOG_2PI = float(np.log(2.0 * np.pi))


def log_sum_exp(values) -> float:
    """log(sum(exp(values))) via max-shift; never overflows for finite input.

    Returns -inf iff every entry is -inf.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty sequence is undefined")
    m = np.max(v)
    if not np.isfinite(m):
        if m == -np.inf:
            return -np.inf
        raise ValueError("log_sum_exp requires entries in [-inf, inf)")
    return float(m + np.log(np.sum(np.exp(v - m))))


def normalize_log_weights(log_weights) -> np.ndarray:
    """exp(logw - log_sum_exp(logw)); sums to 1 within 1e-12.

    Raises DegenerateWeightsError when all entries are -inf.
    """
    lw = np.asarray(log_weights, dtype=float)
    total = log_sum_exp(lw)
    if total == -np.inf:
        raise DegenerateWeightsError("cannot normalize: all log-weights are -inf")
    w = np.exp(lw - total)
    return w / w.sum()


def effective_sample_size(weights: np.ndarray) -> float:
    """1 / sum(w_i^2) for normalized weights; equals N when uniform."""
    w = np.asarray(weights, dtype=float)
    return float(1.0 / np.sum(w * w))


def symmetrize(mat: np.ndarray) -> np.ndarray:
    """(M + M.T) / 2, forcing exact symmetry after accumulated roundoff."""
    return 0.5 * (mat + mat.T)


def psd_sampling_factor(mat: np.ndarray, name: str = "covariance") -> np.ndarray:
    """Lower-triangular-like factor F with mat = F F^T, valid for any PSD matrix.

    Tries a plain Cholesky first; on failure falls back to a pivoted
    factorization with a 1e-12 pivot floor so zero eigenvalues are accepted
    while indefinite matrices are rejected.
    """
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ModelValidationError(f"{name} must be a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    c, piv, rank, info = dpstrf(a, lower=1, tol=1e-12)
    if info < 0:
        raise ModelValidationError(f"{name} factorization failed (LAPACK info={info})")
    scale = float(np.max(np.abs(np.diag(a)))) if n else 0.0
    resid = a[np.ix_(piv - 1, piv - 1)] - np.tril(c)[:, :rank] @ np.tril(c)[:, :rank].T
    if np.max(np.abs(resid)) > 1e-8 * max(scale, 1.0):
        raise ModelValidationError(f"{name} is not positive semidefinite")
    lower = np.tril(c)
    lower[:, rank:] = 0.0
    perm = np.zeros((n, n))
    perm[np.arange(n), piv - 1] = 1.0
    return perm.T @ lower


def gaussian_logpdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> float:
    """Multivariate normal log-density at x; cov must be positive definite."""
    d = mean.shape[0]
    chol = np.linalg.cholesky(cov)
    z = np.linalg.solve(chol, np.asarray(x, dtype=float) - mean)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * (d * _LOG_2PI + logdet + float(z @ z))
