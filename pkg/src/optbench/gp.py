"""Gaussian-process regression with a Matérn 5/2 kernel.

Inputs are expected in the unit hypercube; the length-scale ``theta`` is
shared by all coordinates and the signal variance is fixed to 1. The prior
mean is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

SQRT5 = np.sqrt(5.0)
DEFAULT_JITTER = 1e-6


class NotPositiveDefiniteError(LinAlgError):
    def __init__(self, pivot: int, jitter: float) -> None:
        super().__init__(
            f"kernel matrix not positive definite at pivot {pivot} (jitter={jitter:g}); "
            "increase the jitter"
        )
        self.pivot = pivot
        self.jitter = jitter


@dataclass(frozen=True)
class KernelParams:
    theta: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ValueError(f"length-scale theta must be positive, got {self.theta}")


def matern52(r: np.ndarray, theta: float) -> np.ndarray:
    """Matérn 5/2 correlation as a function of Euclidean distance ``r``."""
    if not theta > 0:
        raise ValueError(f"length-scale theta must be positive, got {theta}")
    a = np.asarray(r, dtype=float) * (SQRT5 / theta)
    out = np.exp(-a)
    # in-place polynomial keeps large candidate batches cheap
    poly = a * a
    poly /= 3.0
    poly += a
    poly += 1.0
    out *= poly
    return out


def kernel(s: np.ndarray, s2: np.ndarray, params: KernelParams) -> float:
    s = np.asarray(s, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if s.shape != s2.shape:
        raise ValueError(f"dimension mismatch: {s.shape} vs {s2.shape}")
    return float(matern52(np.linalg.norm(s - s2), params.theta))


def pairwise_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Euclidean distances between rows, via one matrix product."""
    sq = A @ B.T
    sq *= -2.0
    sq += np.einsum("ij,ij->i", A, A)[:, None]
    sq += np.einsum("ij,ij->i", B, B)[None, :]
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq, out=sq)


def kernel_matrix(A: np.ndarray, B: np.ndarray, params: KernelParams) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    return matern52(pairwise_distances(A, B), params.theta)


@dataclass(frozen=True)
class GPModel:
    X: np.ndarray
    f: np.ndarray
    params: KernelParams
    jitter: float
    chol: np.ndarray
    alpha: np.ndarray
    chol_inv: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dims(self) -> int:
        return self.X.shape[1]

    def predict(self, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and (clamped) variance for each row of ``S``."""
        S = np.atleast_2d(np.asarray(S, dtype=float))
        if S.shape[1] != self.dims:
            raise ValueError(f"query has {S.shape[1]} dims, model has {self.dims}")
        mu, var = self._moments(S)
        return mu, np.maximum(var, 0.0)

    def predict_point(self, s: np.ndarray) -> tuple[float, float]:
        """Lean single-query path for sequential searches (no shape checks)."""
        diff = self.X - s
        a = np.sqrt((diff * diff).sum(axis=1))
        a *= SQRT5 / self.params.theta
        k = (1.0 + a + a * a / 3.0) * np.exp(-a)
        v = self.chol_inv @ k
        return float(k @ self.alpha), max(1.0 - float(v @ v), 0.0)

    def predict_raw_variance(self, S: np.ndarray) -> np.ndarray:
        """Variance before clamping at zero (for round-off diagnostics)."""
        return self._moments(np.atleast_2d(np.asarray(S, dtype=float)))[1]

    def _moments(self, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Ks = kernel_matrix(self.X, S, self.params)  # n x m
        mu = Ks.T @ self.alpha
        v = self.chol_inv @ Ks
        return mu, 1.0 - np.einsum("ij,ij->j", v, v)


def fit(
    X: np.ndarray,
    f: np.ndarray,
    params: KernelParams,
    jitter: float = DEFAULT_JITTER,
) -> GPModel:
    """Factor ``K + jitter*I`` and precompute ``alpha = (K + jitter*I)^-1 f``.

    Cost is cubic in the number of training points (Cholesky plus the
    inverse of the triangular factor).

    Raises
    ------
    NotPositiveDefiniteError
        If the Cholesky factorization breaks down; the error carries the
        failing pivot so the caller can retry with a larger jitter.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    f = np.asarray(f, dtype=float).ravel()
    if X.shape[0] < 1:
        raise ValueError("need at least one training point")
    if X.shape[0] != f.size:
        raise ValueError(f"{X.shape[0]} inputs but {f.size} targets")
    K = kernel_matrix(X, X, params)
    K[np.diag_indices_from(K)] += jitter
    try:
        L = cholesky(K, lower=True, check_finite=False)
    except LinAlgError as exc:
        # LAPACK reports the order of the failing leading minor
        pivot = _failing_pivot(str(exc))
        raise NotPositiveDefiniteError(pivot, jitter) from exc
    z = solve_triangular(L, f, lower=True, check_finite=False)
    alpha = solve_triangular(L.T, z, lower=False, check_finite=False)
    # explicit inverse factor: every acquisition query becomes a plain matrix product
    L_inv = solve_triangular(L, np.eye(L.shape[0]), lower=True, check_finite=False)
    X = X.copy()
    X.setflags(write=False)
    f = f.copy()
    f.setflags(write=False)
    L.setflags(write=False)
    alpha.setflags(write=False)
    L_inv.setflags(write=False)
    return GPModel(X, f, params, jitter, L, alpha, L_inv)


def _failing_pivot(message: str) -> int:
    digits = "".join(ch if ch.isdigit() else " " for ch in message).split()
    return int(digits[0]) if digits else -1


def posterior(model: GPModel, s: np.ndarray) -> tuple[float, float]:
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise ValueError("posterior expects a single point; use GPModel.predict for batches")
    mu, var = model.predict(s[None, :])
    return float(mu[0]), float(var[0])
