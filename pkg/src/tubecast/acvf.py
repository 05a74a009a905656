"""Autocovariance of the moving-average component.

The prediction pipeline only ever predicts the AR-filtered process
``Y_t = X_t - sum phi_i X_{t-i}``, which is MA(q); its autocovariance is exact
and vanishes beyond lag ``q``, so no truncation is involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = ["AcvfTable", "ma_acvf", "vma_acvf"]


@dataclass(frozen=True, eq=False)
class AcvfTable:
    """Autocovariances at lags ``0..max_lag``.

    ``values`` has shape ``(max_lag + 1,)`` for a scalar process or
    ``(max_lag + 1, m, m)`` for a vector process, where
    ``values[h] = Cov(Y_{t+h}, Y_t)``.  Negative lags of the matrix table are
    served by :meth:`lag` through ``Gamma(-h) = Gamma(h).T``.
    """

    values: np.ndarray

    @property
    def max_lag(self) -> int:
        return self.values.shape[0] - 1

    @property
    def is_matrix(self) -> bool:
        return self.values.ndim == 3

    @property
    def m(self) -> int:
        return self.values.shape[1] if self.is_matrix else 1

    def lag(self, h: int):
        k = abs(h)
        if k > self.max_lag:
            shape = (self.m, self.m) if self.is_matrix else ()
            return np.zeros(shape) if shape else 0.0
        g = self.values[k]
        if self.is_matrix and h < 0:
            return g.T
        return g

    def toeplitz(self, size: int) -> np.ndarray:
        """Covariance matrix of ``(Y_1, ..., Y_size)`` (block form for vector tables)."""
        if not self.is_matrix:
            g = np.array([self.lag(k) for k in range(size)], dtype=float)
            idx = np.abs(np.subtract.outer(np.arange(size), np.arange(size)))
            return g[idx]
        m = self.m
        out = np.empty((size * m, size * m))
        for i in range(size):
            for j in range(size):
                # Cov(Y_{i}, Y_{j}) = Gamma(i - j)
                out[i * m:(i + 1) * m, j * m:(j + 1) * m] = self.lag(i - j)
        return out


def ma_acvf(theta, sigma2: float, max_lag: int) -> AcvfTable:
    """Autocovariance ``gamma(h) = sigma2 * sum_j theta_j theta_{j+h}`` with ``theta_0 = 1``.

    >>> ma_acvf([0.5], 1.0, 2).values.tolist()
    [1.25, 0.5, 0.0]
    """
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    psi = np.concatenate([[1.0], np.asarray(theta, dtype=float).reshape(-1)])
    q = psi.size - 1
    out = np.zeros(max_lag + 1)
    # same summation order as vma_acvf, so m = 1 models agree bit for bit
    for h in range(min(q, max_lag) + 1):
        for j in range(q + 1 - h):
            out[h] += psi[j + h] * sigma2 * psi[j]
    return AcvfTable(out)


def vma_acvf(Theta, sigmaZ, max_lag: int) -> AcvfTable:
    """Matrix autocovariance ``Gamma(h) = sum_j Theta_{j+h} Sigma_Z Theta_j^T`` with ``Theta_0 = I``."""
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    sigma = np.atleast_2d(np.asarray(sigmaZ, dtype=float))
    m = sigma.shape[0]
    if sigma.shape != (m, m):
        raise DimensionError(f"sigmaZ has shape {sigma.shape}, expected square")
    Theta = np.asarray(Theta, dtype=float)
    if Theta.size == 0:
        Theta = np.zeros((0, m, m))
    if Theta.ndim != 3 or Theta.shape[1:] != (m, m):
        raise DimensionError(f"Theta has shape {Theta.shape}, expected (q, {m}, {m})")
    psi = np.concatenate([np.eye(m)[None], Theta])
    q = Theta.shape[0]
    out = np.zeros((max_lag + 1, m, m))
    for h in range(min(q, max_lag) + 1):
        for j in range(q + 1 - h):
            out[h] += psi[j + h] @ sigma @ psi[j].T
    return AcvfTable(out)
