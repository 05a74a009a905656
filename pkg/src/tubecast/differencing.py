"""Differencing and the lift from differenced-series errors to series errors."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .distribution import ErrorJointDistribution
from .errors import DimensionError
from .model import SeriesWindow

__all__ = [
    "DifferenceLift",
    "difference",
    "integrate",
    "difference_stencil",
    "build_T_matrix",
    "lift_sigma",
]


def difference(series: SeriesWindow, d: int) -> SeriesWindow:
    """``d``-th difference ``sum_k C(d,k) (-1)^k X_{t-k}``, applied per coordinate.

    >>> difference(SeriesWindow([1.0, 4.0, 9.0, 16.0, 25.0]), 2).values.tolist()
    [2.0, 2.0, 2.0]
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    if series.n <= d:
        raise DimensionError(f"series of length {series.n} is too short to difference {d} times")
    if d == 0:
        return series
    return SeriesWindow(np.diff(series.values, n=d, axis=0))


def integrate(diffed: SeriesWindow, boundary, d: int) -> SeriesWindow:
    """Undo :func:`difference` given the first ``d`` values of the original series."""
    head = np.asarray(boundary, dtype=float)
    if head.shape[0] != d:
        raise DimensionError(f"need {d} boundary values, got {head.shape[0]}")
    if d == 0:
        return diffed
    vals = np.asarray(diffed.values, dtype=float)
    # first element of each lower-order difference, taken from the boundary
    starts = [np.diff(head, n=k, axis=0)[0] for k in range(d)]
    for k in range(d - 1, -1, -1):
        first = starts[k][None] if vals.ndim == 1 else starts[k][None, :]
        vals = np.concatenate([first, first + np.cumsum(vals, axis=0)], axis=0)
    return SeriesWindow(vals)


def difference_stencil(d: int, horizon: int) -> np.ndarray:
    """Lower-triangular ``S`` with ``S[i, i-k] = C(d,k) (-1)^k`` restricted to future steps.

    ``S @ Err(X)`` gives the differenced-series errors, so the lift is ``inv(S)``.
    """
    S = np.zeros((horizon, horizon))
    for i in range(horizon):
        for k in range(min(i, d) + 1):
            S[i, i - k] = comb(d, k) * (-1) ** k
    return S


@dataclass(frozen=True, eq=False)
class DifferenceLift:
    """Unit-lower-triangular Toeplitz map ``Err(X) = T Err(diff^d X)``."""

    d: int
    horizon: int
    T: np.ndarray

    def block(self, m: int) -> np.ndarray:
        """``T`` expanded to the (m*h, m*h) step-major layout, ``T kron I_m``."""
        return np.kron(self.T, np.eye(m))


def build_T_matrix(d: int, horizon: int) -> DifferenceLift:
    """First column ``T[i,1] = sum_{k=1}^{min(i-1,d)} C(d,k) (-1)^{k+1} T[i-k,1]``, shifted down each column."""
    if d < 0 or horizon < 1:
        raise ValueError("need d >= 0 and horizon >= 1")
    col = np.zeros(horizon)
    col[0] = 1.0
    for i in range(1, horizon):
        col[i] = sum(comb(d, k) * (-1) ** (k + 1) * col[i - k] for k in range(1, min(i, d) + 1))
    T = np.zeros((horizon, horizon))
    for j in range(horizon):
        T[j:, j] = col[: horizon - j]
    T.setflags(write=False)
    return DifferenceLift(d, horizon, T)


def lift_sigma(inner: ErrorJointDistribution, lift: DifferenceLift) -> ErrorJointDistribution:
    """Covariance of ``Err(X)`` from the covariance of the differenced-series errors."""
    if inner.horizon != lift.horizon:
        raise DimensionError(f"inner horizon {inner.horizon} does not match lift horizon {lift.horizon}")
    C = lift.block(inner.m)
    cov = C @ inner.covariance @ C.T
    return ErrorJointDistribution(cov, inner.horizon, inner.m, "ErrX", chain=inner.chain)
