"""Best linear prediction of the MA component and point forecasts of the series.

The series is first AR-filtered, ``Y_t = X_t - sum_i Phi_i X_{t-i}`` for
``t = p+1..n``; ``Y`` is a zero-mean MA(q) process whose best linear predictor
from ``Y_{p+1..n}`` solves a (block) Toeplitz system.  Point forecasts of ``X``
then follow from ``X_{n+i} = Y_{n+i} + sum_k Phi_k X_{n+i-k}``, using observed
values wherever ``n+i-k <= n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.linalg

from .acvf import AcvfTable, ma_acvf, vma_acvf
from .errors import DimensionError, NumericalError
from .model import SeriesWindow, Spec, UnivariateArmaSpec, VarmaSpec, block_params

__all__ = [
    "PredictorCoefficients",
    "ForecastVector",
    "solve_blp",
    "predictor_for",
    "compute_y_series",
    "forecast_mean",
    "forecast_mean_arima",
    "Forecaster",
]

# pivot threshold (relative to the largest Gram diagonal) below which the
# Cholesky solve is abandoned for minimum-norm least squares
PIVOT_RTOL = 1e-12
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class PredictorCoefficients:
    """Predictor weights for steps ``1..horizon``.

    ``coeffs[i - 1, k - 1]`` multiplies ``Y_{n+1-k}`` when predicting
    ``Y_{n+i}``; it is a scalar for univariate models and an ``m x m`` matrix
    for vector models.  ``intercepts`` are zero because ``Y`` has zero mean.
    """

    coeffs: np.ndarray
    intercepts: np.ndarray
    method: str = "cholesky"

    @property
    def horizon(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_eff(self) -> int:
        return self.coeffs.shape[1]

    @property
    def is_block(self) -> bool:
        return self.coeffs.ndim == 4

    def as_blocks(self) -> np.ndarray:
        """Coefficients with shape (horizon, n_eff, m, m), m = 1 for scalar models."""
        if self.is_block:
            return self.coeffs
        return self.coeffs[:, :, None, None]


@dataclass(frozen=True, eq=False)
class ForecastVector:
    """Point forecasts ``P_n X_{n+1..n+h}``: shape (h,) or (h, m)."""

    values: np.ndarray

    @property
    def horizon(self) -> int:
        return self.values.shape[0]


def _psd_solve(G: np.ndarray, R: np.ndarray) -> tuple[np.ndarray, str]:
    """Solve ``G x = R`` for PSD ``G``; singular systems get the minimum-norm solution."""
    diag_max = float(np.max(np.diag(G))) if G.size else 0.0
    method = "cholesky"
    try:
        L = scipy.linalg.cholesky(G, lower=True, check_finite=False)
        if np.min(np.diag(L)) ** 2 < PIVOT_RTOL * diag_max:
            raise np.linalg.LinAlgError("small pivot")
        x = scipy.linalg.cho_solve((L, True), R, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        method = "lstsq"
        x = np.linalg.lstsq(G, R, rcond=None)[0]
    if not np.all(np.isfinite(x)):
        raise NumericalError("predictor solve produced non-finite coefficients")
    resid = G @ x - R
    for col in range(R.shape[1]):
        rn = np.linalg.norm(resid[:, col]) / max(1.0, np.linalg.norm(R[:, col]))
        if rn > RESIDUAL_RTOL:
            raise NumericalError(f"predictor system residual {rn:.3g} exceeds {RESIDUAL_RTOL}")
    return x, method


def solve_blp(acvf: AcvfTable, n_eff: int, horizon: int) -> PredictorCoefficients:
    """Best-linear-predictor weights for ``Y_{n+1..n+horizon}`` from ``n_eff`` past values.

    Scalar: ``sum_k a_k gamma(|i-k|) = gamma(i + h - 1)`` for ``i = 1..n_eff``.
    Block: ``sum_k A_k Gamma(i-k) = Gamma(i + h - 1)``.
    """
    if n_eff < 1:
        raise DimensionError("n_eff must be at least 1")
    if horizon < 1:
        raise DimensionError("horizon must be at least 1")
    if acvf.max_lag < n_eff + horizon - 1:
        raise DimensionError(
            f"autocovariance table covers lags 0..{acvf.max_lag}, need 0..{n_eff + horizon - 1}"
        )

    if not acvf.is_matrix:
        G = acvf.toeplitz(n_eff)
        R = np.array([[acvf.lag(h + i) for h in range(1, horizon + 1)] for i in range(n_eff)])
        x, method = _psd_solve(G, R)
        return PredictorCoefficients(np.ascontiguousarray(x.T), np.zeros(horizon), method)

    m = acvf.m
    # unknowns are the blocks A_k^T stacked by k; block (i, k) of G is Gamma(k - i)
    G = np.empty((n_eff * m, n_eff * m))
    for i in range(n_eff):
        for k in range(n_eff):
            G[i * m:(i + 1) * m, k * m:(k + 1) * m] = acvf.lag(k - i)
    R = np.empty((n_eff * m, horizon * m))
    for h in range(1, horizon + 1):
        for i in range(n_eff):
            R[i * m:(i + 1) * m, (h - 1) * m:h * m] = acvf.lag(i + h).T
    x, method = _psd_solve(G, R)
    coeffs = x.reshape(n_eff, m, horizon, m).transpose(2, 0, 3, 1)
    return PredictorCoefficients(np.ascontiguousarray(coeffs), np.zeros((horizon, m)), method)


def predictor_for(spec: Spec, n: int, horizon: int) -> PredictorCoefficients:
    """Solve the predictor system for the stationary part of ``spec`` given ``n`` observations.

    For models with ``d > 0`` the system is posed on the ``n - d`` differenced values.
    """
    if n < spec.min_window:
        raise DimensionError(
            f"window of {n} observations is shorter than the minimum {spec.min_window} (p + q + d + 1)"
        )
    n_eff = n - spec.d - spec.p
    if isinstance(spec, VarmaSpec):
        table = vma_acvf(spec.Theta, spec.sigmaZ, n_eff + horizon - 1)
    else:
        table = ma_acvf(spec.theta, spec.sigma2, n_eff + horizon - 1)
    return solve_blp(table, n_eff, horizon)


def _ar_filter(X: np.ndarray, Phi: np.ndarray) -> np.ndarray:
    """``Y_t = X_t - sum_k Phi_k X_{t-k}`` over a batch: (B, n, m) -> (B, n - p, m)."""
    p = Phi.shape[0]
    n = X.shape[1]
    Y = X[:, p:].copy()
    for k in range(1, p + 1):
        Y -= X[:, p - k:n - k] @ Phi[k - 1].T
    return Y


def compute_y_series(window: SeriesWindow, spec: Spec) -> SeriesWindow:
    """AR-filtered series ``Y_{p+1..n}`` (no centering is applied).

    >>> compute_y_series(SeriesWindow([2.0, 3.0, 4.0]), UnivariateArmaSpec(phi=[0.5])).values.tolist()
    [2.0, 2.5]
    """
    Phi = block_params(spec)[0]
    if window.m != Phi.shape[1]:
        raise DimensionError(f"series has {window.m} columns, model has m = {Phi.shape[1]}")
    if window.n < Phi.shape[0] + 1:
        raise DimensionError(f"window of {window.n} values is too short for p = {Phi.shape[0]}")
    Y = _ar_filter(window.as_matrix()[None], Phi)[0]
    return SeriesWindow(Y[:, 0] if window.values.ndim == 1 else Y)


class Forecaster:
    """Point forecaster for a fixed ``(spec, n, horizon)``, applied to batches of windows.

    Calling the instance on an array of shape (B, n) or (B, n, m) returns
    forecasts of shape (B, horizon) or (B, horizon, m).  The simulation oracle
    uses the same object, so its errors are those of this exact predictor.
    """

    def __init__(self, spec: Spec, n: int, horizon: int, coeffs: PredictorCoefficients | None = None):
        if horizon < 1:
            raise DimensionError("horizon must be at least 1")
        self.spec = spec
        self.n = n
        self.horizon = horizon
        self.coeffs = coeffs if coeffs is not None else predictor_for(spec, n, horizon)
        if self.coeffs.horizon < horizon or self.coeffs.n_eff != n - spec.d - spec.p:
            raise DimensionError("predictor coefficients do not match this window/horizon")
        self.Phi, _, _, self.d, self.mean = block_params(spec)
        self.m = self.Phi.shape[1]
        A = self.coeffs.as_blocks()[:horizon]
        h, N, m = A.shape[0], A.shape[1], self.m
        # W[k*m + c, i*m + r] = A[i, k, r, c], so flat(Y reversed) @ W stacks P_n Y
        self._W = np.ascontiguousarray(A.transpose(1, 3, 0, 2).reshape(N * m, h * m))

    def _stationary(self, W: np.ndarray) -> np.ndarray:
        """Forecast a batch of (centered) stationary windows (B, N, m) -> (B, h, m)."""
        Y = _ar_filter(W, self.Phi)
        # column k of the weights multiplies Y_{n+1-k}, k = 1 is the latest value
        B = W.shape[0]
        p, N, h = self.Phi.shape[0], W.shape[1], self.horizon
        PY = (np.ascontiguousarray(Y[:, ::-1]).reshape(B, -1) @ self._W).reshape(B, h, self.m)
        ext = np.concatenate([W, np.zeros((W.shape[0], h, self.m))], axis=1)
        for i in range(h):
            t = N + i
            val = PY[:, i].copy()
            for k in range(1, p + 1):
                val += ext[:, t - k] @ self.Phi[k - 1].T
            ext[:, t] = val
        return ext[:, N:]

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 2
        if squeeze:
            X = X[:, :, None]
        if X.ndim != 3 or X.shape[2] != self.m:
            raise DimensionError(f"expected windows of shape (B, n, {self.m}), got {X.shape}")
        if X.shape[1] != self.n:
            raise DimensionError(f"expected windows of length {self.n}, got {X.shape[1]}")
        d, h = self.d, self.horizon
        W = np.diff(X, n=d, axis=1) if d else X
        PW = self._stationary(W - self.mean) + self.mean
        if d == 0:
            out = PW
        else:
            # X_{n+i} = W_{n+i} - sum_{k=1}^{d} C(d,k) (-1)^k X_{n+i-k}
            ext = np.concatenate([X[:, -d:], np.zeros((X.shape[0], h, self.m))], axis=1)
            for i in range(h):
                t = d + i
                val = PW[:, i].copy()
                for k in range(1, d + 1):
                    val -= comb(d, k) * (-1) ** k * ext[:, t - k]
                ext[:, t] = val
            out = ext[:, d:]
        return out[:, :, 0] if squeeze else out


def forecast_mean(window: SeriesWindow, spec: Spec, horizon: int,
                  coeffs: PredictorCoefficients | None = None) -> ForecastVector:
    """Point forecasts for a stationary model (``d = 0``)."""
    if spec.d != 0:
        raise DimensionError("forecast_mean handles d = 0 only; use forecast_mean_arima")
    return _forecast(window, spec, horizon, coeffs)


def forecast_mean_arima(window: SeriesWindow, spec: Spec, horizon: int,
                        coeffs: PredictorCoefficients | None = None) -> ForecastVector:
    """Point forecasts for an integrated model, lifted from the differenced forecasts.

    Observed values enter the lift wherever the lagged index is at most ``n``;
    ``d = 0`` reduces to :func:`forecast_mean`.
    """
    return _forecast(window, spec, horizon, coeffs)


def _forecast(window, spec, horizon, coeffs):
    window.check_for(spec)
    fc = Forecaster(spec, window.n, horizon, coeffs)
    out = fc(window.as_matrix()[None])[0]
    if window.values.ndim == 1:
        out = out[:, 0]
    return ForecastVector(out)
