"""Transform matrices from innovations to prediction errors, and the joint error covariance.

With ``Z`` the innovations ``Z_{p-q+1}, ..., Z_{n+h}`` (length ``n_eff + q + h``,
``n_eff = n - p``), the errors of the MA process ``Y`` are

    Err(Y) = (C3 @ C2star - C1star) @ Z

and the errors of ``X`` follow from the unit-lower-triangular lift
``Err(X) = C_ErrYtoErrX @ Err(Y)``.  Vector models use the same stencils
with ``m x m`` blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acvf import ma_acvf, vma_acvf
from .differencing import build_T_matrix, lift_sigma
from .distribution import ErrorJointDistribution
from .errors import DimensionError
from .model import ArimaSpec, SeriesWindow, Spec, UnivariateArmaSpec, VarmaSpec
from .predictor import PredictorCoefficients, solve_blp

__all__ = [
    "TransformChain",
    "build_C1",
    "build_C2",
    "build_C3",
    "build_chain",
    "sigma_err_y",
    "build_err_y_to_err_x",
    "sigma_err_x",
]


def _blocks(coefs, m: int) -> np.ndarray:
    arr = np.asarray(coefs, dtype=float)
    if arr.size == 0:
        return np.zeros((0, m, m))
    if m == 1 and arr.ndim == 1:
        return arr.reshape(-1, 1, 1)
    if arr.ndim != 3 or arr.shape[1:] != (m, m):
        raise DimensionError(f"coefficients have shape {arr.shape}, expected (k, {m}, {m})")
    return arr


def _ma_band(theta, q: int, rows: int, m: int) -> np.ndarray:
    """Rows ``(Theta_q, ..., Theta_1, I)`` shifted one block right per row."""
    Th = _blocks(theta, m)
    if Th.shape[0] != q:
        raise DimensionError(f"expected {q} MA coefficients, got {Th.shape[0]}")
    band = np.concatenate([np.eye(m)[None], Th])  # band[j] = Theta_j
    out = np.zeros((rows * m, (rows + q) * m))
    for i in range(rows):
        for j in range(q + 1):
            c = q + i - j
            out[i * m:(i + 1) * m, c * m:(c + 1) * m] = band[j]
    return out


def build_C1(theta, q: int, horizon: int, m: int = 1) -> np.ndarray:
    """Map ``Z_{n-q+1..n+h}`` to the future MA values ``Y_{n+1..n+h}``.

    >>> build_C1([0.5], 1, 2).tolist()
    [[0.5, 1.0, 0.0], [0.0, 0.5, 1.0]]
    """
    if horizon < 1:
        raise DimensionError("horizon must be at least 1")
    return _ma_band(theta, q, horizon, m)


def build_C2(theta, q: int, n_eff: int, m: int = 1) -> np.ndarray:
    """Map ``Z_{p-q+1..n}`` to the observed MA values ``Y_{p+1..n}``."""
    if n_eff < 1:
        raise DimensionError("n_eff must be at least 1")
    return _ma_band(theta, q, n_eff, m)


def build_C3(coeffs: PredictorCoefficients) -> np.ndarray:
    """Predictor weights laid out against ``Y_{p+1..n}`` in time order.

    Column ``k`` (1-based) holds ``a^i_{n_eff+1-k}``, so ``C3 @ Y_{p+1..n}``
    gives ``P_n Y_{n+1..n+h}``.
    """
    A = coeffs.as_blocks()[:, ::-1]
    h, N, m, _ = A.shape
    return A.transpose(0, 2, 1, 3).reshape(h * m, N * m)


@dataclass(frozen=True, eq=False)
class TransformChain:
    C1: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    C1star: np.ndarray
    C2star: np.ndarray
    CZtoErrY: np.ndarray
    CErrYtoErrX: np.ndarray
    m: int
    horizon: int
    n_eff: int
    q: int


def build_err_y_to_err_x(phi, p: int, horizon: int, m: int = 1) -> np.ndarray:
    """Unit-lower-triangular lift with first column ``c_1 = I``, ``c_i = sum_{k<=min(p,i-1)} Phi_k c_{i-k}``."""
    if horizon < 1:
        raise DimensionError("horizon must be at least 1")
    if m == 1 and np.ndim(phi) <= 1:
        phi = np.asarray(phi, dtype=float).reshape(-1)
        if phi.size != p:
            raise DimensionError(f"expected {p} AR coefficients, got {phi.size}")
        col = np.zeros(horizon)
        col[0] = 1.0
        for i in range(1, horizon):
            col[i] = sum(phi[k - 1] * col[i - k] for k in range(1, min(p, i) + 1))
        out = np.zeros((horizon, horizon))
        for j in range(horizon):
            out[j:, j] = col[: horizon - j]
        return out

    Ph = _blocks(phi, m)
    if Ph.shape[0] != p:
        raise DimensionError(f"expected {p} AR coefficients, got {Ph.shape[0]}")
    col = np.zeros((horizon, m, m))
    col[0] = np.eye(m)
    for i in range(1, horizon):
        for k in range(1, min(p, i) + 1):
            col[i] += Ph[k - 1] @ col[i - k]
    out = np.zeros((horizon * m, horizon * m))
    for i in range(horizon):
        for j in range(i + 1):
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = col[i - j]
    return out


def build_chain(theta, phi, q: int, p: int, coeffs: PredictorCoefficients, m: int = 1) -> TransformChain:
    h, N = coeffs.horizon, coeffs.n_eff
    C1 = build_C1(theta, q, h, m)
    C2 = build_C2(theta, q, N, m)
    C3 = build_C3(coeffs)
    C1star = np.hstack([np.zeros((h * m, N * m)), C1])
    C2star = np.hstack([C2, np.zeros((N * m, h * m))])
    CZ = C3 @ C2star - C1star
    lift = build_err_y_to_err_x(phi, p, h, m)
    return TransformChain(C1, C2, C3, C1star, C2star, CZ, lift, m, h, N, q)


def sigma_err_y(chain: TransformChain, sigmaZ) -> ErrorJointDistribution:
    """``CZtoErrY @ Sigma_Z @ CZtoErrY.T`` with ``Sigma_Z = I kron sigmaZ``.

    ``sigmaZ`` is the per-step innovation variance (scalar) or covariance (m x m).
    """
    S = np.atleast_2d(np.asarray(sigmaZ, dtype=float))
    m = chain.m
    if S.shape != (m, m):
        raise DimensionError(f"sigmaZ has shape {S.shape}, expected ({m}, {m})")
    CZ = chain.CZtoErrY
    if CZ.shape[1] != (chain.n_eff + chain.q + chain.horizon) * m:
        raise DimensionError("transform chain dimensions are inconsistent")
    if m == 1:
        cov = S[0, 0] * (CZ @ CZ.T)
    else:
        L = CZ.shape[1] // m
        # Z is block diagonal in time, so apply sigmaZ block by block
        CZS = (CZ.reshape(-1, L, m) @ S).reshape(CZ.shape)
        cov = CZS @ CZ.T
    return ErrorJointDistribution(cov, chain.horizon, m, "ErrY", chain=chain)


def _n_of(window) -> int:
    if isinstance(window, SeriesWindow):
        return window.n
    if int(window) != window:
        raise DimensionError("window must be a SeriesWindow or an integer length")
    return int(window)


def sigma_err_x(spec: Spec, window, horizon: int) -> ErrorJointDistribution:
    """Joint covariance of ``Err(X_{n+1..n+h})`` for any supported model.

    ``window`` may be the observed :class:`SeriesWindow` or just its length
    ``n``; the covariance never depends on the observed values.  Models with
    ``d > 0`` are handled on the differenced series and lifted with the
    differencing map.
    """
    n = _n_of(window)
    if isinstance(window, SeriesWindow) and window.m != spec.m:
        raise DimensionError(f"series has {window.m} columns but the model has m = {spec.m}")
    if n < spec.min_window:
        raise DimensionError(
            f"window of {n} observations is shorter than the minimum {spec.min_window} (p + q + d + 1)"
        )
    if horizon < 1:
        raise DimensionError("horizon must be at least 1")
    d = spec.d
    n_eff = n - d - spec.p

    if isinstance(spec, VarmaSpec):
        m = spec.m
        table = vma_acvf(spec.Theta, spec.sigmaZ, n_eff + horizon - 1)
        coeffs = solve_blp(table, n_eff, horizon)
        chain = build_chain(spec.Theta, spec.Phi, spec.q, spec.p, coeffs, m)
        err_y = sigma_err_y(chain, spec.sigmaZ)
    elif isinstance(spec, (UnivariateArmaSpec, ArimaSpec)):
        m = 1
        table = ma_acvf(spec.theta, spec.sigma2, n_eff + horizon - 1)
        coeffs = solve_blp(table, n_eff, horizon)
        chain = build_chain(spec.theta, spec.phi, spec.q, spec.p, coeffs)
        err_y = sigma_err_y(chain, spec.sigma2)
    else:
        raise TypeError(f"unsupported spec type {type(spec).__name__}")

    C = chain.CErrYtoErrX
    stage = "ErrX" if d == 0 else "ErrDiffX"
    inner = ErrorJointDistribution(C @ err_y.covariance @ C.T, horizon, m, stage, chain=chain)
    if d == 0:
        return inner
    return lift_sigma(inner, build_T_matrix(d, horizon))
