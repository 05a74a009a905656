"""Zero-mean Gaussian over stacked prediction errors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import NumericalError

__all__ = ["ErrorJointDistribution", "check_psd"]

STAGES = ("ErrY", "ErrDiffX", "ErrX")


def check_psd(cov: np.ndarray, sym_tol: float = 1e-10, eig_rtol: float = 1e-8) -> None:
    """Raise :class:`NumericalError` unless ``cov`` is symmetric and PSD within tolerance."""
    if not np.all(np.isfinite(cov)):
        raise NumericalError("covariance contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(cov)))) if cov.size else 1.0
    if cov.size and np.max(np.abs(cov - cov.T)) > sym_tol * scale:
        raise NumericalError("covariance is not symmetric")
    if cov.size:
        eig = np.linalg.eigvalsh(cov)
        if eig[0] < -eig_rtol * max(eig[-1], 0.0):
            raise NumericalError(f"covariance is not PSD (min eigenvalue {eig[0]:.3g})")


@dataclass(frozen=True, eq=False)
class ErrorJointDistribution:
    """``N(0, covariance)`` over errors stacked step-major: index ``i * m + s``.

    ``stage`` records which process the errors belong to (``"ErrY"`` for the
    AR-filtered MA process, ``"ErrDiffX"`` for the differenced series,
    ``"ErrX"`` for the series itself). ``chain`` keeps the transform matrices
    that produced the covariance, when available.
    """

    covariance: np.ndarray
    horizon: int
    m: int = 1
    stage: str = "ErrX"
    chain: Optional[Any] = field(default=None, repr=False)

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float, copy=True)
        dim = self.horizon * self.m
        if cov.shape != (dim, dim):
            raise NumericalError(f"covariance has shape {cov.shape}, expected ({dim}, {dim})")
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        # products like C S C^T are symmetric only up to rounding
        cov = 0.5 * (cov + cov.T)
        check_psd(cov)
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.horizon * self.m

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(self.dim)

    def step_variances(self) -> np.ndarray:
        """Marginal variances reshaped to (horizon, m)."""
        return np.diag(self.covariance).reshape(self.horizon, self.m)
