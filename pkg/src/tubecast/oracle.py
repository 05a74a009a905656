"""Simulation oracle: sample paths, realized prediction errors, and their covariance.

Paths are generated by running the VARMA recursion forward from zero
pre-sample values, discarding a burn-in, then integrating ``d`` times.  The
point forecasts come from the pipeline's own :class:`~tubecast.predictor.Forecaster`
(the claim under test is the error law of that predictor); the randomness is
independent of the analytic covariance.

Paths are drawn in fixed-size blocks seeded from ``(seed, block index)``, so the
ensemble for a given ``(seed, paths)`` is reproducible regardless of how the
blocks are scheduled.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import stats

from . import kernels
from .errors import DimensionError
from .model import Spec, block_params
from .predictor import Forecaster

__all__ = [
    "SimulationEnsemble",
    "EmpiricalCovariance",
    "ComparisonReport",
    "default_burn_in",
    "simulate_paths",
    "empirical_error_covariance",
    "compare_covariance",
    "whitened_moments",
]

PATH_BLOCK = 8192
_STREAM_TAG = 7  # keeps simulation streams distinct from tube-probability streams


def default_burn_in(spec: Spec) -> int:
    return 50 * max(1, spec.p + spec.q)


@dataclass(frozen=True, eq=False)
class SimulationEnsemble:
    """Realized errors ``Err(X_{n+1..n+h}) = P_n X - X`` per path, step-major columns."""

    spec: Spec
    n: int
    horizon: int
    paths: int
    seed: int
    burn_in: int
    errors: np.ndarray
    observed: Optional[np.ndarray] = None
    future: Optional[np.ndarray] = None

    @property
    def m(self) -> int:
        return self.spec.m

    def to_csv(self, path) -> None:
        """Dump kept paths (observed then future values), one row per path and time step."""
        if self.observed is None:
            raise ValueError("ensemble was simulated without keep_paths=True")
        full = np.concatenate([self.observed, self.future], axis=1)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["path", "t"] + [f"x{s + 1}" for s in range(full.shape[2])])
            for b in range(full.shape[0]):
                for t in range(full.shape[1]):
                    w.writerow([b, t + 1] + [repr(float(v)) for v in full[b, t]])


def simulate_paths(spec: Spec, n: int, horizon: int, paths: int, seed: int, *,
                   burn_in: Optional[int] = None,
                   forecaster: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                   keep_paths: bool = False, backend: Optional[str] = None) -> SimulationEnsemble:
    """Simulate ``paths`` windows of length ``n`` plus ``horizon`` future values and their errors.

    ``forecaster`` maps a (B, n, m) batch of windows to (B, horizon, m)
    forecasts; it defaults to the pipeline forecaster for ``(spec, n, horizon)``.
    """
    if paths < 1:
        raise ValueError("paths must be positive")
    if n < spec.min_window:
        raise DimensionError(f"n = {n} is below the minimum window {spec.min_window}")
    floor = default_burn_in(spec)
    burn_in = floor if burn_in is None else int(burn_in)
    if burn_in < floor:
        raise ValueError(f"burn_in must be at least {floor} for this model")
    Phi, Theta, sigmaZ, d, mean = block_params(spec)
    m = sigmaZ.shape[0]
    chol = np.linalg.cholesky(sigmaZ)
    if forecaster is None:
        forecaster = Forecaster(spec, n, horizon)
    T = burn_in + n + horizon

    errs, obs, fut = [], [], []
    for b, start in enumerate(range(0, paths, PATH_BLOCK)):
        size = min(PATH_BLOCK, paths - start)
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(seed, spawn_key=(_STREAM_TAG, b))))
        z = rng.standard_normal((size, T, m)) @ chol.T
        x = kernels.varma_filter(z, Phi, Theta, backend=backend)[:, burn_in:] + mean
        for _ in range(d):
            x = np.cumsum(x, axis=1)
        window, truth = x[:, :n], x[:, n:]
        pred = np.asarray(forecaster(window)).reshape(size, horizon, m)
        errs.append((pred - truth).reshape(size, horizon * m))
        if keep_paths:
            obs.append(window)
            fut.append(truth)
    return SimulationEnsemble(
        spec, n, horizon, paths, seed, burn_in, np.concatenate(errs),
        np.concatenate(obs) if keep_paths else None,
        np.concatenate(fut) if keep_paths else None,
    )


@dataclass(frozen=True, eq=False)
class EmpiricalCovariance:
    mean: np.ndarray
    mean_se: np.ndarray
    covariance: np.ndarray
    covariance_se: np.ndarray
    paths: int

    @property
    def mean_z(self) -> np.ndarray:
        return self.mean / self.mean_se


def empirical_error_covariance(ensemble: SimulationEnsemble,
                               forecaster: Optional[Callable] = None) -> EmpiricalCovariance:
    """Sample mean and covariance of the realized errors, with per-entry standard errors.

    The standard error of entry ``(i, j)`` is the sample standard deviation of
    the centered products ``e_i e_j`` over ``sqrt(paths)``.  Passing
    ``forecaster`` recomputes the errors from kept paths.
    """
    E = ensemble.errors
    if forecaster is not None:
        if ensemble.observed is None:
            raise ValueError("recomputing errors needs an ensemble simulated with keep_paths=True")
        pred = np.asarray(forecaster(ensemble.observed)).reshape(ensemble.future.shape)
        E = (pred - ensemble.future).reshape(ensemble.paths, -1)
    N = E.shape[0]
    if N < 2:
        raise ValueError("need at least two paths")
    mean = E.mean(axis=0)
    C = E - mean
    prods = C[:, :, None] * C[:, None, :]
    cov = prods.sum(axis=0) / (N - 1)
    se = prods.std(axis=0, ddof=1) / np.sqrt(N)
    mean_se = C.std(axis=0, ddof=1) / np.sqrt(N)
    return EmpiricalCovariance(mean, mean_se, 0.5 * (cov + cov.T), se, N)


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    z: np.ndarray
    max_abs_z: float
    frobenius_rel: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_z <= self.threshold)


def compare_covariance(analytic, empirical, se, threshold: float = 4.0) -> ComparisonReport:
    """Entrywise z-scores ``(empirical - analytic) / se``.

    A zero standard error counts as ``z = 0`` when the entries agree exactly
    and ``z = inf`` otherwise.
    """
    A = np.asarray(analytic, dtype=float)
    E = np.asarray(empirical, dtype=float)
    S = np.asarray(se, dtype=float) * np.ones_like(A)
    if A.shape != E.shape:
        raise DimensionError(f"analytic {A.shape} and empirical {E.shape} shapes differ")
    diff = E - A
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(S > 0, diff / np.where(S > 0, S, 1.0), np.where(diff == 0, 0.0, np.inf))
    norm = np.linalg.norm(A)
    frob = np.linalg.norm(diff) / norm if norm > 0 else float(np.linalg.norm(diff))
    max_abs = float(np.max(np.abs(z))) if z.size else 0.0
    return ComparisonReport(z, max_abs, float(frob), float(threshold))


def whitened_moments(errors: np.ndarray, covariance: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Skewness and excess kurtosis of each coordinate of ``L^{-1} e`` with ``L L^T = covariance``."""
    L = np.linalg.cholesky(np.asarray(covariance, dtype=float))
    W = np.linalg.solve(L, np.asarray(errors, dtype=float).T).T
    return stats.skew(W, axis=0), stats.kurtosis(W, axis=0, fisher=True)
