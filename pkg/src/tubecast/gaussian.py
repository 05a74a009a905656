"""Probabilities of forecast tubes under the joint error Gaussian.

A value-space tube ``X_{n+i} in [lo_i, hi_i]`` becomes the error-space box
``Err_i in [P_i - hi_i, P_i - lo_i]`` because ``Err = P - X``.  Box
probabilities are estimated by plain Monte Carlo with common random numbers:
the intersection (every step inside), the union (at least one step inside)
and the per-step marginals all come from the same sample set.

The sample stream is split into fixed-size blocks, each seeded from
``(seed, block index)``, so results depend only on ``(seed, samples)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .distribution import ErrorJointDistribution, check_psd
from .errors import DimensionError, NumericalError
from .predictor import ForecastVector

__all__ = [
    "DEFAULT_SAMPLES",
    "DEFAULT_SEED",
    "ForecastTube",
    "ErrorBox",
    "BoxProbability",
    "TubeProbabilities",
    "tube_to_error_box",
    "psd_factor",
    "sample_errors",
    "tube_probabilities",
    "box_probability",
    "union_probability",
]

DEFAULT_SAMPLES = 1_000_000
DEFAULT_SEED = 42
BLOCK = 1 << 16
JITTER = 1e-10


def _bounds(lower, upper):
    lo = np.array(lower, dtype=float)
    hi = np.array(upper, dtype=float)
    if lo.shape != hi.shape or lo.ndim not in (1, 2):
        raise DimensionError(f"lower/upper shapes {lo.shape} and {hi.shape} must match and be 1-D or 2-D")
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
        raise DimensionError("bounds must not be NaN")
    if np.any(lo > hi):
        raise DimensionError("every lower bound must be <= its upper bound")
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


@dataclass(frozen=True, eq=False)
class ForecastTube:
    """Per-step value bounds, shape (h,) or (h, m); +-inf allowed."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = _bounds(self.lower, self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def horizon(self) -> int:
        return self.lower.shape[0]


@dataclass(frozen=True, eq=False)
class ErrorBox:
    """Per-step error bounds, same layout as :class:`ForecastTube`."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = _bounds(self.lower, self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def horizon(self) -> int:
        return self.lower.shape[0]

    @property
    def m(self) -> int:
        return 1 if self.lower.ndim == 1 else self.lower.shape[1]

    def flat(self):
        return self.lower.reshape(-1), self.upper.reshape(-1)


def tube_to_error_box(tube: ForecastTube, forecast: ForecastVector) -> ErrorBox:
    """Map value bounds to error bounds ``[P - upper, P - lower]``.

    >>> box = tube_to_error_box(ForecastTube([4.0], [7.0]), ForecastVector(np.array([5.0])))
    >>> box.lower.tolist(), box.upper.tolist()
    ([-2.0], [1.0])
    """
    P = np.asarray(forecast.values, dtype=float)
    if P.shape != tube.lower.shape:
        raise DimensionError(f"tube has shape {tube.lower.shape} but forecast has shape {P.shape}")
    return ErrorBox(P - tube.upper, P - tube.lower)


@dataclass(frozen=True)
class BoxProbability:
    estimate: float
    standard_error: float
    samples: int
    seed: int

    @classmethod
    def from_count(cls, count: int, samples: int, seed: int) -> "BoxProbability":
        p = count / samples
        return cls(p, math.sqrt(p * (1.0 - p) / samples), samples, seed)


@dataclass(frozen=True)
class TubeProbabilities:
    intersection: BoxProbability
    union: BoxProbability
    marginals: tuple[BoxProbability, ...]


def _pivoted_cholesky(cov: np.ndarray, tol: float) -> np.ndarray:
    """Rank-revealing Cholesky: returns F (dim x rank) with F F^T ~= cov."""
    A = np.array(cov, dtype=float)
    dim = A.shape[0]
    perm = np.arange(dim)
    L = np.zeros((dim, dim))
    diag = np.diag(A).copy()
    rank = 0
    for k in range(dim):
        j = k + int(np.argmax(diag[perm[k:]]))
        if diag[perm[j]] <= tol:
            break
        perm[[k, j]] = perm[[j, k]]
        L[[k, j], :k] = L[[j, k], :k]
        pk = perm[k]
        L[k, k] = math.sqrt(diag[pk])
        rest = perm[k + 1:]
        L[k + 1:, k] = (A[rest, pk] - L[k + 1:, :k] @ L[k, :k]) / L[k, k]
        diag[rest] -= L[k + 1:, k] ** 2
        rank += 1
    F = np.zeros((dim, rank))
    F[perm] = L[:, :rank]
    return F


def psd_factor(cov) -> np.ndarray:
    """A matrix ``F`` with ``F @ F.T`` equal to ``cov`` up to jitter or rank truncation.

    Tries plain Cholesky, then Cholesky with a ``1e-10`` relative diagonal
    jitter, then a pivoted Cholesky that drops numerically null directions.
    """
    cov = np.asarray(cov, dtype=float)
    check_psd(cov)
    if cov.size == 0:
        return cov.copy()
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    scale = max(float(np.max(np.diag(cov))), np.finfo(float).tiny)
    try:
        return np.linalg.cholesky(cov + JITTER * scale * np.eye(cov.shape[0]))
    except np.linalg.LinAlgError:
        pass
    F = _pivoted_cholesky(cov, 1e-12 * scale)
    if not np.all(np.isfinite(F)):
        raise NumericalError("cannot factor covariance")
    return F


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _sample_blocks(F: np.ndarray, samples: int, seed: int):
    for b, start in enumerate(range(0, samples, BLOCK)):
        size = min(BLOCK, samples - start)
        u = _rng(seed, b).standard_normal((size, F.shape[1]))
        yield u @ F.T


def sample_errors(dist: ErrorJointDistribution, samples: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Draw ``samples`` error vectors (rows) from ``dist``; the same stream the estimators use."""
    F = psd_factor(dist.covariance)
    return np.concatenate(list(_sample_blocks(F, samples, seed)), axis=0)


def _check_box(dist: ErrorJointDistribution, box: ErrorBox):
    lo, hi = box.flat()
    if lo.size != dist.dim or box.horizon != dist.horizon:
        raise DimensionError(f"box covers {lo.size} coordinates, distribution has {dist.dim}")
    return lo, hi


def tube_probabilities(dist: ErrorJointDistribution, box: ErrorBox,
                       samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> TubeProbabilities:
    """Intersection, union and per-step probabilities of ``box`` on one shared sample set.

    A step event holds when every coordinate of that step lies in its interval.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    lo, hi = _check_box(dist, box)
    F = psd_factor(dist.covariance)
    n_all = n_any = 0
    steps = np.zeros(dist.horizon, dtype=np.int64)
    for x in _sample_blocks(F, samples, seed):
        a, b, s = kernels.tube_counts(x, lo, hi, dist.m)
        n_all += a
        n_any += b
        steps += s
    return TubeProbabilities(
        BoxProbability.from_count(n_all, samples, seed),
        BoxProbability.from_count(n_any, samples, seed),
        tuple(BoxProbability.from_count(int(c), samples, seed) for c in steps),
    )


def box_probability(dist: ErrorJointDistribution, box: ErrorBox,
                    samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> BoxProbability:
    """P(every step inside its box)."""
    return tube_probabilities(dist, box, samples, seed).intersection


def union_probability(dist: ErrorJointDistribution, box: ErrorBox,
                      samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> BoxProbability:
    """P(at least one step inside its box)."""
    return tube_probabilities(dist, box, samples, seed).union
