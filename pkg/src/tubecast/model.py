"""Model definitions, observation windows, validation and config I/O.

Three spec types cover the supported processes:

* :class:`UnivariateArmaSpec` -- stationary ARMA(p, q) with scalar coefficients.
* :class:`ArimaSpec` -- a univariate ARMA model of the ``d``-times differenced series.
* :class:`VarmaSpec` -- vector ARMA(p, q) of dimension ``m`` with optional
  differencing order ``d`` (applied coordinatewise).

All specs are immutable.  Indices in user-facing messages are 1-based
(``Phi[1]`` is the lag-one AR matrix); arrays are 0-based internally.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from .errors import DimensionError, SpecError

__all__ = [
    "UnivariateArmaSpec",
    "ArimaSpec",
    "VarmaSpec",
    "Spec",
    "SeriesWindow",
    "ValidationReport",
    "validate_spec",
    "block_params",
    "as_varma",
    "spec_from_dict",
    "spec_to_dict",
    "load_model",
    "dumps_model",
    "loads_model",
    "load_series",
]


def _float_tuple(values, name: str) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=float)
    if arr.ndim > 1:
        raise SpecError(f"{name} must be a flat sequence of numbers, got shape {arr.shape}")
    arr = arr.reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise SpecError(f"{name} contains non-finite values")
    return tuple(float(x) for x in arr)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UnivariateArmaSpec:
    """Stationary ARMA(p, q): ``X_t - mean = sum phi_i (X_{t-i} - mean) + Z_t + sum theta_j Z_{t-j}``."""

    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    sigma2: float = 1.0
    mean: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", _float_tuple(self.phi, "phi"))
        object.__setattr__(self, "theta", _float_tuple(self.theta, "theta"))
        sigma2 = float(self.sigma2)
        if not (math.isfinite(sigma2) and sigma2 > 0):
            raise SpecError(f"sigma2 must be a finite positive number, got {self.sigma2!r}")
        mean = float(self.mean)
        if not math.isfinite(mean):
            raise SpecError("mean must be finite")
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "mean", mean)

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)

    @property
    def d(self) -> int:
        return 0

    @property
    def m(self) -> int:
        return 1

    @property
    def min_window(self) -> int:
        return self.p + self.q + 1


@dataclass(frozen=True)
class ArimaSpec:
    """ARIMA(p, d, q): ``arma`` models the ``d``-th difference of the series."""

    arma: UnivariateArmaSpec
    d: int = 0

    def __post_init__(self):
        if not isinstance(self.arma, UnivariateArmaSpec):
            raise SpecError("ArimaSpec.arma must be a UnivariateArmaSpec")
        if int(self.d) != self.d or self.d < 0:
            raise SpecError(f"differencing order d must be a nonnegative integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

    p = property(lambda self: self.arma.p)
    q = property(lambda self: self.arma.q)
    phi = property(lambda self: self.arma.phi)
    theta = property(lambda self: self.arma.theta)
    sigma2 = property(lambda self: self.arma.sigma2)
    mean = property(lambda self: self.arma.mean)

    @property
    def m(self) -> int:
        return 1

    @property
    def min_window(self) -> int:
        return self.p + self.q + self.d + 1


@dataclass(frozen=True, eq=False)
class VarmaSpec:
    """Vector ARMA(p, q) of dimension ``m``, optionally differenced ``d`` times.

    ``Phi`` and ``Theta`` are sequences of ``m x m`` matrices (lag 1 first).
    ``sigmaZ`` defaults to the identity; ``mean`` (of the differenced process
    when ``d > 0``) defaults to zero.
    """

    m: int
    Phi: Any = ()
    Theta: Any = ()
    sigmaZ: Any = None
    d: int = 0
    mean: Any = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise SpecError(f"dimension m must be a positive integer, got {self.m!r}")
        m = int(self.m)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "Phi", _frozen(_matrix_stack(self.Phi, m, "Phi")))
        object.__setattr__(self, "Theta", _frozen(_matrix_stack(self.Theta, m, "Theta")))

        sigma = np.eye(m) if self.sigmaZ is None else np.asarray(self.sigmaZ, dtype=float)
        if sigma.ndim == 0 and m == 1:
            sigma = sigma.reshape(1, 1)
        if sigma.shape != (m, m):
            raise SpecError(f"sigmaZ has shape {sigma.shape}, expected ({m}, {m})")
        if not np.all(np.isfinite(sigma)):
            raise SpecError("sigmaZ contains non-finite values")
        if np.max(np.abs(sigma - sigma.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
            raise SpecError("sigmaZ is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        if np.min(np.linalg.eigvalsh(sigma)) <= 0:
            raise SpecError("sigmaZ is not positive definite")
        object.__setattr__(self, "sigmaZ", _frozen(sigma))

        if int(self.d) != self.d or self.d < 0:
            raise SpecError(f"differencing order d must be a nonnegative integer, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

        mean = np.zeros(m) if self.mean is None else np.asarray(self.mean, dtype=float).reshape(-1)
        if mean.shape != (m,):
            raise SpecError(f"mean has length {mean.size}, expected {m}")
        if not np.all(np.isfinite(mean)):
            raise SpecError("mean must be finite")
        object.__setattr__(self, "mean", _frozen(mean))

    @property
    def p(self) -> int:
        return self.Phi.shape[0]

    @property
    def q(self) -> int:
        return self.Theta.shape[0]

    @property
    def min_window(self) -> int:
        return self.p + self.q + self.d + 1

    def __eq__(self, other):
        if not isinstance(other, VarmaSpec):
            return NotImplemented
        return (
            self.m == other.m
            and self.d == other.d
            and np.array_equal(self.Phi, other.Phi)
            and np.array_equal(self.Theta, other.Theta)
            and np.array_equal(self.sigmaZ, other.sigmaZ)
            and np.array_equal(self.mean, other.mean)
        )

    def __hash__(self):
        return hash((self.m, self.d, self.Phi.tobytes(), self.Theta.tobytes(),
                     self.sigmaZ.tobytes(), self.mean.tobytes()))


Spec = Union[UnivariateArmaSpec, ArimaSpec, VarmaSpec]


def _matrix_stack(mats, m: int, name: str) -> np.ndarray:
    items = list(mats)
    out = np.zeros((len(items), m, m))
    for i, mat in enumerate(items, start=1):
        arr = np.asarray(mat, dtype=float)
        if arr.ndim == 0 and m == 1:
            arr = arr.reshape(1, 1)
        if arr.shape != (m, m):
            raise SpecError(f"{name}[{i}] has shape {arr.shape}, expected ({m}, {m})")
        if not np.all(np.isfinite(arr)):
            raise SpecError(f"{name}[{i}] contains non-finite values")
        out[i - 1] = arr
    return out


def block_params(spec: Spec):
    """Return ``(Phi, Theta, sigmaZ, d, mean)`` as arrays of shape (p,m,m), (q,m,m), (m,m), int, (m,)."""
    if isinstance(spec, VarmaSpec):
        return (np.array(spec.Phi), np.array(spec.Theta), np.array(spec.sigmaZ),
                spec.d, np.array(spec.mean))
    arma = spec.arma if isinstance(spec, ArimaSpec) else spec
    return (
        np.asarray(arma.phi, dtype=float).reshape(-1, 1, 1),
        np.asarray(arma.theta, dtype=float).reshape(-1, 1, 1),
        np.array([[arma.sigma2]]),
        spec.d,
        np.array([arma.mean]),
    )


def as_varma(spec: Spec) -> VarmaSpec:
    """Re-express a univariate spec as an ``m = 1`` :class:`VarmaSpec`."""
    if isinstance(spec, VarmaSpec):
        return spec
    Phi, Theta, sigmaZ, d, mean = block_params(spec)
    return VarmaSpec(m=1, Phi=Phi, Theta=Theta, sigmaZ=sigmaZ, d=d, mean=mean)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    causal: bool
    invertible: bool
    ar_min_root_modulus: float
    ma_min_root_modulus: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        # structural problems raise instead of producing a report
        return True


def _min_root_modulus(coefs: np.ndarray) -> float:
    """Smallest |z| solving ``det(I - sum_i A_i z^i) = 0`` for ``coefs`` of shape (k, m, m).

    The roots are reciprocals of the nonzero companion-matrix eigenvalues.
    """
    k, m = coefs.shape[0], coefs.shape[1]
    if k == 0 or not np.any(coefs):
        return math.inf
    comp = np.zeros((k * m, k * m))
    comp[:m, :] = np.concatenate(list(coefs), axis=1)
    if k > 1:
        comp[m:, :-m] = np.eye((k - 1) * m)
    rho = float(np.max(np.abs(np.linalg.eigvals(comp))))
    return math.inf if rho < 1e-300 else 1.0 / rho


def validate_spec(spec: Spec) -> ValidationReport:
    """Check a spec and report causality/invertibility advisories.

    Structural problems (wrong shapes, non-positive-definite ``sigmaZ``,
    ``sigma2 <= 0``) raise :class:`SpecError`. Root-modulus violations are
    returned as warnings only; every downstream construction stays defined.
    """
    if isinstance(spec, (UnivariateArmaSpec, ArimaSpec)):
        arma = spec.arma if isinstance(spec, ArimaSpec) else spec
        # re-run the constructor checks in case the object was mutated via object.__setattr__
        UnivariateArmaSpec(arma.phi, arma.theta, arma.sigma2, arma.mean)
    elif isinstance(spec, VarmaSpec):
        VarmaSpec(spec.m, spec.Phi, spec.Theta, spec.sigmaZ, spec.d, spec.mean)
    else:
        raise SpecError(f"unsupported spec type {type(spec).__name__}")

    Phi, Theta, _, _, _ = block_params(spec)
    ar_mod = _min_root_modulus(Phi)
    ma_mod = _min_root_modulus(-Theta)
    warnings = []
    causal = ar_mod > 1.0
    invertible = ma_mod > 1.0
    if not causal:
        warnings.append(f"AR polynomial has a root of modulus {ar_mod:.6g} <= 1 (not causal)")
    if not invertible:
        warnings.append(f"MA polynomial has a root of modulus {ma_mod:.6g} <= 1 (not invertible)")
    return ValidationReport(causal, invertible, ar_mod, ma_mod, tuple(warnings))


# ---------------------------------------------------------------------------
# observation windows


@dataclass(frozen=True, eq=False)
class SeriesWindow:
    """Observations ``X_1..X_n``: shape (n,) for scalar series or (n, m) for vectors."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.ndim not in (1, 2):
            raise DimensionError(f"series must be 1-D or 2-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise DimensionError("series contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, SeriesWindow):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def as_matrix(self) -> np.ndarray:
        """Values as an (n, m) array."""
        return self.values.reshape(self.n, -1)

    def check_for(self, spec: Spec) -> None:
        if self.m != spec.m:
            raise DimensionError(f"series has {self.m} columns but the model has m = {spec.m}")
        if self.n < spec.min_window:
            raise DimensionError(
                f"series has {self.n} observations; the model needs at least {spec.min_window} "
                "(p + q + d + 1)"
            )


def load_series(path) -> SeriesWindow:
    """Read a CSV with one row per time step and an optional header row."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise DimensionError(f"{path}: no observations")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise DimensionError(f"{path}: {exc}") from None
    if data.size == 0:
        raise DimensionError(f"{path}: no observations")
    if data.shape[1] == 1:
        data = data[:, 0]
    return SeriesWindow(data)


# ---------------------------------------------------------------------------
# config documents


_UNIVARIATE_KEYS = {"m", "p", "q", "d", "phi", "theta", "sigma2", "mean"}
_VARMA_KEYS = {"m", "p", "q", "d", "Phi", "Theta", "sigmaZ", "sigma2", "mean"}


def spec_from_dict(doc: dict) -> Spec:
    """Build a spec from a parsed config mapping.

    Scalar models use ``phi``/``theta``/``sigma2``; vector models (or ``m = 1``
    models routed through the block pipeline) use ``Phi``/``Theta``/``sigmaZ``.
    A ``d`` key produces an :class:`ArimaSpec` for scalar models, even ``d = 0``.
    """
    if not isinstance(doc, dict):
        raise SpecError("model config must be a key/value document")
    m = doc.get("m", 1)
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise SpecError(f"m must be a positive integer, got {m!r}")
    vector = m > 1 or any(k in doc for k in ("Phi", "Theta", "sigmaZ"))
    allowed = _VARMA_KEYS if vector else _UNIVARIATE_KEYS
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise SpecError(f"unknown model keys: {', '.join(unknown)}")
    d = doc.get("d", 0)
    if not isinstance(d, int) or isinstance(d, bool):
        raise SpecError(f"d must be an integer, got {d!r}")

    try:
        if vector:
            sigma = doc.get("sigmaZ")
            if sigma is None and "sigma2" in doc:
                sigma = float(doc["sigma2"]) * np.eye(m)
            spec = VarmaSpec(m=m, Phi=doc.get("Phi", []), Theta=doc.get("Theta", []),
                             sigmaZ=sigma, d=d, mean=doc.get("mean"))
        else:
            arma = UnivariateArmaSpec(phi=doc.get("phi", []), theta=doc.get("theta", []),
                                      sigma2=doc.get("sigma2", 1.0), mean=doc.get("mean", 0.0))
            spec = ArimaSpec(arma, d) if "d" in doc else arma
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from None

    for key in ("p", "q"):
        if key in doc and doc[key] != getattr(spec, key):
            coef = {"p": "Phi" if vector else "phi", "q": "Theta" if vector else "theta"}[key]
            raise SpecError(f"{key} = {doc[key]!r} but {coef} has {getattr(spec, key)} entries")
    return spec


def spec_to_dict(spec: Spec) -> dict:
    """Inverse of :func:`spec_from_dict`; floats are written at full precision."""
    if isinstance(spec, VarmaSpec):
        return {
            "m": spec.m,
            "p": spec.p,
            "q": spec.q,
            "d": spec.d,
            "Phi": spec.Phi.tolist(),
            "Theta": spec.Theta.tolist(),
            "sigmaZ": spec.sigmaZ.tolist(),
            "mean": spec.mean.tolist(),
        }
    arma = spec.arma if isinstance(spec, ArimaSpec) else spec
    out = {
        "m": 1,
        "p": arma.p,
        "q": arma.q,
        "phi": list(arma.phi),
        "theta": list(arma.theta),
        "sigma2": arma.sigma2,
        "mean": arma.mean,
    }
    if isinstance(spec, ArimaSpec):
        out["d"] = spec.d
    return out


def dumps_model(spec: Spec) -> str:
    """Serialize a spec as a TOML document."""
    return tomli_w.dumps(spec_to_dict(spec))


def loads_model(text: str, fmt: str = "toml") -> Spec:
    try:
        doc = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot parse model config: {exc}") from None
    return spec_from_dict(doc)


def load_model(path) -> Spec:
    """Load a model config (TOML, or JSON when the file ends in ``.json``)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read model config {path}: {exc.strerror}") from None
    return loads_model(text, "json" if path.suffix.lower() == ".json" else "toml")
