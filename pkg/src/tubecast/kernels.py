"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
implementations are used.  ``TUBECAST_BACKEND=python`` forces the fallback and
``TUBECAST_BACKEND=compiled`` makes a missing extension an import error.
"""
import os

import numpy as np

from . import _pykernels

BACKEND_ENV = "TUBECAST_BACKEND"

_choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
if _choice not in ("auto", "compiled", "python"):
    raise ImportError(f"{BACKEND_ENV} must be auto, compiled or python, got {_choice!r}")

_compiled = None
if _choice != "python":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        if _choice == "compiled":
            raise

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels


def available_backends():
    return ("compiled", "python") if _compiled is not None else ("python",)


def get_backend(name=None):
    """Kernel module for ``name`` (defaults to the selected backend)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def varma_filter(z, phi, theta, backend=None):
    """Run the VARMA recursion over a batch of innovation paths of shape (B, T, m)."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    m = z.shape[2]
    phi = np.ascontiguousarray(np.asarray(phi, dtype=np.float64).reshape(-1, m, m))
    theta = np.ascontiguousarray(np.asarray(theta, dtype=np.float64).reshape(-1, m, m))
    return get_backend(backend).varma_filter(z, phi, theta)


def tube_counts(samples, lo, hi, m=1, backend=None):
    """``(n_all, n_any, per_step)`` counts of samples inside step boxes; step-major layout."""
    s = np.ascontiguousarray(samples, dtype=np.float64)
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    if s.ndim != 2 or lo.shape != (s.shape[1],) or hi.shape != lo.shape or s.shape[1] % m:
        raise ValueError("samples must be (N, h*m) with matching bounds")
    return get_backend(backend).tube_counts(s, lo, hi, int(m))
