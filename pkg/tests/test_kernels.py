import numpy as np
import pytest
from scipy.signal import lfilter

from tubecast import kernels
from tubecast import _pykernels

BACKENDS = kernels.available_backends()


def test_default_backend_listed():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("backend", BACKENDS)
def test_scalar_filter_matches_lfilter(backend, rng):
    z = rng.standard_normal((5, 50, 1))
    phi, th = np.array([0.5, -0.3]), np.array([0.4, 0.2])
    out = kernels.varma_filter(z, phi.reshape(2, 1, 1), th.reshape(2, 1, 1), backend=backend)
    ref = lfilter(np.r_[1, th], np.r_[1, -phi], z[:, :, 0], axis=1)
    assert np.allclose(out[:, :, 0], ref, atol=1e-12)


@pytest.mark.parametrize("p,q", [(0, 0), (1, 0), (0, 2), (2, 2), (3, 1)])
def test_vector_filter_backends_agree(p, q, rng):
    z = rng.standard_normal((4, 40, 2))
    phi = 0.3 * rng.standard_normal((p, 2, 2))
    th = 0.3 * rng.standard_normal((q, 2, 2))
    ref = _pykernels.varma_filter(z, phi, th)
    # direct recursion
    x = np.zeros_like(z)
    for t in range(z.shape[1]):
        x[:, t] = z[:, t]
        for k in range(1, min(q, t) + 1):
            x[:, t] += z[:, t - k] @ th[k - 1].T
        for k in range(1, min(p, t) + 1):
            x[:, t] += x[:, t - k] @ phi[k - 1].T
    assert np.allclose(ref, x, atol=1e-12)
    for b in BACKENDS:
        assert np.allclose(kernels.varma_filter(z, phi, th, backend=b), x, atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_tube_counts_backends_agree(m, rng):
    s = rng.standard_normal((3000, 4 * m))
    lo = rng.uniform(-2, 0, 4 * m)
    hi = rng.uniform(0, 2, 4 * m)
    lo[0] = -np.inf
    ref = _pykernels.tube_counts(s, lo, hi, m)
    inside = ((s >= lo) & (s <= hi)).reshape(3000, 4, m).all(axis=2)
    assert ref[0] == inside.all(axis=1).sum() and ref[1] == inside.any(axis=1).sum()
    assert np.array_equal(ref[2], inside.sum(axis=0))
    for b in BACKENDS:
        got = kernels.tube_counts(s, lo, hi, m, backend=b)
        assert got[0] == ref[0] and got[1] == ref[1] and np.array_equal(got[2], ref[2])


def test_nan_sample_counts_outside():
    s = np.array([[np.nan, 0.0]])
    for b in BACKENDS:
        a, u, st = kernels.tube_counts(s, np.array([-1.0, -1.0]), np.array([1.0, 1.0]), 1, backend=b)
        assert (a, u, st.tolist()) == (0, 1, [0, 1])
