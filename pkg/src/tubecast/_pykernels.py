"""Pure numpy/scipy versions of the compiled kernels."""
import numpy as np
from scipy.signal import lfilter


def varma_filter(z, phi, theta):
    """``x_t = z_t + sum_j theta_j z_{t-j} + sum_i phi_i x_{t-i}`` with zero pre-sample values."""
    z = np.asarray(z, dtype=float)
    B, T, m = z.shape
    p, q = phi.shape[0], theta.shape[0]
    if m == 1:
        b = np.concatenate([[1.0], theta[:, 0, 0]])
        a = np.concatenate([[1.0], -phi[:, 0, 0]])
        return lfilter(b, a, z, axis=1)
    x = z.copy()
    for j in range(1, q + 1):
        x[:, j:] += z[:, : T - j] @ theta[j - 1].T
    if p:
        for t in range(1, T):
            for k in range(1, min(p, t) + 1):
                x[:, t] += x[:, t - k] @ phi[k - 1].T
    return x


def tube_counts(s, lo, hi, m):
    """Count samples inside every step box, inside at least one, and per step."""
    N, dim = s.shape
    inside = (s >= lo) & (s <= hi)
    steps = inside.reshape(N, dim // m, m).all(axis=2)
    return int(steps.all(axis=1).sum()), int(steps.any(axis=1).sum()), steps.sum(axis=0).astype(np.int64)
