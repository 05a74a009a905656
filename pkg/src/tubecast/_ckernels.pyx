"""Compiled kernels: VARMA path recursion and forecast-tube counting.

Signatures and results match ``tubecast._pykernels`` exactly.
"""
import numpy as np


def varma_filter(const double[:, :, ::1] z, const double[:, :, ::1] phi,
                 const double[:, :, ::1] theta):
    """``x_t = z_t + sum_j theta_j z_{t-j} + sum_i phi_i x_{t-i}`` with zero pre-sample values."""
    cdef Py_ssize_t B = z.shape[0], T = z.shape[1], m = z.shape[2]
    cdef Py_ssize_t p = phi.shape[0], q = theta.shape[0]
    out = np.empty((B, T, m), dtype=np.float64)
    cdef double[:, :, ::1] x = out
    cdef Py_ssize_t b, t, r, c, k, kmax
    cdef double acc
    if m == 1:
        _filter_scalar(z, phi, theta, x)
        return out
    for b in range(B):
        for t in range(T):
            for r in range(m):
                acc = z[b, t, r]
                kmax = q if q < t else t
                for k in range(1, kmax + 1):
                    for c in range(m):
                        acc += theta[k - 1, r, c] * z[b, t - k, c]
                kmax = p if p < t else t
                for k in range(1, kmax + 1):
                    for c in range(m):
                        acc += phi[k - 1, r, c] * x[b, t - k, c]
                x[b, t, r] = acc
    return out


cdef void _filter_scalar(const double[:, :, ::1] z, const double[:, :, ::1] phi,
                         const double[:, :, ::1] theta, double[:, :, ::1] x) noexcept nogil:
    cdef Py_ssize_t B = z.shape[0], T = z.shape[1]
    cdef Py_ssize_t p = phi.shape[0], q = theta.shape[0]
    cdef Py_ssize_t b, t, k
    cdef double acc
    cdef const double* zb
    cdef double* xb
    for b in range(B):
        zb = &z[b, 0, 0]
        xb = &x[b, 0, 0]
        for t in range(T):
            acc = zb[t]
            for k in range(1, (q if q < t else t) + 1):
                acc = acc + theta[k - 1, 0, 0] * zb[t - k]
            for k in range(1, (p if p < t else t) + 1):
                acc = acc + phi[k - 1, 0, 0] * xb[t - k]
            xb[t] = acc


def tube_counts(const double[:, ::1] s, const double[::1] lo, const double[::1] hi,
                Py_ssize_t m):
    """Count samples inside every step box, inside at least one, and per step."""
    cdef Py_ssize_t N = s.shape[0], dim = s.shape[1]
    cdef Py_ssize_t h = dim // m
    steps = np.zeros(h, dtype=np.int64)
    cdef long long[::1] sc = steps
    cdef long long n_all = 0, n_any = 0
    cdef Py_ssize_t i, j, c, idx
    cdef bint step_in, all_in, any_in
    cdef double v
    for i in range(N):
        all_in = True
        any_in = False
        for j in range(h):
            step_in = True
            for c in range(m):
                idx = j * m + c
                v = s[i, idx]
                if not (v >= lo[idx] and v <= hi[idx]):
                    step_in = False
                    break
            if step_in:
                sc[j] += 1
                any_in = True
            else:
                all_in = False
        if all_in:
            n_all += 1
        if any_in:
            n_any += 1
    return int(n_all), int(n_any), steps
