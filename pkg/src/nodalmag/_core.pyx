# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_core_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def sign_changes(const long long[::1] eu, const long long[::1] ev, const double[::1] f):
    cdef Py_ssize_t k, m = eu.shape[0]
    cdef long count = 0
    for k in range(m):
        if f[eu[k]] * f[ev[k]] < 0.0:
            count += 1
    return count


def pt_hessian(const double[::1] evals, const double[:, :] evecs, Py_ssize_t n,
               const long long[::1] su, const long long[::1] sv):
    cdef Py_ssize_t d = evecs.shape[0]
    cdef Py_ssize_t beta = su.shape[0]
    cdef Py_ssize_t m, j, k, u, v
    cdef double lam, w
    out_arr = np.zeros((beta, beta))
    if beta == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr
    cdef double[::1] c = np.empty(beta)
    lam = evals[n]
    for j in range(beta):
        u = su[j]
        v = sv[j]
        out[j, j] = 2.0 * evecs[u, n] * evecs[v, n]
    for m in range(d):
        if m == n:
            continue
        for j in range(beta):
            u = su[j]
            v = sv[j]
            c[j] = evecs[u, n] * evecs[v, m] - evecs[u, m] * evecs[v, n]
        w = 2.0 / (lam - evals[m])
        for j in range(beta):
            for k in range(j, beta):
                out[j, k] += w * c[j] * c[k]
    for j in range(beta):
        for k in range(j):
            out[j, k] = out[k, j]
    return out_arr


def interlace_violations(const double[:, :] mag, const double[:, :] cut,
                         const long long[::1] shift, double tol):
    cdef Py_ssize_t rows = mag.shape[0], d = mag.shape[1]
    cdef Py_ssize_t r, i, lo, hi, p
    cdef long bad = 0
    cdef double x
    for r in range(rows):
        p = shift[r]
        for i in range(d):
            x = mag[r, i]
            lo = i - p
            hi = i - p + 1
            if lo >= 0 and cut[r, lo] > x + tol:
                bad += 1
            if hi <= d - 1 and x > cut[r, hi] + tol:
                bad += 1
    return bad


def magnetic_stack(const double[:, :] base, const long long[::1] su,
                   const long long[::1] sv, const double[:, :] alphas):
    cdef Py_ssize_t k = alphas.shape[0], d = base.shape[0], beta = su.shape[0]
    cdef Py_ssize_t r, i, j
    cdef double a, c, s
    out_arr = np.empty((k, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    for r in range(k):
        for i in range(d):
            for j in range(d):
                out[r, i, j] = base[i, j]
        for j in range(beta):
            a = alphas[r, j]
            c = cos(a)
            s = sin(a)
            out[r, su[j], sv[j]] = -c - 1j * s
            out[r, sv[j], su[j]] = -c + 1j * s
    return out_arr
