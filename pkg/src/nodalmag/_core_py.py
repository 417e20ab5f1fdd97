"""Pure-Python kernels. Same signatures and results as the compiled ``_core``."""

import math

import numpy as np


def sign_changes(eu, ev, f):
    """Number of edges ``(eu[k], ev[k])`` across which ``f`` changes sign."""
    count = 0
    for k in range(len(eu)):
        if f[eu[k]] * f[ev[k]] < 0.0:
            count += 1
    return count


def pt_hessian(evals, evecs, n, su, sv):
    """Second-order perturbation Hessian of eigenvalue ``n`` (0-based) in the
    surplus-edge phases at zero flux, for a real eigenbasis."""
    d = evecs.shape[0]
    beta = len(su)
    out = np.zeros((beta, beta))
    if beta == 0:
        return out
    lam = evals[n]
    c = [[0.0] * beta for _ in range(d)]
    for m in range(d):
        if m == n:
            continue
        for j in range(beta):
            u, v = su[j], sv[j]
            c[m][j] = evecs[u, n] * evecs[v, m] - evecs[u, m] * evecs[v, n]
    for j in range(beta):
        u, v = su[j], sv[j]
        out[j, j] = 2.0 * evecs[u, n] * evecs[v, n]
    for m in range(d):
        if m == n:
            continue
        w = 2.0 / (lam - evals[m])
        cm = c[m]
        for j in range(beta):
            for k in range(j, beta):
                out[j, k] += w * cm[j] * cm[k]
    for j in range(beta):
        for k in range(j):
            out[j, k] = out[k, j]
    return out


def interlace_violations(mag, cut, shift, tol):
    """Count failures of ``cut[n-p] <= mag[n] <= cut[n-p+1]`` (1-based levels,
    out-of-range cut indices read as -inf / +inf) over every row."""
    rows, d = mag.shape
    bad = 0
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


def magnetic_stack(base, su, sv, alphas):
    """Stack of operators equal to ``base`` with surplus entries replaced by
    ``-exp(+i alpha_j)`` at ``(u_j, v_j)`` and its conjugate at ``(v_j, u_j)``."""
    k = alphas.shape[0]
    d = base.shape[0]
    out = np.empty((k, d, d), dtype=np.complex128)
    for r in range(k):
        out[r] = base
        for j in range(len(su)):
            a = alphas[r, j]
            c, s = math.cos(a), math.sin(a)
            out[r, su[j], sv[j]] = complex(-c, -s)
            out[r, sv[j], su[j]] = complex(-c, s)
    return out
