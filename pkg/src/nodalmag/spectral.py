"""Dense Hermitian eigendecomposition, eigenvalue derivatives and inertia."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DegenerateEigenvalue

# first component with modulus above this fixes the eigenvector phase
_CANON_EPS = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues; ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def is_real(self) -> bool:
        return self.eigenvectors.dtype.kind == "f"

    @property
    def tol_gap(self) -> float:
        return tol_gap(self.eigenvalues)

    def vector(self, n: int) -> np.ndarray:
        """Eigenvector of level ``n`` (1-based)."""
        return self.eigenvectors[:, n - 1]

    def value(self, n: int) -> float:
        return float(self.eigenvalues[n - 1])

    def gap(self, n: int) -> float:
        """Distance from level ``n`` (1-based) to its nearest neighbour."""
        return level_gap(self.eigenvalues, n)

    def is_simple(self, n: int) -> bool:
        return self.gap(n) > self.tol_gap


@dataclass(frozen=True)
class Inertia:
    n_minus: int
    n_zero: int
    n_plus: int

    @property
    def morse_index(self) -> int:
        return self.n_minus

    @property
    def dim(self) -> int:
        return self.n_minus + self.n_zero + self.n_plus

    def doubled(self) -> Inertia:
        """Inertia of the same level read on the realified space ``R^{2d}``."""
        return Inertia(2 * self.n_minus, 2 * self.n_zero + 1, 2 * self.n_plus)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_minus, self.n_zero, self.n_plus)


def tol_gap(eigenvalues) -> float:
    """Degeneracy threshold shared by every genericity gate."""
    ev = np.asarray(eigenvalues)
    if ev.size == 0:
        return 1e-8
    return 1e-8 * max(1.0, float(ev[-1] - ev[0]))


def level_gap(eigenvalues, n: int) -> float:
    ev = np.asarray(eigenvalues)
    i = n - 1
    gaps = []
    if i > 0:
        gaps.append(ev[i] - ev[i - 1])
    if i < ev.shape[0] - 1:
        gaps.append(ev[i + 1] - ev[i])
    return float(min(gaps)) if gaps else float("inf")


def _canonicalize(vecs: np.ndarray) -> np.ndarray:
    mags = np.abs(vecs)
    for j in range(vecs.shape[1]):
        k = int(np.argmax(mags[:, j] > _CANON_EPS))
        c = vecs[k, j]
        if vecs.dtype.kind == "c":
            vecs[:, j] *= np.conj(c) / abs(c)
            vecs[k, j] = abs(c)
        elif c < 0:
            vecs[:, j] *= -1.0
    return vecs


def eig(h) -> SpectralDecomposition:
    """Eigendecomposition of a dense Hermitian matrix.

    Eigenvectors are phase-fixed so that their first non-negligible
    component is positive real; a real symmetric input yields real vectors.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ConvergenceFailure("matrix has non-finite entries")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as err:
        raise ConvergenceFailure(str(err)) from err
    v = _canonicalize(np.array(v, copy=True))
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def eigvals(h) -> np.ndarray:
    """Ascending eigenvalues only (also accepts a stack of matrices)."""
    try:
        return np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as err:
        raise ConvergenceFailure(str(err)) from err


def eigenvalue_derivative(sd: SpectralDecomposition, n: int, dh) -> float:
    """First-order derivative ``<f_n, dH f_n>`` of a simple level."""
    if not sd.is_simple(n):
        raise DegenerateEigenvalue(f"level {n} is not simple (gap {sd.gap(n):.3e})")
    f = sd.vector(n)
    return float(np.real(np.vdot(f, np.asarray(dh) @ f)))


def quadform_inertia(h, n: int) -> Inertia:
    """Inertia of eigenvector ``n`` as a critical point of ``<x, Hx>`` on the
    unit sphere: counts of eigenvalues below, equal to (other than itself),
    and above ``lambda_n``."""
    ev = h.eigenvalues if isinstance(h, SpectralDecomposition) else eigvals(h)
    tol = tol_gap(ev)
    lam = ev[n - 1]
    diff = np.delete(ev, n - 1) - lam
    n_minus = int(np.sum(diff < -tol))
    n_plus = int(np.sum(diff > tol))
    return Inertia(n_minus, diff.size - n_minus - n_plus, n_plus)


def inertia_of(sym, tol: float) -> Inertia:
    """Inertia of a real symmetric matrix, treating ``|mu| <= tol`` as zero."""
    sym = np.asarray(sym, dtype=float)
    if sym.size == 0:
        return Inertia(0, 0, 0)
    mu = np.linalg.eigvalsh(sym)
    n_minus = int(np.sum(mu < -tol))
    n_plus = int(np.sum(mu > tol))
    return Inertia(n_minus, mu.size - n_minus - n_plus, n_plus)


def sphere_hessian_fd(a, x, step: float = 1e-4) -> np.ndarray:
    """Finite-difference Hessian of ``<y, A y>`` restricted to the unit sphere
    at ``x``, in an orthonormal basis of the tangent space.

    The sphere is parametrised by ``y(t) = (x + B t) / |x + B t|``; at a
    critical point this gives the intrinsic Hessian.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    d = x.shape[0]
    # columns 1.. of a QR with x first span the tangent space
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(d)]))
    basis = q[:, 1:d]

    def h(t):
        y = x + basis @ t
        return float(y @ a @ y) / float(y @ y)

    k = d - 1
    out = np.zeros((k, k))
    h0 = h(np.zeros(k))
    e = np.eye(k) * step
    for i in range(k):
        out[i, i] = (h(e[i]) - 2.0 * h0 + h(-e[i])) / step**2
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = (
                h(e[i] + e[j]) - h(e[i] - e[j]) - h(-e[i] + e[j]) + h(-e[i] - e[j])
            ) / (4.0 * step**2)
    return out
