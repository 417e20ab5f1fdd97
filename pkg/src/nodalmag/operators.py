"""Dense discrete Schrodinger operators: plain, magnetic, and cut.

All constructors return fresh numpy arrays. Real-valued operators come back
as ``float64``; anything carrying a genuinely complex phase is
``complex128``. Hermiticity is exact by construction: every off-diagonal
entry is written together with its conjugate.

Phase convention: for an edge assignment ``A`` the operator entry is
``H[u, v] = -exp(i A[v, u])`` with ``A[v, u] = -A[u, v]``. The canonical
magnetic operator puts ``-exp(+i alpha_j)`` at ``(u_j, v_j)`` of surplus edge
``j`` (``u_j < v_j``), i.e. ``A[v_j, u_j] = alpha_j``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, GammaZeroOrInfinite
from .graph import CycleStructure, Graph

TWO_PI = 2.0 * math.pi


def wrap_phase(x):
    """Reduce angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    r = np.remainder(x + math.pi, TWO_PI) - math.pi
    # remainder lands in [-pi, pi); fold the excluded endpoint over
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    return r if r.ndim else float(r)


def as_phases(alpha, beta: int) -> np.ndarray:
    """Validate a magnetic phase vector of length ``beta`` and wrap it."""
    a = np.atleast_1d(np.asarray(alpha, dtype=float)) if np.size(alpha) else np.zeros(0)
    if a.shape != (beta,):
        raise DimensionMismatch(f"expected {beta} phases, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch("phases must be finite")
    return np.atleast_1d(wrap_phase(a))


def as_gammas(gamma, beta: int) -> np.ndarray:
    g = np.atleast_1d(np.asarray(gamma, dtype=float)) if np.size(gamma) else np.zeros(0)
    if g.shape != (beta,):
        raise DimensionMismatch(f"expected {beta} cut parameters, got {g.size}")
    _check_gamma(g)
    return g


def _check_gamma(g):
    g = np.atleast_1d(g)
    if np.any(g == 0.0) or not np.all(np.isfinite(g)):
        raise GammaZeroOrInfinite(f"cut parameters must be nonzero and finite, got {g.tolist()}")


def unit_phase(a: float) -> complex:
    """``exp(i a)`` with the real points 0 and pi exact."""
    a = float(wrap_phase(a))
    if a == 0.0:
        return 1.0 + 0.0j
    if a == math.pi:
        return -1.0 + 0.0j
    return complex(math.cos(a), math.sin(a))


def build_plain(g: Graph) -> np.ndarray:
    """``H = Q - C``: potential on the diagonal, -1 on every edge."""
    h = np.diag(np.array(g.potential, dtype=float))
    for u, v in g.edges:
        h[u, v] = -1.0
        h[v, u] = -1.0
    return h


def build_magnetic(g: Graph, cs: CycleStructure, alpha) -> np.ndarray:
    """Canonical magnetic operator with phase ``alpha_j`` on surplus edge ``j``."""
    alpha = as_phases(alpha, cs.betti)
    z = [unit_phase(a) for a in alpha]
    h = build_plain(g)
    if any(w.imag != 0.0 for w in z):
        h = h.astype(np.complex128)
    for (u, v), w in zip(cs.surplus_edges, z):
        h[u, v] = -w if h.dtype.kind == "c" else -w.real
        h[v, u] = -w.conjugate() if h.dtype.kind == "c" else -w.real
    return h


def build_gammahat(g: Graph, cs: CycleStructure, edges=None) -> np.ndarray:
    """Real operator with the coupling sign flipped (phase pi) on the given
    surplus edges (all of them by default)."""
    alpha = np.zeros(cs.betti)
    idx = range(cs.betti) if edges is None else [cs.surplus_index(e) for e in edges]
    for j in idx:
        alpha[j] = math.pi
    return build_magnetic(g, cs, alpha)


def _cut_in_place(h, u, v, gamma):
    h[u, v] = 0.0
    h[v, u] = 0.0
    h[u, u] -= gamma
    h[v, v] -= 1.0 / gamma


def build_cut(g: Graph, cs: CycleStructure, gamma) -> np.ndarray:
    """Cut every surplus edge ``(u_j, v_j)``, shifting the potential by
    ``-gamma_j`` at ``u_j`` and ``-1/gamma_j`` at ``v_j``.

    Shifts accumulate when a vertex meets several surplus edges.
    """
    gamma = as_gammas(gamma, cs.betti)
    h = build_plain(g)
    for (u, v), c in zip(cs.surplus_edges, gamma):
        _cut_in_place(h, u, v, c)
    return h


def cut_one(g: Graph, cs: CycleStructure, edge, gamma: float, alpha=None) -> np.ndarray:
    """Cut a single surplus edge of the magnetic operator with phases ``alpha``
    (zero by default); every other entry keeps its magnetic value."""
    j = cs.surplus_index(edge)
    _check_gamma(gamma)
    h = build_magnetic(g, cs, np.zeros(cs.betti) if alpha is None else alpha)
    u, v = cs.surplus_edges[j]
    _cut_in_place(h, u, v, float(gamma))
    return h


def perturbation_matrix(g: Graph, cs: CycleStructure, edge, gamma: float, alpha: float = 0.0):
    """Rank-one matrix ``B`` with ``cut = magnetic - B`` on surplus edge ``edge``.

    Zero except the block ``[[gamma, -e^{i alpha}], [-e^{-i alpha}, 1/gamma]]``
    on ``(u_j, v_j)``; its nonzero eigenvalue is ``gamma + 1/gamma``.
    """
    j = cs.surplus_index(edge)
    _check_gamma(gamma)
    u, v = cs.surplus_edges[j]
    w = unit_phase(alpha)
    dtype = np.complex128 if w.imag != 0.0 else np.float64
    b = np.zeros((g.n_vertices, g.n_vertices), dtype=dtype)
    b[u, u] = gamma
    b[v, v] = 1.0 / gamma
    b[u, v] = -w if dtype is np.complex128 else -w.real
    b[v, u] = -w.conjugate() if dtype is np.complex128 else -w.real
    return b


def edge_phase(phases: dict, a: int, b: int) -> float:
    """``A[a, b]`` from an assignment keyed by canonical ``(u, v)``, ``u < v``."""
    if a < b:
        return float(phases[(a, b)])
    return -float(phases[(b, a)])


def decorated_operator(g: Graph, phases: dict) -> np.ndarray:
    """Magnetic operator for an arbitrary per-edge phase assignment.

    ``phases[(u, v)]`` holds ``A[u, v]`` for ``u < v``; missing edges carry
    no phase.
    """
    h = build_plain(g).astype(np.complex128)
    for u, v in g.edges:
        a = edge_phase(phases, v, u) if (u, v) in phases else 0.0
        w = unit_phase(a)
        h[u, v] = -w
        h[v, u] = -w.conjugate()
    return h


def flux(cs: CycleStructure, phases: dict, cycle_index: int) -> float:
    """Signed phase sum around basis cycle ``cycle_index``, wrapped to ``(-pi, pi]``."""
    total = 0.0
    for a, b in cs.cycle_basis[cycle_index]:
        key = (min(a, b), max(a, b))
        if key in phases:
            total += edge_phase(phases, a, b)
    return float(wrap_phase(total))


def reduce_gauge(g: Graph, cs: CycleStructure, phases: dict) -> np.ndarray:
    """Canonical surplus-edge phases gauge-equivalent to ``phases``."""
    return np.array([flux(cs, phases, j) for j in range(cs.betti)], dtype=float)


def phase_derivatives(g: Graph, cs: CycleStructure):
    """Exact first and second derivatives of the canonical magnetic operator
    in each ``alpha_j`` at zero flux.

    Returns ``(d1, d2)`` lists of dense matrices; mixed second derivatives
    vanish since each phase touches one edge only.
    """
    d = g.n_vertices
    d1, d2 = [], []
    for u, v in cs.surplus_edges:
        a = np.zeros((d, d), dtype=np.complex128)
        a[u, v] = -1j
        a[v, u] = 1j
        b = np.zeros((d, d))
        b[u, v] = b[v, u] = 1.0
        d1.append(a)
        d2.append(b)
    return d1, d2
