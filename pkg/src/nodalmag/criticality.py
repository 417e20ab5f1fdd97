"""The eigenvalue ``lambda_n(alpha)`` near zero flux: gradient, Hessian, Morse index.

Two independent Hessians are computed. ``hessian_pt`` uses second-order
perturbation theory with exact operator derivatives; ``hessian_fd`` only
evaluates eigenvalues on a finite-difference stencil. The report uses the
former and keeps the latter as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NonGenericLevel
from .graph import CycleStructure, Graph
from .nodal import TOL_ZERO, nodal_report
from .operators import build_magnetic, build_plain
from .spectral import Inertia, SpectralDecomposition, eig, eigvals, inertia_of

FD_STEP = 1e-4
GRAD_STEP = 1e-4
GRAD_TOL = 1e-6


def hessian_tolerance(hess) -> float:
    """Threshold below which a Hessian eigenvalue is treated as zero."""
    hess = np.asarray(hess)
    norm = float(np.linalg.norm(hess, 2)) if hess.size else 0.0
    return 1e-5 * max(1.0, norm)


def hessian_agreement_tolerance(hess) -> float:
    hess = np.asarray(hess)
    return max(1e-5, 1e-4 * float(np.linalg.norm(hess)))


@dataclass
class CriticalityReport:
    level: int
    generic: bool
    gradient: np.ndarray = field(default_factory=lambda: np.zeros(0))
    analytic_gradient: np.ndarray = field(default_factory=lambda: np.zeros(0))
    hessian: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    hessian_fd: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    hessian_discrepancy: float = 0.0
    hessian_agree: bool = True
    inertia: Inertia | None = None
    morse_index: int | None = None
    phi: int | None = None
    surplus: int | None = None
    degenerate_hessian: bool = False
    theorem_holds: bool = False
    status: str = "skip"
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "generic": self.generic,
            "gradient": self.gradient.tolist(),
            "analytic_gradient": self.analytic_gradient.tolist(),
            "hessian": self.hessian.tolist(),
            "hessian_fd": self.hessian_fd.tolist(),
            "hessian_discrepancy": self.hessian_discrepancy,
            "hessian_agree": self.hessian_agree,
            "inertia": None if self.inertia is None else list(self.inertia.as_tuple()),
            "morse_index": self.morse_index,
            "phi": self.phi,
            "surplus": self.surplus,
            "degenerate_hessian": self.degenerate_hessian,
            "theorem_holds": self.theorem_holds,
            "status": self.status,
            "reason": self.reason,
        }


def _plain_eig(g, sd):
    return eig(build_plain(g)) if sd is None else sd


def require_generic(sd: SpectralDecomposition, n: int) -> None:
    if not sd.is_simple(n):
        raise NonGenericLevel(f"level {n} is degenerate (gap {sd.gap(n):.3e})")
    if not np.min(np.abs(sd.vector(n))) > TOL_ZERO:
        raise NonGenericLevel(f"eigenvector of level {n} vanishes at a vertex")


def lambda_of_alpha(g: Graph, cs: CycleStructure, alpha, n: int) -> float:
    """``n``-th eigenvalue (1-based, ascending) of the magnetic operator."""
    return float(eigvals(build_magnetic(g, cs, alpha))[n - 1])


def lambdas_on_stencil(g: Graph, cs: CycleStructure, points, n: int | None = None):
    """Eigenvalues of the magnetic operator at each row of ``points``.

    Returns the level-``n`` column when ``n`` is given, else all levels.
    """
    su, sv = cs.surplus_arrays()
    points = np.asarray(points, dtype=float).reshape(-1, cs.betti)
    stack = kernels.magnetic_stack(build_plain(g), su, sv, points)
    ev = eigvals(stack)
    return ev if n is None else ev[:, n - 1]


def analytic_gradient(sd: SpectralDecomposition, cs: CycleStructure, n: int) -> np.ndarray:
    """``d lambda_n / d alpha_j = 2 Im(conj(f_u) f_v)`` at zero flux; exactly
    zero for real eigenvectors."""
    f = sd.vector(n)
    out = np.zeros(cs.betti)
    for j, (u, v) in enumerate(cs.surplus_edges):
        out[j] = 2.0 * np.imag(np.conj(f[u]) * f[v])
    return out


def gradient_at_zero(g, cs, n, step=GRAD_STEP, sd=None) -> np.ndarray:
    """Central-difference gradient of ``lambda_n`` at ``alpha = 0``."""
    sd = _plain_eig(g, sd)
    require_generic(sd, n)
    beta = cs.betti
    if beta == 0:
        return np.zeros(0)
    e = np.eye(beta) * step
    lam = lambdas_on_stencil(g, cs, np.vstack([e, -e]), n)
    return (lam[:beta] - lam[beta:]) / (2.0 * step)


def hessian_fd(g, cs, n, step=FD_STEP, sd=None) -> np.ndarray:
    """Finite-difference Hessian of ``lambda_n`` at ``alpha = 0``.

    Three-point stencil on the diagonal, four-point cross stencil off it.
    """
    sd = _plain_eig(g, sd)
    require_generic(sd, n)
    beta = cs.betti
    if beta == 0:
        return np.zeros((0, 0))
    e = np.eye(beta) * step
    pairs = [(i, j) for i in range(beta) for j in range(i + 1, beta)]
    rows = [e, -e]
    for i, j in pairs:
        rows.append(np.array([e[i] + e[j], e[i] - e[j], -e[i] + e[j], -e[i] - e[j]]))
    lam = lambdas_on_stencil(g, cs, np.vstack(rows), n)
    lam0 = sd.value(n)
    out = np.zeros((beta, beta))
    out[np.diag_indices(beta)] = (lam[:beta] - 2.0 * lam0 + lam[beta : 2 * beta]) / step**2
    base = 2 * beta
    for k, (i, j) in enumerate(pairs):
        pp, pm, mp, mm = lam[base + 4 * k : base + 4 * k + 4]
        out[i, j] = out[j, i] = (pp - pm - mp + mm) / (4.0 * step**2)
    return 0.5 * (out + out.T)


def hessian_pt(g, cs, n, sd=None) -> np.ndarray:
    """Second-order perturbation-theory Hessian of ``lambda_n`` at ``alpha = 0``.

    ``H_jk = <f, d2H_jk f> + 2 sum_{m != n} Re(<f, dH_j f_m><f_m, dH_k f>) / (lambda_n - lambda_m)``
    with the exact phase derivatives of the operator.
    """
    sd = _plain_eig(g, sd)
    require_generic(sd, n)
    if not sd.is_real:
        raise TypeError("perturbation Hessian expects the real zero-flux eigenbasis")
    su, sv = cs.surplus_arrays()
    return kernels.pt_hessian(sd.eigenvalues, sd.eigenvectors, n - 1, su, sv)


def morse_report(g, cs, n, sd=None, fd_step=FD_STEP) -> CriticalityReport:
    """Gradient, Hessian and Morse index of ``lambda_n`` at zero flux,
    compared against the nodal surplus of the ``n``-th eigenvector."""
    sd = _plain_eig(g, sd)
    nr = nodal_report(g, cs, sd, n)
    if not nr.generic:
        return CriticalityReport(level=n, generic=False, status="skip", reason=nr.reason)

    grad = gradient_at_zero(g, cs, n, sd=sd)
    agrad = analytic_gradient(sd, cs, n)
    hess = hessian_pt(g, cs, n, sd=sd)
    hfd = hessian_fd(g, cs, n, step=fd_step, sd=sd)
    disc = float(np.linalg.norm(hess - hfd)) if hess.size else 0.0
    inertia = inertia_of(hess, hessian_tolerance(hess))
    degenerate = inertia.n_zero > 0
    report = CriticalityReport(
        level=n,
        generic=True,
        gradient=grad,
        analytic_gradient=agrad,
        hessian=hess,
        hessian_fd=hfd,
        hessian_discrepancy=disc,
        hessian_agree=disc <= hessian_agreement_tolerance(hess),
        inertia=inertia,
        morse_index=inertia.n_minus,
        phi=nr.phi,
        surplus=nr.surplus,
        degenerate_hessian=degenerate,
    )
    if degenerate:
        report.status, report.reason = "skip", "DegenerateHessian"
    else:
        report.theorem_holds = report.morse_index == report.surplus
        report.status = "pass" if report.theorem_holds else "fail"
    return report


def morse_reports(g, cs, sd=None, fd_step=FD_STEP) -> list[CriticalityReport]:
    sd = _plain_eig(g, sd)
    return [morse_report(g, cs, n, sd=sd, fd_step=fd_step) for n in range(1, sd.dim + 1)]
