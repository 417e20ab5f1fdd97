"""Cut/magnetic duality: eigenvalue transfer to the cut tree, interlacing,
band extrema and the scan tables behind the band and duality plots."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .criticality import (
    hessian_tolerance,
    lambdas_on_stencil,
    require_generic,
)
from .graph import CycleStructure, Graph
from .nodal import sign_changes
from .operators import build_cut, build_plain, cut_one, _check_gamma
from .spectral import Inertia, SpectralDecomposition, eig, eigvals, inertia_of, level_gap, tol_gap

INTERLACE_TOL = 1e-9
CUT_REL_STEP = 1e-3
CUT_GRAD_REL_STEP = 1e-5
CUT_HESS_FRACTION = 1e-2
CUT_GRAD_FRACTION = 1e-2


@dataclass
class TransferRecord:
    level: int
    gamma_tilde: np.ndarray
    p: int
    phi: int
    cut_level: int
    cut_eigenvalue: float
    eigenvalue_error: float
    residual: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["gamma_tilde"] = self.gamma_tilde.tolist()
        return d


def transfer(g: Graph, cs: CycleStructure, sd: SpectralDecomposition, n: int) -> TransferRecord:
    """Carry level ``n`` over to the tree obtained by cutting every surplus
    edge at ``gamma_j = f(v_j) / f(u_j)``.

    The eigenvector survives the cut unchanged and lands at position
    ``phi - p + 1`` of the tree spectrum, where ``p`` counts negative
    ``gamma_j``.
    """
    require_generic(sd, n)
    f = np.real(sd.vector(n))
    su, sv = cs.surplus_arrays()
    gt = f[sv] / f[su]
    p = int(np.sum(gt < 0))
    phi = sign_changes(g, f)
    k = phi - p + 1
    h = build_cut(g, cs, gt)
    ev = eigvals(h)
    lam = sd.value(n)
    return TransferRecord(
        level=n,
        gamma_tilde=gt,
        p=p,
        phi=phi,
        cut_level=k,
        cut_eigenvalue=float(ev[k - 1]),
        eigenvalue_error=abs(float(ev[k - 1]) - lam),
        residual=float(np.linalg.norm(h @ f - lam * f)),
    )


def _cut_stack(g: Graph, cs: CycleStructure, gammas) -> np.ndarray:
    """Fully cut operators for each row of ``gammas``."""
    gammas = np.asarray(gammas, dtype=float).reshape(-1, cs.betti)
    _check_gamma(gammas)
    base = build_plain(g)
    su, sv = cs.surplus_arrays()
    base[su, sv] = 0.0
    base[sv, su] = 0.0
    stack = np.repeat(base[None], gammas.shape[0], axis=0)
    d = g.n_vertices
    shift = np.zeros((gammas.shape[0], d))
    for j in range(cs.betti):
        shift[:, su[j]] -= gammas[:, j]
        shift[:, sv[j]] -= 1.0 / gammas[:, j]
    idx = np.arange(d)
    stack[:, idx, idx] += shift
    return stack


@dataclass
class TreeIndexReport:
    level: int
    cut_level: int
    expected_index: int
    gradient_t: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray
    inertia: Inertia
    morse_index: int
    degenerate_hessian: bool
    holds: bool
    cut_simple: bool = True
    cut_gap: float = math.inf

    @property
    def status(self) -> str:
        if not self.cut_simple or self.degenerate_hessian:
            return "skip"
        return "pass" if self.holds else "fail"

    @property
    def reason(self) -> str | None:
        if not self.cut_simple:
            return "DegenerateCutEigenvalue"
        if self.degenerate_hessian:
            return "DegenerateHessian"
        return None

    def to_dict(self) -> dict:
        def arr(a):
            return [None if not np.isfinite(x) else float(x) for x in np.ravel(a)]

        beta = self.gradient.shape[0]
        return {
            "level": self.level,
            "cut_level": self.cut_level,
            "expected_index": self.expected_index,
            "gradient_t": arr(self.gradient_t),
            "gradient": arr(self.gradient),
            "hessian": [arr(self.hessian[i]) for i in range(beta)],
            "inertia": list(self.inertia.as_tuple()),
            "morse_index": self.morse_index,
            "degenerate_hessian": self.degenerate_hessian,
            "cut_simple": self.cut_simple,
            "cut_gap": self.cut_gap,
            "holds": self.holds,
            "status": self.status,
            "reason": self.reason,
        }


def _cut_levels_rel(g, cs, gt, t, k):
    """``lambda_k`` of the cut tree at ``gamma_tilde (1 + t)``, per row of ``t``.

    Evaluated as the Rayleigh quotient of the computed eigenvector, whose
    rounding error scales with the entries the eigenvector actually sees
    rather than with the largest diagonal entry.
    """
    stack = _cut_stack(g, cs, gt * (1.0 + t))
    _, vecs = np.linalg.eigh(stack)
    f = vecs[:, :, k - 1]
    return np.einsum("si,sij,sj->s", f, stack, f)


def _cut_gradient_t(g, cs, gt, k, t):
    """Exact ``d lambda_k / d t`` of the cut tree at each row of ``t``.

    First-order (Hellmann-Feynman) derivative of the diagonal entries
    ``-gamma`` and ``-1/gamma`` along ``gamma = gamma_tilde (1 + t)``.
    """
    gam = gt * (1.0 + t)
    _, vecs = np.linalg.eigh(_cut_stack(g, cs, gam))
    f = vecs[:, :, k - 1]
    su, sv = cs.surplus_arrays()
    fu, fv = f[:, su], f[:, sv]
    return gt * (-(fu * fu) + (fv * fv) / gam**2)


def _cut_hessian_t(g, cs, gt, k, h):
    """Central differences of the exact gradient, step ``h[j]`` along ``t_j``."""
    beta = gt.shape[0]
    e = np.diag(h)
    grads = _cut_gradient_t(g, cs, gt, k, np.vstack([e, -e]))
    out = (grads[:beta] - grads[beta:]) / (2.0 * h[:, None])
    return 0.5 * (out + out.T)


def cut_steps(gt, gap, rel_step=CUT_REL_STEP, grad_step=CUT_GRAD_REL_STEP):
    """Per-coordinate relative steps for the tree eigenvalue at ``gamma_tilde``.

    The eigenvalue is analytic on a scale set by its ``gap`` in the tree
    spectrum divided by how fast coordinate ``t_j`` moves the diagonal, so
    each step is capped by that scale.
    """
    scale = gap / np.maximum(np.abs(gt), 1.0 / np.abs(gt))
    return np.minimum(rel_step, CUT_HESS_FRACTION * scale), np.minimum(grad_step, CUT_GRAD_FRACTION * scale)


def tree_index(g, cs, sd, n, rel_step=CUT_REL_STEP) -> TreeIndexReport:
    """Finite-difference gradient, Hessian and Morse index of the tree
    eigenvalue ``lambda_{phi-p+1}(cut(gamma))`` at ``gamma = gamma_tilde``.

    The stencil works in relative coordinates ``gamma_j = gamma_tilde_j (1 + t_j)``.
    Steps shrink with the local tree gap (see :func:`cut_steps`) and the
    Hessian is Richardson-extrapolated from steps ``h`` and ``h/2``.
    Inertia is read in ``t`` coordinates, since a diagonal rescaling
    preserves it. ``gradient_t`` is the gradient in ``t``; ``gradient`` and
    ``hessian`` are in ``gamma`` coordinates.

    A tree eigenvalue that is itself degenerate at ``gamma_tilde`` has no
    well-defined derivatives there; the report is then marked
    ``cut_simple=False`` with NaN entries.
    """
    tr = transfer(g, cs, sd, n)
    beta = cs.betti
    k = tr.cut_level
    expected = n - 1 + beta - tr.phi
    if beta == 0:
        empty = np.zeros((0, 0))
        return TreeIndexReport(
            n, k, expected, np.zeros(0), np.zeros(0), empty, Inertia(0, 0, 0), 0, False, expected == 0
        )

    gt = tr.gamma_tilde
    ev = eigvals(build_cut(g, cs, gt))
    gap = level_gap(ev, k)
    if not gap > tol_gap(ev):
        nan = np.full(beta, np.nan)
        return TreeIndexReport(
            n, k, expected, nan, nan.copy(), np.full((beta, beta), np.nan), Inertia(0, 0, 0), 0,
            False, False, cut_simple=False, cut_gap=gap,
        )
    h, hg = cut_steps(gt, gap, rel_step=rel_step)
    eg = np.diag(hg)
    lg = _cut_levels_rel(g, cs, gt, np.vstack([eg, -eg, 2.0 * eg, -2.0 * eg]), k)
    p1, m1, p2, m2 = lg.reshape(4, beta)
    grad_t = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * hg)
    coarse = _cut_hessian_t(g, cs, gt, k, h)
    fine = _cut_hessian_t(g, cs, gt, k, 0.5 * h)
    hess_t = (4.0 * fine - coarse) / 3.0

    inertia = inertia_of(hess_t, hessian_tolerance(hess_t))
    scale = 1.0 / gt
    return TreeIndexReport(
        level=n,
        cut_level=k,
        expected_index=expected,
        gradient_t=grad_t,
        gradient=grad_t * scale,
        hessian=hess_t * np.outer(scale, scale),
        inertia=inertia,
        morse_index=inertia.n_minus,
        degenerate_hessian=inertia.n_zero > 0,
        holds=inertia.n_zero == 0 and inertia.n_minus == expected,
        cut_gap=gap,
    )


def _single_edge_alphas(cs: CycleStructure, j: int, alphas) -> np.ndarray:
    pts = np.zeros((len(alphas), cs.betti))
    pts[:, j] = alphas
    return pts


def _mag_levels(g, cs, j, alphas) -> np.ndarray:
    return lambdas_on_stencil(g, cs, _single_edge_alphas(cs, j, alphas))


def _cut_levels(g, cs, j, gammas) -> np.ndarray:
    """Spectra of the graph with only surplus edge ``j`` cut, per ``gamma``."""
    base = build_plain(g)
    u, v = cs.surplus_edges[j]
    base[u, v] = base[v, u] = 0.0
    gammas = np.asarray(gammas, dtype=float)
    _check_gamma(gammas)
    stack = np.repeat(base[None], gammas.shape[0], axis=0)
    stack[:, u, u] -= gammas
    stack[:, v, v] -= 1.0 / gammas
    return eigvals(stack)


def shifted(ev_row: np.ndarray, i: int) -> float:
    """1-based eigenvalue lookup with -inf below the spectrum and +inf above."""
    if i < 1:
        return -math.inf
    if i > ev_row.shape[0]:
        return math.inf
    return float(ev_row[i - 1])


def interlace_check(g, cs, edge, gamma: float, alpha: float, tol=INTERLACE_TOL) -> bool:
    """``lambda_{n-p}(cut) <= lambda_n(mag) <= lambda_{n-p+1}(cut)`` for every
    level, with ``p = 1`` exactly when ``gamma < 0``."""
    j = cs.surplus_index(edge)
    _check_gamma(gamma)
    mag = np.atleast_2d(_mag_levels(g, cs, j, [alpha]))
    cut = np.atleast_2d(eigvals(cut_one(g, cs, j, gamma)))
    shift = np.array([1 if gamma < 0 else 0])
    return kernels.interlace_violations(mag, cut, shift, tol) == 0


def interlace_grid(g, cs, edge, n_gamma=17, n_alpha=17, tol=INTERLACE_TOL) -> int:
    """Number of violated interlacing inequalities over a ``gamma x alpha`` grid.

    ``gamma = tan(x)`` on an ``x`` grid offset so that it avoids 0 and the
    poles; ``alpha`` runs over ``n_alpha`` evenly spaced points of ``(-pi, pi]``.
    """
    j = cs.surplus_index(edge)
    x = -math.pi / 2 + math.pi * (np.arange(n_gamma) + 0.25) / n_gamma
    gammas = np.tan(x)
    alphas = -math.pi + 2.0 * math.pi * (np.arange(n_alpha) + 1) / n_alpha
    mag = _mag_levels(g, cs, j, alphas)
    cut = _cut_levels(g, cs, j, gammas)
    mag_rows = np.tile(mag, (n_gamma, 1))
    cut_rows = np.repeat(cut, n_alpha, axis=0)
    shift = np.repeat((gammas < 0).astype(np.int64), n_alpha)
    return kernels.interlace_violations(mag_rows, cut_rows, shift, tol)


@dataclass
class ExtremaRecord:
    level: int
    mag_min: float
    mag_max: float
    cut_lower_max: float
    cut_upper_min: float
    lam_plain: float
    lam_hat: float
    flat_band: bool
    plain_is: str
    duality_ok: bool
    endpoints_ok: bool
    surplus: int | None = None
    surplus_consistent: bool | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _refine(fun, xs, vals, k, sign) -> float:
    """Polish a grid extremum of ``fun`` at index ``k`` by a bounded scalar
    search between its neighbours on the same side of zero. The outermost
    samples are bracketed by the open ends of the interval."""
    edge = math.pi / 2 * (1 - 1e-12)
    lo = xs[k - 1] if k > 0 else -edge
    hi = xs[k + 1] if k + 1 < len(xs) else edge
    if np.sign(lo) != np.sign(xs[k]):
        lo = xs[k] * 1e-6
    if np.sign(hi) != np.sign(xs[k]):
        hi = xs[k] * 1e-6
    lo, hi = min(lo, hi), max(lo, hi)
    res = minimize_scalar(lambda x: -sign * fun(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return max(sign * vals[k], sign * float(fun(res.x))) * sign


def extrema_match(g, cs, edge, n_alpha=1025, n_gamma=1025, tol=1e-6, sd=None) -> list[ExtremaRecord]:
    """Compare band extrema of ``lambda_n(alpha)`` on one surplus edge with the
    extrema of the shifted cut eigenvalues, for every level.

    Checks ``max_gamma lambda_{n-p} = min_alpha lambda_n`` and
    ``max_alpha lambda_n = min_gamma lambda_{n-p+1}``, and that the two band
    edges are the eigenvalues at phase 0 and phase pi. With a single cycle,
    the band edge at phase 0 must be the minimum exactly when the nodal
    surplus is 0.
    """
    j = cs.surplus_index(edge)
    d = g.n_vertices
    sd = eig(build_plain(g)) if sd is None else sd
    alphas = np.linspace(-math.pi, math.pi, n_alpha)
    mag = _mag_levels(g, cs, j, alphas)
    lam_hat_all = _mag_levels(g, cs, j, [math.pi])[0]

    xs = np.linspace(-math.pi / 2, math.pi / 2, n_gamma + 2)[1:-1]
    xs = xs[np.abs(xs) > 1e-12]
    cut = _cut_levels(g, cs, j, np.tan(xs))
    p = (xs < 0).astype(int)

    def cut_at(x, idx):
        ev = _cut_levels(g, cs, j, np.array([math.tan(x)]))[0]
        return shifted(ev, idx - (1 if x < 0 else 0))

    records = []
    for n in range(1, d + 1):
        lower = np.array([shifted(cut[r], n - p[r]) for r in range(len(xs))])
        upper = np.array([shifted(cut[r], n - p[r] + 1) for r in range(len(xs))])
        kl = int(np.argmax(lower))
        ku = int(np.argmin(upper))
        lower_max = _refine(lambda x: cut_at(x, n), xs, lower, kl, +1)
        upper_min = _refine(lambda x: cut_at(x, n + 1), xs, upper, ku, -1) if np.isfinite(upper[ku]) else math.inf

        col = mag[:, n - 1]
        mmin, mmax = float(col.min()), float(col.max())
        lam0, lamh = sd.value(n), float(lam_hat_all[n - 1])
        flat = (mmax - mmin) <= tol
        if abs(mmin - lam0) <= tol and abs(mmax - lamh) <= tol:
            plain_is = "min"
        elif abs(mmax - lam0) <= tol and abs(mmin - lamh) <= tol:
            plain_is = "max"
        else:
            plain_is = "neither"
        rec = ExtremaRecord(
            level=n,
            mag_min=mmin,
            mag_max=mmax,
            cut_lower_max=lower_max,
            cut_upper_min=upper_min,
            lam_plain=lam0,
            lam_hat=lamh,
            flat_band=flat,
            plain_is="both" if flat and plain_is != "neither" else plain_is,
            duality_ok=abs(lower_max - mmin) <= tol and abs(mmax - upper_min) <= tol,
            endpoints_ok=plain_is != "neither",
        )
        if cs.betti == 1 and sd.is_simple(n) and np.min(np.abs(sd.vector(n))) > 1e-8:
            s = sign_changes(g, sd.vector(n)) - (n - 1)
            rec.surplus = s
            rec.surplus_consistent = flat or (s == 0 and plain_is == "min") or (s == 1 and plain_is == "max")
        records.append(rec)
    return records


@dataclass
class ScanTable:
    """Plot-ready grid of eigenvalues. ``columns[0]`` is the primary key."""

    columns: list[str]
    data: np.ndarray
    metadata: dict = field(default_factory=dict)

    def to_csv(self, fh=None) -> str | None:
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.data:
            w.writerow(["%.17g" % x for x in row])
        return buf.getvalue() if fh is None else None

    def to_json(self) -> dict:
        rows = [[None if not np.isfinite(x) else float(x) for x in row] for row in self.data]
        return {"columns": list(self.columns), "rows": rows, "metadata": self.metadata}

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def graph_hash(g: Graph) -> str:
    blob = json.dumps(g.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _level_names(prefix, d):
    return [f"{prefix}_l{n}" for n in range(1, d + 1)]


def dual_scan(g, cs, edge, samples: int) -> ScanTable:
    """Magnetic spectrum at ``alpha = 2x`` beside the cut spectrum at
    ``gamma = tan(x)`` for ``x`` on a uniform grid of ``(-pi/2, pi/2]``.

    Cut columns are NaN where ``gamma`` is 0 or infinite. Reference columns
    hold the spectra at phase 0 and phase pi.
    """
    if samples < 3:
        raise ValueError("dual_scan needs at least 3 samples")
    j = cs.surplus_index(edge)
    d = g.n_vertices
    xs = -math.pi / 2 + math.pi * np.arange(1, samples + 1) / samples
    mag = _mag_levels(g, cs, j, 2.0 * xs)
    cut = np.full((samples, d), np.nan)
    ok = (np.abs(xs) > 1e-12) & (np.abs(np.abs(xs) - math.pi / 2) > 1e-12)
    if ok.any():
        cut[ok] = _cut_levels(g, cs, j, np.tan(xs[ok]))
    ref = _mag_levels(g, cs, j, [0.0, math.pi])
    data = np.column_stack([
        xs,
        mag,
        cut,
        np.repeat(ref[0:1], samples, axis=0),
        np.repeat(ref[1:2], samples, axis=0),
    ])
    cols = ["x"] + _level_names("mag", d) + _level_names("cut", d)
    cols += _level_names("ref_gamma", d) + _level_names("ref_gammahat", d)
    meta = {
        "kind": "dualscan",
        "graph_hash": graph_hash(g),
        "edge": list(cs.surplus_edges[j]),
        "samples": samples,
        "grid": "x = -pi/2 + pi*k/samples, k=1..samples; alpha = 2x; gamma = tan(x)",
    }
    return ScanTable(cols, data, meta)


def band_scan(g, cs, samples: int, levels=None) -> ScanTable:
    """Eigenvalues over the phase torus.

    Full ``samples^beta`` grid for ``beta <= 2``; for larger ``beta`` one
    axis slice per phase with the others held at zero. The grid is
    ``linspace(-pi, pi, samples)``, which contains 0 for odd ``samples``.
    """
    beta = cs.betti
    if beta < 1:
        raise ValueError("band_scan needs at least one cycle")
    d = g.n_vertices
    levels = list(range(1, d + 1)) if levels is None else [int(n) for n in levels]
    grid = np.linspace(-math.pi, math.pi, samples)
    if beta <= 2:
        mesh = np.meshgrid(*([grid] * beta), indexing="ij")
        pts = np.column_stack([m.ravel() for m in mesh])
        axis = None
    else:
        pts = np.zeros((beta * samples, beta))
        axis = np.repeat(np.arange(beta), samples)
        for a in range(beta):
            pts[a * samples : (a + 1) * samples, a] = grid
    # the reference row goes through the same stacked solve as the grid, so
    # grid points at zero flux reproduce it bit for bit
    idx = [n - 1 for n in levels]
    ev = lambdas_on_stencil(g, cs, np.vstack([pts, np.zeros((1, beta))]))[:, idx]
    ev, ref = ev[:-1], ev[-1]
    cols = [f"alpha_{k + 1}" for k in range(beta)]
    parts = [pts]
    if axis is not None:
        cols = ["axis"] + cols
        parts = [axis[:, None].astype(float)] + parts
    cols += [f"mag_l{n}" for n in levels] + [f"ref_gamma_l{n}" for n in levels]
    parts += [ev, np.repeat(ref[None], pts.shape[0], axis=0)]
    meta = {
        "kind": "bandscan",
        "graph_hash": graph_hash(g),
        "betti": beta,
        "samples": samples,
        "grid": "linspace(-pi, pi, samples) per phase" + ("" if axis is None else ", axis slices"),
    }
    return ScanTable(cols, np.column_stack(parts), meta)
