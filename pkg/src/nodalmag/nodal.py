"""Sign changes and nodal surplus of real eigenvectors."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .errors import VanishingEntry
from .graph import CycleStructure, Graph
from .spectral import SpectralDecomposition

TOL_ZERO = 1e-8


@dataclass(frozen=True)
class NodalReport:
    level: int
    phi: int | None
    surplus: int | None
    generic: bool
    min_abs_entry: float
    spectral_gap: float
    bounds_ok: bool | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def sign_changes(g: Graph, f) -> int:
    """Number of edges whose endpoints carry opposite signs of ``f``.

    ``f`` is normalised first; an entry with modulus at most ``TOL_ZERO``
    raises :class:`VanishingEntry` instead of guessing a sign.
    """
    f = np.asarray(f)
    if f.dtype.kind == "c":
        raise TypeError("sign changes are defined for real vectors only")
    f = f.astype(float)
    norm = np.linalg.norm(f)
    fn = f / norm if norm > 0 else f
    small = np.flatnonzero(np.abs(fn) <= TOL_ZERO)
    if small.size:
        k = int(small[0])
        raise VanishingEntry(k, float(fn[k]))
    eu, ev = g.edge_arrays()
    return kernels.sign_changes(eu, ev, fn)


def nodal_report(g: Graph, cs: CycleStructure, sd: SpectralDecomposition, n: int) -> NodalReport:
    """Sign-change count and nodal surplus of level ``n`` (1-based).

    Non-generic levels (degenerate eigenvalue, or an eigenvector vanishing
    at a vertex) come back with ``generic=False`` and no counts.
    """
    if not sd.is_real:
        raise TypeError("nodal counts need a real eigendecomposition (zero magnetic flux)")
    f = sd.vector(n)
    min_abs = float(np.min(np.abs(f)))
    gap = sd.gap(n)
    if not gap > sd.tol_gap:
        return NodalReport(n, None, None, False, min_abs, gap, reason="DegenerateEigenvalue")
    if not min_abs > TOL_ZERO:
        return NodalReport(n, None, None, False, min_abs, gap, reason="VanishingEntry")
    phi = sign_changes(g, f)
    surplus = phi - (n - 1)
    return NodalReport(n, phi, surplus, True, min_abs, gap, bounds_ok=0 <= surplus <= cs.betti)


def nodal_reports(g: Graph, cs: CycleStructure, sd: SpectralDecomposition) -> list[NodalReport]:
    return [nodal_report(g, cs, sd, n) for n in range(1, sd.dim + 1)]
