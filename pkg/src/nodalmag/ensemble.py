"""Seeded random instances and the ensemble verification run."""

from __future__ import annotations

import heapq
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .criticality import GRAD_TOL, hessian_agreement_tolerance, morse_report
from .duality import interlace_grid, transfer, tree_index
from .errors import InfeasibleBeta
from .graph import Graph, build_graph, cycle_structure
from .operators import build_plain
from .spectral import eig

SCHEMA_VERSION = 1
TRANSFER_TOL = 1e-9
INTERLACE_GRID = 17


@dataclass(frozen=True)
class InstanceSpec:
    seed: int = 42
    min_n: int = 4
    max_n: int = 12
    min_beta: int = 0
    max_beta: int = 4
    q_low: float = -1.0
    q_high: float = 1.0
    count: int = 200

    def __post_init__(self):
        if not 1 <= self.min_n <= self.max_n:
            raise ValueError(f"bad vertex range [{self.min_n}, {self.max_n}]")
        if not 0 <= self.min_beta <= self.max_beta:
            raise ValueError(f"bad beta range [{self.min_beta}, {self.max_beta}]")
        if not self.q_low <= self.q_high:
            raise ValueError("q_low must not exceed q_high")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def max_beta_for(n: int) -> int:
    return n * (n - 1) // 2 - (n - 1)


def _prufer_tree(n: int, rng) -> list[tuple[int, int]]:
    """Uniformly random labelled tree on ``n`` vertices."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def random_instance(spec: InstanceSpec, k: int) -> Graph:
    """Instance ``k`` of the ensemble; a pure function of ``(spec, k)``.

    A uniform random tree plus ``beta`` distinct extra edges, with i.i.d.
    uniform potentials. ``beta`` is drawn from the requested range clipped
    to what ``n`` vertices allow.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(spec.seed), int(k)]))
    n = int(rng.integers(spec.min_n, spec.max_n + 1))
    cap = max_beta_for(n)
    if spec.min_beta > cap:
        raise InfeasibleBeta(f"beta >= {spec.min_beta} impossible on {n} vertices (at most {cap})")
    beta = int(rng.integers(spec.min_beta, min(spec.max_beta, cap) + 1))
    tree = _prufer_tree(n, rng)
    present = set(tree)
    candidates = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present]
    extra = [candidates[i] for i in sorted(rng.choice(len(candidates), size=beta, replace=False))]
    q = rng.uniform(spec.q_low, spec.q_high, size=n)
    return build_graph(n, tree + extra, q)


@dataclass
class InstanceResult:
    index: int
    graph: dict
    betti: int
    levels: list = field(default_factory=list)
    interlace_points: int = 0
    interlace_violations: int = 0
    failures: list = field(default_factory=list)


def verify_graph(g: Graph, index: int = 0, interlace: bool = True) -> InstanceResult:
    """Run every per-level check on one graph."""
    cs = cycle_structure(g)
    sd = eig(build_plain(g))
    res = InstanceResult(index=index, graph=g.to_dict(), betti=cs.betti)

    for n in range(1, g.n_vertices + 1):
        rep = morse_report(g, cs, n, sd=sd)
        rec = {"instance": index, "level": n, "betti": cs.betti, "status": rep.status, "reason": rep.reason}
        if not rep.generic:
            res.levels.append(rec)
            continue

        failed = []
        tr = transfer(g, cs, sd, n)
        ti = tree_index(g, cs, sd, n)
        grad_inf = float(np.max(np.abs(rep.gradient))) if rep.gradient.size else 0.0
        cut_grad_inf = float(np.max(np.abs(ti.gradient_t))) if ti.cut_simple and ti.gradient_t.size else None
        rec.update(
            phi=rep.phi,
            surplus=rep.surplus,
            morse_index=rep.morse_index,
            degenerate_hessian=rep.degenerate_hessian,
            grad_fd_inf=grad_inf,
            grad_analytic_zero=bool(np.all(rep.analytic_gradient == 0.0)),
            hessian_discrepancy=rep.hessian_discrepancy,
            hessian_tol=hessian_agreement_tolerance(rep.hessian),
            transfer_eig_err=tr.eigenvalue_error,
            transfer_residual=tr.residual,
            cut_level=tr.cut_level,
            tree_expected=ti.expected_index,
            tree_index=ti.morse_index,
            tree_degenerate=ti.degenerate_hessian,
            tree_status=ti.status,
            tree_reason=ti.reason,
            cut_grad_inf=cut_grad_inf,
        )
        if not (0 <= rep.surplus <= cs.betti):
            failed.append("nodal_bound")
        if not rep.degenerate_hessian and not rep.theorem_holds:
            failed.append("theorem")
        if grad_inf > GRAD_TOL or not rec["grad_analytic_zero"]:
            failed.append("gradient")
        if not rep.hessian_agree:
            failed.append("hessian_crosscheck")
        if tr.eigenvalue_error > TRANSFER_TOL or tr.residual > TRANSFER_TOL:
            failed.append("transfer")
        if ti.status == "fail":
            failed.append("tree_index")
        if cut_grad_inf is not None and cut_grad_inf > GRAD_TOL:
            failed.append("cut_gradient")

        if failed:
            rec["status"], rec["reason"] = "fail", ",".join(failed)
            res.failures.append({
                "instance": index,
                "level": n,
                "checks": failed,
                "graph": g.to_dict(),
                "report": rep.to_dict(),
                "transfer": tr.to_dict(),
            })
        res.levels.append(rec)

    if interlace:
        for j in range(cs.betti):
            bad = interlace_grid(g, cs, j, INTERLACE_GRID, INTERLACE_GRID)
            res.interlace_points += INTERLACE_GRID * INTERLACE_GRID
            res.interlace_violations += bad
            if bad:
                res.failures.append({
                    "instance": index,
                    "level": None,
                    "checks": ["interlacing"],
                    "edge": list(cs.surplus_edges[j]),
                    "violations": bad,
                    "graph": g.to_dict(),
                })
    return res


@dataclass
class VerificationSummary:
    spec: dict
    instances: int = 0
    levels_checked: int = 0
    generic_levels: int = 0
    passes: int = 0
    fails: int = 0
    skipped: int = 0
    skip_reasons: dict = field(default_factory=dict)
    interlace_points: int = 0
    interlace_failures: int = 0
    failures: list = field(default_factory=list)
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.fails == 0 and self.interlace_failures == 0

    def to_dict(self, include_records: bool = False) -> dict:
        d = asdict(self)
        if not include_records:
            d.pop("records")
        d["schema_version"] = SCHEMA_VERSION
        d["ok"] = self.ok
        d["skip_reasons"] = dict(sorted(self.skip_reasons.items()))
        return d


def _run_one(args):
    spec, k = args
    return verify_graph(random_instance(spec, k), index=k)


def _thread_cap(threads):
    env = os.environ.get("NODALMAG_THREADS")
    cap = int(env) if env else None
    if threads is None:
        threads = cap or 1
    elif cap:
        threads = min(threads, cap)
    return max(1, threads)


def summarize(results, spec_dict) -> VerificationSummary:
    s = VerificationSummary(spec=spec_dict)
    for res in sorted(results, key=lambda r: r.index):
        s.instances += 1
        s.interlace_points += res.interlace_points
        s.interlace_failures += res.interlace_violations
        s.failures.extend(res.failures)
        for rec in res.levels:
            s.records.append(rec)
            s.levels_checked += 1
            if rec["reason"] not in ("DegenerateEigenvalue", "VanishingEntry"):
                s.generic_levels += 1
            if rec["status"] == "pass":
                s.passes += 1
            elif rec["status"] == "fail":
                s.fails += 1
            else:
                s.skipped += 1
                s.skip_reasons[rec["reason"]] = s.skip_reasons.get(rec["reason"], 0) + 1
    return s


def run_verify(spec: InstanceSpec, threads=None) -> VerificationSummary:
    """Check the Morse-index/nodal-surplus identity and its companions on
    every level of every instance. Failures are recorded, never raised."""
    jobs = [(spec, k) for k in range(spec.count)]
    workers = _thread_cap(threads)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=4))
    else:
        results = [_run_one(job) for job in jobs]
    return summarize(results, asdict(spec))
