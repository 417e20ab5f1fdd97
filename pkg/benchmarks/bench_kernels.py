"""Compare the compiled kernels with the pure-Python fallback.

Run ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on inputs of
the size the ensemble run produces, then the full seeded verification is
timed in a fresh interpreter per backend.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from nodalmag import InstanceSpec, build_plain, cycle_structure, eig, kernels, random_instance
from nodalmag import _core_py

try:
    from nodalmag import _core
except ImportError:
    _core = None


def best_of(fn, repeat=5):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_cases():
    g = random_instance(InstanceSpec(min_n=12, max_n=12, min_beta=4, max_beta=4), 0)
    cs = cycle_structure(g)
    sd = eig(build_plain(g))
    su, sv = cs.surplus_arrays()
    eu, ev = np.array(g.edges).T
    w, v = sd.eigenvalues, np.real(sd.eigenvectors)
    rng = np.random.default_rng(0)
    mag = np.sort(rng.normal(size=(289, 12)), axis=1)
    cut = np.sort(rng.normal(size=(289, 12)), axis=1)
    shift = rng.integers(0, 2, size=289)
    alphas = rng.uniform(-3, 3, size=(64, cs.betti))
    base = build_plain(g)
    return {
        "sign_changes": lambda impl: kernels.sign_changes(eu, ev, v[:, 5], impl=impl),
        "pt_hessian": lambda impl: kernels.pt_hessian(w, v, 5, su, sv, impl=impl),
        "interlace_violations": lambda impl: kernels.interlace_violations(mag, cut, shift, 1e-9, impl=impl),
        "magnetic_stack": lambda impl: kernels.magnetic_stack(base, su, sv, alphas, impl=impl),
    }


VERIFY_SNIPPET = """
import time
from nodalmag import InstanceSpec, run_verify
start = time.perf_counter()
s = run_verify(InstanceSpec(seed=42, count={count}), threads=1)
print(time.perf_counter() - start, s.fails)
"""


def time_verify(pure, count, repeat=2):
    """Best wall time of a fresh interpreter with the chosen backend."""
    env = dict(os.environ, NODALMAG_PURE_PYTHON="1" if pure else "0")
    best, fails = math.inf, None
    for _ in range(repeat):
        out = subprocess.run([sys.executable, "-c", VERIFY_SNIPPET.format(count=count)],
                             env=env, capture_output=True, text=True, check=True)
        t, fails = out.stdout.split()
        best = min(best, float(t))
    return best, int(fails)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphs", type=int, default=200, help="instances in the end-to-end run")
    args = ap.parse_args()
    if _core is None:
        print("compiled extension not built; only the Python backend is available")
        return
    print(f"{'kernel':<22}{'cython':>12}{'python':>12}{'speedup':>10}")
    for name, fn in kernel_cases().items():
        tc = best_of(lambda: fn(_core))
        tp = best_of(lambda: fn(_core_py))
        print(f"{name:<22}{tc * 1e6:>10.1f}us{tp * 1e6:>10.1f}us{tp / tc:>9.1f}x")
    tc, fc = time_verify(False, args.graphs)
    tp, fp = time_verify(True, args.graphs)
    print(f"{'verify (' + str(args.graphs) + ' graphs)':<22}{tc:>11.2f}s{tp:>11.2f}s{tp / tc:>9.1f}x")
    assert fc == fp == 0


if __name__ == "__main__":
    main()
