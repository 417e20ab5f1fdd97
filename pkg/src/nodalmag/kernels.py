"""Kernel backend selection.

The compiled ``_core`` extension is used when it was built; otherwise the
pure-Python ``_core_py`` takes over. Set ``NODALMAG_PURE_PYTHON=1`` to force
the fallback.
"""

import os

import numpy as np

from . import _core_py

if os.environ.get("NODALMAG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = "cython" if _impl is not _core_py else "python"


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def sign_changes(eu, ev, f, impl=None):
    impl = impl or _impl
    return int(impl.sign_changes(_i64(eu), _i64(ev), _f64(f)))


def pt_hessian(evals, evecs, n, su, sv, impl=None):
    impl = impl or _impl
    return impl.pt_hessian(_f64(evals), _f64(evecs), int(n), _i64(su), _i64(sv))


def interlace_violations(mag, cut, shift, tol, impl=None):
    impl = impl or _impl
    return int(impl.interlace_violations(_f64(mag), _f64(cut), _i64(shift), float(tol)))


def magnetic_stack(base, su, sv, alphas, impl=None):
    impl = impl or _impl
    alphas = _f64(alphas).reshape(len(alphas), len(su))
    return impl.magnetic_stack(_f64(base), _i64(su), _i64(sv), alphas)
