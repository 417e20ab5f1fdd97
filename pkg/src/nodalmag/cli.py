"""Command-line interface.

Usage errors exit with status 2 (argparse). Domain errors exit with status 1
and a JSON object ``{"error", "message", "location"}`` on stderr. ``verify``
also exits 1 when any check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .criticality import morse_report
from .duality import band_scan, dual_scan, graph_hash, transfer, tree_index
from .ensemble import SCHEMA_VERSION, InstanceSpec, run_verify
from .errors import NodalMagError
from .graph import cycle_structure
from .io import parse_graph_file
from .kernels import BACKEND
from .nodal import nodal_reports
from .operators import as_phases, build_magnetic, build_plain
from .spectral import eig, eigvals


def _jsonable(obj):
    """Plain-JSON view of reports: numpy scalars and arrays unwrapped,
    non-finite floats written as ``null``."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False)


def _emit(text: str, out=None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_edge(text: str):
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return int(parts[0])
        if len(parts) == 2:
            return (int(parts[0]), int(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a surplus index j or a pair u,v, got {text!r}")


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {k}")
    return k


def _load(path):
    g = parse_graph_file(path)
    return g, cycle_structure(g)


def cmd_spectrum(args) -> int:
    g, cs = _load(args.graph)
    alpha = as_phases(args.alpha if args.alpha is not None else np.zeros(cs.betti), cs.betti)
    ev = eigvals(build_magnetic(g, cs, alpha))
    if args.json:
        _emit(dumps({
            "schema_version": SCHEMA_VERSION,
            "graph_hash": graph_hash(g),
            "betti": cs.betti,
            "surplus_edges": [list(e) for e in cs.surplus_edges],
            "alpha": alpha,
            "eigenvalues": ev,
        }))
    else:
        lines = [f"# betti={cs.betti} alpha={','.join('%.17g' % a for a in alpha)}", "level,eigenvalue"]
        lines += [f"{k + 1},{x:.17g}" for k, x in enumerate(ev)]
        _emit("\n".join(lines))
    return 0


def cmd_nodal(args) -> int:
    g, cs = _load(args.graph)
    reports = nodal_reports(g, cs, eig(build_plain(g)))
    if args.json:
        _emit(dumps({
            "schema_version": SCHEMA_VERSION,
            "graph_hash": graph_hash(g),
            "betti": cs.betti,
            "levels": [r.to_dict() for r in reports],
        }))
    else:
        lines = ["level,phi,surplus,generic,reason"]
        for r in reports:
            phi = "" if r.phi is None else r.phi
            sur = "" if r.surplus is None else r.surplus
            lines.append(f"{r.level},{phi},{sur},{str(r.generic).lower()},{r.reason or ''}")
        _emit("\n".join(lines))
    return 0


def _morse_entry(g, cs, sd, n) -> dict:
    rep = morse_report(g, cs, n, sd=sd)
    d = rep.to_dict()
    if rep.generic:
        d["transfer"] = transfer(g, cs, sd, n).to_dict()
        d["tree_index"] = tree_index(g, cs, sd, n).to_dict()
    return d


def cmd_morse(args) -> int:
    g, cs = _load(args.graph)
    sd = eig(build_plain(g))
    if args.level is not None and args.level > sd.dim:
        raise _UsageError(f"--level must be at most {sd.dim} for this graph")
    levels = [args.level] if args.level is not None else range(1, sd.dim + 1)
    entries = [_morse_entry(g, cs, sd, n) for n in levels]
    if args.json:
        body = entries[0] if args.level is not None else {"levels": entries}
        body = dict(body, schema_version=SCHEMA_VERSION, graph_hash=graph_hash(g), betti=cs.betti)
        _emit(dumps(body))
    else:
        lines = ["level,surplus,morse_index,theorem_holds,status,reason"]
        for d in entries:
            sur = "" if d["surplus"] is None else d["surplus"]
            idx = "" if d["morse_index"] is None else d["morse_index"]
            lines.append(f"{d['level']},{sur},{idx},{str(d['theorem_holds']).lower()},{d['status']},{d['reason'] or ''}")
        _emit("\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    spec = InstanceSpec(
        seed=args.seed,
        min_n=args.min_n,
        max_n=args.max_n,
        min_beta=args.min_beta,
        max_beta=args.max_beta,
        q_low=args.q_low,
        q_high=args.q_high,
        count=args.graphs,
    )
    summary = run_verify(spec, threads=args.threads)
    report = dumps(summary.to_dict(include_records=args.records))
    if args.out:
        _emit(report, args.out)
    if args.json:
        _emit(report)
    else:
        s = summary
        _emit(
            f"instances={s.instances} levels={s.levels_checked} generic={s.generic_levels} "
            f"pass={s.passes} fail={s.fails} skip={s.skipped} "
            f"interlace_points={s.interlace_points} interlace_failures={s.interlace_failures} "
            f"ok={str(s.ok).lower()}"
        )
    return 0 if summary.ok else 1


def _write_table(table, args) -> int:
    if args.json:
        text = dumps(dict(table.to_json(), schema_version=SCHEMA_VERSION))
    else:
        text = table.to_csv()
    _emit(text, args.out)
    return 0


def cmd_bandscan(args) -> int:
    g, cs = _load(args.graph)
    return _write_table(band_scan(g, cs, args.samples), args)


def cmd_dualscan(args) -> int:
    g, cs = _load(args.graph)
    return _write_table(dual_scan(g, cs, args.edge, args.samples), args)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nodalmag",
        description="Nodal counts and magnetic Morse indices of graph eigenvectors.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def graph_cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("graph", help='graph JSON file: {"n": int, "edges": [[u, v], ...], "q": [...]}')
        sp.add_argument("--json", action="store_true", help="emit JSON instead of CSV text")
        return sp

    sp = graph_cmd("spectrum", "Eigenvalues of the magnetic operator.")
    sp.add_argument("--alpha", type=_parse_floats, help="comma-separated phases, one per surplus edge (default 0)")
    sp.set_defaults(func=cmd_spectrum)

    sp = graph_cmd("nodal", "Sign changes and nodal surplus of every level at zero flux.")
    sp.set_defaults(func=cmd_nodal)

    sp = graph_cmd("morse", "Gradient, Hessian and Morse index at zero flux, against the nodal surplus.")
    sp.add_argument("--level", type=_positive, help="single level (1-based); default all")
    sp.set_defaults(func=cmd_morse)

    sp = sub.add_parser("verify", help="Check every level of a seeded random ensemble.",
                        description="Check every level of a seeded random ensemble.")
    d = InstanceSpec()
    sp.add_argument("--graphs", type=_positive, default=d.count, help=f"number of instances (default {d.count})")
    sp.add_argument("--min-n", type=_positive, default=d.min_n, help=f"fewest vertices (default {d.min_n})")
    sp.add_argument("--max-n", type=_positive, default=d.max_n, help=f"most vertices (default {d.max_n})")
    sp.add_argument("--min-beta", type=int, default=d.min_beta, help=f"fewest surplus edges (default {d.min_beta})")
    sp.add_argument("--max-beta", type=int, default=d.max_beta, help=f"most surplus edges (default {d.max_beta})")
    sp.add_argument("--q-low", type=float, default=d.q_low, help=f"potential lower bound (default {d.q_low})")
    sp.add_argument("--q-high", type=float, default=d.q_high, help=f"potential upper bound (default {d.q_high})")
    sp.add_argument("--seed", type=int, default=d.seed, help=f"ensemble seed (default {d.seed})")
    sp.add_argument("--threads", type=_positive, help="worker processes (capped by NODALMAG_THREADS)")
    sp.add_argument("--records", action="store_true", help="include one record per level in the report")
    sp.add_argument("--out", help="write the JSON report here")
    sp.add_argument("--json", action="store_true", help="print the JSON report instead of a one-line summary")
    sp.set_defaults(func=cmd_verify)

    sp = graph_cmd("bandscan", "Eigenvalues over the phase torus as a CSV table.")
    sp.add_argument("--samples", type=_positive, default=257, help="grid points per phase (default 257)")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_bandscan)

    sp = graph_cmd("dualscan", "Magnetic and cut spectra of one surplus edge as a CSV table.")
    sp.add_argument("--edge", type=_parse_edge, required=True, help="surplus index j or endpoints u,v")
    sp.add_argument("--samples", type=_positive, default=257, help="grid points (default 257)")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.set_defaults(func=cmd_dualscan)
    return p


def _error_json(err: Exception) -> str:
    return json.dumps({
        "error": type(err).__name__,
        "message": str(err),
        "location": getattr(err, "location", None),
    }, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            status = args.func(args)
        for w in caught:
            sys.stderr.write(f"warning: {w.message}\n")
        return status
    except _UsageError as err:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"nodalmag {args.command}: error: {err}\n")
        return 2
    except NodalMagError as err:
        sys.stderr.write(_error_json(err) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
