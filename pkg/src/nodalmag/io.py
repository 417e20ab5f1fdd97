"""Graph JSON files: ``{"n": int, "edges": [[u, v], ...], "q": [float, ...]}``.

Vertices are 0-indexed. ``q`` is optional and defaults to zero with a
warning.
"""

from __future__ import annotations

import json
import warnings
from numbers import Real
from pathlib import Path

from .errors import GraphError, ParseError
from .graph import Graph, build_graph


def graph_from_dict(obj, source: str = "<graph>") -> Graph:
    if not isinstance(obj, dict):
        raise ParseError("top level must be a JSON object", location=source)
    n = obj.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ParseError(f'"n" must be an integer, got {n!r}', location=f"{source}: n")
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        raise ParseError('"edges" must be a list of pairs', location=f"{source}: edges")
    for k, e in enumerate(edges):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or any(isinstance(x, bool) or not isinstance(x, int) for x in e)
        ):
            raise ParseError(f"expected [u, v] integer pair, got {e!r}", location=f"{source}: edges[{k}]")
    if "q" in obj:
        q = obj["q"]
        if not isinstance(q, list):
            raise ParseError('"q" must be a list of numbers', location=f"{source}: q")
        for k, x in enumerate(q):
            if isinstance(x, bool) or not isinstance(x, Real):
                raise ParseError(f"expected a number, got {x!r}", location=f"{source}: q[{k}]")
    else:
        warnings.warn(f'{source}: no "q" given, using zero potential', stacklevel=2)
        q = None
    try:
        return build_graph(n, [tuple(e) for e in edges], q)
    except GraphError as err:
        loc = f"{source}: {err.location}" if err.location else source
        raise err.at(loc) from None


def parse_graph_text(text: str, source: str = "<graph>") -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{err.msg} (line {err.lineno}, column {err.colno})", location=source) from None
    return graph_from_dict(obj, source)


def parse_graph_file(path) -> Graph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ParseError(err.strerror or str(err), location=str(path)) from None
    return parse_graph_text(text, str(path))


def dump_graph(g: Graph) -> str:
    return json.dumps(g.to_dict())


def write_graph_file(g: Graph, path) -> None:
    Path(path).write_text(dump_graph(g) + "\n")
