import json

import numpy as np
import pytest

from nodalmag import (
    DimensionMismatch,
    Disconnected,
    LoopEdge,
    ParseError,
    VertexOutOfRange,
    build_graph,
    parse_graph_file,
)
from nodalmag.io import dump_graph, graph_from_dict, parse_graph_text, write_graph_file


def test_schema_example(tmp_path):
    p = tmp_path / "tri.json"
    p.write_text('{"n":3,"edges":[[0,1],[1,2],[0,2]],"q":[0.1,0.2,0.3]}')
    g = parse_graph_file(p)
    assert g.n_vertices == 3
    assert g.edges == ((0, 1), (0, 2), (1, 2))
    np.testing.assert_array_equal(g.potential, [0.1, 0.2, 0.3])


def test_missing_q_warns():
    with pytest.warns(UserWarning, match="zero potential"):
        g = parse_graph_text('{"n": 2, "edges": [[0, 1]]}')
    np.testing.assert_array_equal(g.potential, [0.0, 0.0])


def test_loop_edge_location(tmp_path):
    p = tmp_path / "loop.json"
    p.write_text('{"n": 2, "edges": [[0, 1], [0, 0]], "q": [0, 0]}')
    with pytest.raises(LoopEdge) as info:
        parse_graph_file(p)
    assert str(p) in info.value.location
    assert "edges[1]" in info.value.location


def test_decode_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_graph_text('{"n": 2,\n "edges": [[0, 1]')
    assert "line 2" in str(info.value)


@pytest.mark.parametrize(
    "text, field",
    [
        ('[1, 2]', None),
        ('{"n": "3", "edges": []}', "n"),
        ('{"n": true, "edges": []}', "n"),
        ('{"n": 2, "edges": {"a": 1}}', "edges"),
        ('{"n": 2, "edges": [[0, 1, 2]]}', "edges[0]"),
        ('{"n": 2, "edges": [[0, 1.5]]}', "edges[0]"),
        ('{"n": 2, "edges": [[0, 1]], "q": [0, "x"]}', "q[1]"),
        ('{"n": 2, "edges": [[0, 1]], "q": 3}', "q"),
    ],
)
def test_schema_errors(text, field):
    with pytest.raises(ParseError) as info:
        parse_graph_text(text, source="g.json")
    assert info.value.location.startswith("g.json")
    if field is not None:
        assert info.value.location.endswith(field)


def test_graph_errors_surface():
    with pytest.raises(Disconnected):
        parse_graph_text('{"n": 3, "edges": [[0, 1]], "q": [0, 0, 0]}')
    with pytest.raises(DimensionMismatch):
        parse_graph_text('{"n": 2, "edges": [[0, 1]], "q": [0]}')
    with pytest.raises(VertexOutOfRange):
        parse_graph_text('{"n": 2, "edges": [[0, 2]], "q": [0, 0]}')


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        parse_graph_file(tmp_path / "absent.json")


def test_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)], rng.uniform(-1, 1, 5))
    p = tmp_path / "g.json"
    write_graph_file(g, p)
    h = parse_graph_file(p)
    assert h.edges == g.edges
    # potentials survive bit for bit
    assert np.array_equal(h.potential, g.potential)
    assert json.loads(dump_graph(h)) == json.loads(dump_graph(g))
    assert graph_from_dict(json.loads(dump_graph(g))).edges == g.edges
