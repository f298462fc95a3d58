import io
import json
import math

import numpy as np
import pytest

from tdaperm.errors import ParseError, ResourceCapError, ValidationError
from tdaperm.filtration import (
    Filtration,
    Graph,
    build_lower_star,
    build_rips,
    enclosing_radius,
    load_graph,
    load_points,
    save_graph,
    save_points,
)


def test_from_simplices_groups_and_sorts():
    filt = Filtration.from_simplices(
        [(2,), (1, 0), (0,), (1,), (2, 0)],
        [0.0, 1.0, 0.0, 0.0, 0.5],
    )
    assert filt.dimension == 1
    assert filt.counts == (3, 2)
    assert filt.simplices(1).tolist() == [[0, 1], [0, 2]]
    assert filt.values(1).tolist() == [1.0, 0.5]


def test_missing_face_rejected():
    with pytest.raises(ValidationError) as exc:
        Filtration.from_simplices([(0,), (1,), (0, 2)], [0.0, 0.0, 1.0])
    assert "missing face" in str(exc.value)


def test_value_below_face_rejected():
    with pytest.raises(ValidationError):
        Filtration.from_simplices([(0,), (1,), (0, 1)], [0.0, 2.0, 1.0])


def test_duplicate_simplex_rejected():
    with pytest.raises(ValidationError):
        Filtration.from_simplices([(0,), (1,), (0, 1), (1, 0)], [0, 0, 1, 1])


def test_repeated_vertex_rejected():
    with pytest.raises(ValidationError):
        Filtration.from_simplices([(0,), (0, 0)], [0.0, 1.0])


def test_rips_two_points_uses_enclosing_radius():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    filt = build_rips(pts, max_dim=1)
    assert filt.counts == (2, 1)
    assert filt.values(1)[0] == pytest.approx(5.0)
    assert enclosing_radius(pts) == pytest.approx(5.0)


def test_rips_threshold_prunes_edges():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
    filt = build_rips(pts, max_dim=1, threshold=2.0)
    assert filt.simplices(1).tolist() == [[0, 1]]


def test_rips_simplex_values_are_max_pairwise_distance():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(12, 3))
    filt = build_rips(pts, max_dim=3)
    dm = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    for d in (1, 2, 3):
        if filt.dimension < d:
            break
        S = filt.simplices(d)
        for row, val in zip(S, filt.values(d)):
            pair_max = max(dm[a, b] for ai, a in enumerate(row) for b in row[ai + 1:])
            assert val == pytest.approx(pair_max, abs=0.0)


def test_rips_respects_simplex_cap():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(30, 2))
    with pytest.raises(ResourceCapError) as exc:
        build_rips(pts, max_dim=2, simplex_cap=100)
    assert "100" in str(exc.value)


def test_rips_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        build_rips(np.empty((0, 2)))
    with pytest.raises(ValidationError):
        build_rips(np.zeros((4, 2)), max_dim=4)
    with pytest.raises(ValidationError):
        build_rips(np.array([[0.0], [np.nan]]))
    with pytest.raises(ValidationError):
        build_rips(np.zeros((4, 2)), threshold=-1.0)


def test_enclosing_radius_square():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert enclosing_radius(sq) == pytest.approx(math.sqrt(2))
    assert enclosing_radius(sq[:1]) == 0.0


def test_lower_star_edge_and_triangle_values():
    g = Graph(4, [[0, 1], [1, 2], [0, 2], [2, 3]], [0.0, 3.0, 1.0, 2.0])
    filt = build_lower_star(g, fill_triangles=True)
    assert filt.counts == (4, 4, 1)
    assert filt.simplices(2).tolist() == [[0, 1, 2]]
    assert filt.values(2)[0] == 3.0
    edge_vals = dict(zip(map(tuple, filt.simplices(1).tolist()), filt.values(1)))
    assert edge_vals[(0, 1)] == 3.0
    assert edge_vals[(2, 3)] == 2.0


def test_lower_star_without_fill_has_no_triangles():
    g = Graph(3, [[0, 1], [1, 2], [0, 2]], [0.0, 0.0, 0.0])
    assert build_lower_star(g).dimension == 1
    assert build_lower_star(g, fill_triangles=True).dimension == 2


def test_lower_star_allows_negative_values():
    g = Graph(2, [[0, 1]], [-2.0, -1.0])
    filt = build_lower_star(g)
    assert filt.values(1)[0] == -1.0


def test_graph_validation():
    with pytest.raises(ValidationError):
        Graph(2, [[0, 2]], [0.0, 0.0])
    with pytest.raises(ValidationError):
        Graph(2, [[1, 1]], [0.0, 0.0])
    with pytest.raises(ValidationError):
        Graph(2, [[0, 1], [1, 0]], [0.0, 0.0])
    with pytest.raises(ValidationError):
        Graph(2, [[0, 1]], [0.0])
    with pytest.raises(ValidationError):
        Graph(2, [[0, 1]], [0.0, np.inf])


def test_graph_json_round_trip():
    g = Graph(3, [[2, 0], [0, 1]], [0.5, -1.0, 2.0])
    buf = io.StringIO()
    save_graph(g, buf)
    back = load_graph(io.StringIO(buf.getvalue()))
    assert back.node_count == 3
    assert back.edges.tolist() == [[0, 1], [0, 2]]
    assert back.node_values.tolist() == [0.5, -1.0, 2.0]


def test_graph_json_errors():
    with pytest.raises(ParseError):
        load_graph(io.StringIO("not json"))
    with pytest.raises(ParseError):
        load_graph(io.StringIO(json.dumps({"n": 2, "edges": []})))
    with pytest.raises(ParseError):
        load_graph(io.StringIO(json.dumps({"n": 1, "edges": [], "values": [0.0], "x": 1})))


def test_points_csv_round_trip(tmp_path):
    pts = np.array([[0.1, 0.2, 0.3], [1.5, -2.25, 1e-17]])
    path = tmp_path / "pts.csv"
    save_points(pts, str(path))
    back = load_points(str(path))
    assert np.array_equal(back, pts)


def test_points_csv_errors():
    with pytest.raises(ParseError) as exc:
        load_points(io.StringIO("1.0,2.0\n3.0\n"))
    assert "line 2" in str(exc.value)
    with pytest.raises(ParseError):
        load_points(io.StringIO("1.0,x\n"))
    with pytest.raises(ParseError):
        load_points(io.StringIO(""))
