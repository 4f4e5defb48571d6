import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccdhest.errors import BoundsError, ParameterError, ParseError
from ccdhest.graph import (
    Graph,
    IngestOptions,
    active_vertex_count,
    compact_ids,
    degree_array,
    ingest,
    load_edge_list,
    read_edge_list,
    write_edge_list,
)


def test_comment_and_pairs():
    g = load_edge_list(io.StringIO("# c\n0 1\n1 2"))
    assert g.n == 3 and g.m == 2
    assert g.edges.tolist() == [[0, 1], [1, 2]]


def test_duplicates_and_self_loops_dropped():
    g, summary = ingest(io.StringIO("0 1\n1 0\n2 2\n"))
    assert (g.n, g.m) == (3, 1)
    assert g.edges.tolist() == [[0, 1]]
    assert summary.self_loops_dropped == 1
    assert summary.duplicates_dropped == 1
    assert summary.pairs == 3


def test_empty_with_override():
    g = load_edge_list(io.StringIO(""), IngestOptions(n_override=5))
    assert (g.n, g.m) == (5, 0)


def test_strict_options_reject():
    with pytest.raises(ParseError):
        load_edge_list(io.StringIO("0 1\n1 0\n"), IngestOptions(dedupe=False))
    with pytest.raises(ParseError):
        load_edge_list(io.StringIO("2 2\n"), IngestOptions(drop_self_loops=False))


def test_override_too_small():
    with pytest.raises(BoundsError):
        load_edge_list(io.StringIO("0 9\n"), IngestOptions(n_override=5))


@pytest.mark.parametrize("text,line", [
    ("0 1\n1\n", 2),
    ("0 1\n# ok\nx 2\n", 3),
    ("-1 2\n", 1),
    ("0 1.5\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        load_edge_list(io.StringIO(text))
    assert exc.value.line == line


def test_tab_separated_and_extra_columns():
    g = load_edge_list(io.StringIO("0\t1\t17\n1  2\n"))
    assert g.m == 2


@pytest.mark.parametrize("edges,n,expected", [
    ([(0, 1), (1, 2)], 3, [1, 2, 1]),
    ([(0, i) for i in range(1, 6)], 6, [5, 1, 1, 1, 1, 1]),
    ([], 4, [0, 0, 0, 0]),
])
def test_degree_array(edges, n, expected):
    assert degree_array(Graph.from_edges(n, edges)).tolist() == expected


@pytest.mark.parametrize("edges,n,expected", [
    ([(0, 1), (1, 2)], 5, 3),
    ([], 7, 0),
    ([(2 * i, 2 * i + 1) for i in range(5)], 10, 10),
])
def test_active_vertex_count(edges, n, expected):
    assert active_vertex_count(Graph.from_edges(n, edges)) == expected


def test_from_edges_validates():
    with pytest.raises(ParameterError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ParameterError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(BoundsError):
        Graph.from_edges(2, [(0, 2)])


def test_arrays_are_read_only(path3):
    with pytest.raises(ValueError):
        path3.edges[0, 0] = 5


def test_neighbors_sorted_and_has_edge():
    g = Graph.from_edges(5, [(3, 0), (0, 4), (1, 0)])
    assert g.neighbors(0).tolist() == [1, 3, 4]
    assert g.has_edge(4, 0) and not g.has_edge(1, 3)


def test_compact_ids():
    g = Graph.from_edges(10, [(2, 7), (7, 9)])
    c, old = compact_ids(g)
    assert c.n == 3 and old.tolist() == [2, 7, 9]
    assert c.edges.tolist() == [[0, 1], [1, 2]]


def test_file_round_trip(tmp_path, star5):
    p = tmp_path / "g.txt"
    write_edge_list(star5, p, header=["star"])
    g, summary = read_edge_list(p)
    assert g == star5
    assert summary.comments == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                             max_size=80))))
def test_ingest_matches_set_semantics(case):
    n, pairs = case
    text = "".join(f"{u} {v}\n" for u, v in pairs)
    g = load_edge_list(io.StringIO(text), IngestOptions(n_override=n))
    want = {(min(u, v), max(u, v)) for u, v in pairs if u != v}
    assert {tuple(e) for e in g.edges.tolist()} == want
    assert g.m == len(want)
    deg = np.zeros(n, dtype=int)
    for u, v in want:
        deg[u] += 1
        deg[v] += 1
    assert degree_array(g).tolist() == deg.tolist()
    for v in range(n):
        nb = {b if a == v else a for a, b in want if v in (a, b)}
        assert g.neighbors(v).tolist() == sorted(nb)
