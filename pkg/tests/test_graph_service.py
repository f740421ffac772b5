import json

import pytest

from app.errors import UsageError
from app.services.graph_service import (
    chordless_odd_cycles,
    graph_from_dict,
    is_cycle_graph,
    is_gorenstein_perfect,
    is_gorenstein_tperfect,
    load_graph,
    make_cycle,
    make_graph,
    small_cliques,
    stable_sets,
    stable_sets_bruteforce,
)


def test_make_cycle_shape(c7):
    assert c7.n == 7
    assert len(c7.edges) == 7
    assert all(c7.degree(v) == 2 for v in range(7))
    assert c7.vertices[0] == "v0"


def test_make_cycle_closes_the_ring(c9):
    assert c9.has_edge(8, 0)
    assert (0, 8) in c9.edges


def test_make_cycle_rejects_short():
    with pytest.raises(ValueError):
        make_cycle(2)


def test_make_graph_rejects_duplicates_and_loops():
    with pytest.raises(ValueError):
        make_graph(["a", "b"], [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        make_graph(["a", "b"], [(1, 1)])
    with pytest.raises(ValueError):
        make_graph(["a", "a"], [])


def test_small_cliques_of_cycle_are_edges(c7):
    family = small_cliques(c7)
    assert set(family.maximal) == set(c7.edges)
    assert len(family.cliques) == 7 + 7


def test_small_cliques_of_triangle():
    family = small_cliques(make_cycle(3))
    assert family.maximal == ((0, 1, 2),)


def test_small_cliques_of_edgeless_graph():
    g = make_graph(["a", "b", "c"], [])
    assert small_cliques(g).maximal == ((0,), (1,), (2,))


def test_small_cliques_stop_at_three():
    k4 = make_graph(list("abcd"), [(i, j) for i in range(4) for j in range(i + 1, 4)])
    family = small_cliques(k4)
    assert max(len(c) for c in family.cliques) == 3
    assert len(family.maximal) == 4


def test_chordless_odd_cycles(c5, c7):
    assert chordless_odd_cycles(c7, 7).cycles == (tuple(range(7)),)
    assert chordless_odd_cycles(c5, 5).cycles == ((0, 1, 2, 3, 4),)
    assert len(chordless_odd_cycles(make_cycle(6), 7)) == 0
    assert len(chordless_odd_cycles(c7, 5)) == 0


def test_chordless_odd_cycles_skip_cycles_with_chords():
    # C7 plus the chord {0, 3}: leaves a chordless 5-cycle 0-3-4-5-6
    g = make_graph([f"v{j}" for j in range(7)], [(j, (j + 1) % 7) for j in range(7)] + [(0, 3)])
    assert chordless_odd_cycles(g).cycles == ((0, 3, 4, 5, 6),)


@pytest.mark.parametrize("n, expected", [(3, 4), (4, 7), (5, 11), (6, 18), (7, 29), (8, 47), (9, 76)])
def test_stable_set_counts(n, expected):
    g = make_cycle(n)
    assert len(stable_sets(g)) == expected
    assert stable_sets(g) == stable_sets_bruteforce(g)


def test_stable_sets_single_vertex(single_vertex):
    assert stable_sets(single_vertex) == [(), (0,)]


def test_is_cycle_graph(c7):
    assert is_cycle_graph(c7)
    assert not is_cycle_graph(make_graph(["a", "b", "c"], [(0, 1), (1, 2)]))
    relabelled = make_graph(list("abcde"), [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)])
    assert is_cycle_graph(relabelled)


@pytest.mark.parametrize("n, gorenstein, criterion", [
    (3, True, "(iii)"),
    (4, True, "(ii)"),
    (5, True, "(ii)"),
    (6, True, "(ii)"),
    (7, False, None),
    (8, True, "(ii)"),
    (9, False, None),
])
def test_gorenstein_criterion_on_cycles(n, gorenstein, criterion):
    verdict = is_gorenstein_tperfect(make_cycle(n))
    assert verdict.gorenstein is gorenstein
    assert verdict.criterion == criterion


def test_gorenstein_criterion_edgeless():
    verdict = is_gorenstein_tperfect(make_graph(["a", "b"], []))
    assert verdict.gorenstein and verdict.criterion == "(i)"


def test_gorenstein_perfect_criterion():
    assert is_gorenstein_perfect(make_cycle(4))
    path = make_graph(["a", "b", "c"], [(0, 1), (1, 2)])
    assert is_gorenstein_perfect(path)
    paw = make_graph(list("abcd"), [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert not is_gorenstein_perfect(paw)


def test_graph_from_dict_round_trip(c5):
    assert graph_from_dict(c5.to_dict()) == c5


@pytest.mark.parametrize("payload", [
    {"vertices": ["a", "b"]},
    {"vertices": ["a", "a"], "edges": []},
    {"vertices": ["a", "b"], "edges": [[0, 0]]},
    {"vertices": ["a", "b"], "edges": [[0, 2]]},
    {"vertices": ["a", "b"], "edges": [[0, 1], [1, 0]]},
    {"vertices": ["a", "b"], "edges": [[0, 1, 1]]},
    {"vertices": ["a", "b"], "edges": 5},
    {"vertices": ["a", "b"], "edges": {"0": 1}},
])
def test_graph_from_dict_rejects_malformed(payload):
    with pytest.raises(UsageError):
        graph_from_dict(payload)


def test_load_graph(tmp_path, c5):
    path = tmp_path / "c5.json"
    path.write_text(json.dumps(c5.to_dict()), encoding="utf-8")
    assert load_graph(path) == c5


def test_load_graph_errors(tmp_path):
    with pytest.raises(UsageError):
        load_graph(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(UsageError):
        load_graph(bad)
