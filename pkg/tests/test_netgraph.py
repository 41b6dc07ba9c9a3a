import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bivirus.exceptions import ValidationError
from bivirus.netgraph import ContactGraph, adjacency_matrix, check_irreducible


def reachable_everywhere(B):
    """Brute-force oracle: breadth-first search from every node over arcs j -> i when B[i, j] > 0."""
    n = B.shape[0]
    for start in range(n):
        seen = {start}
        frontier = [start]
        while frontier:
            j = frontier.pop()
            for i in range(n):
                if B[i, j] > 0 and i not in seen:
                    seen.add(i)
                    frontier.append(i)
        if len(seen) != n:
            return False
    return True


def test_two_cycle_adjacency():
    g = ContactGraph(2, ((0, 1, 1.0), (1, 0, 1.0)))
    np.testing.assert_array_equal(adjacency_matrix(g), [[0, 1], [1, 0]])
    assert g.is_irreducible


def test_self_arc():
    np.testing.assert_array_equal(adjacency_matrix(ContactGraph(1, ((0, 0, 0.7),))), [[0.7]])


def test_directed_ring_places_weight_below_diagonal():
    g = ContactGraph(3, tuple((i, (i + 1) % 3, 2.0) for i in range(3)))
    A = adjacency_matrix(g)
    expected = np.zeros((3, 3))
    for i in range(3):
        expected[(i + 1) % 3, i] = 2.0
    np.testing.assert_array_equal(A, expected)


def test_parallel_arcs_accumulate():
    g = ContactGraph(2, ((0, 1, 0.5), (0, 1, 0.25), (1, 0, 1.0)))
    assert adjacency_matrix(g)[1, 0] == 0.75


@pytest.mark.parametrize("arcs", [((0, 2, 1.0),), ((0, 1, -1.0),), ((0, 1, float("nan")),)])
def test_bad_arcs_rejected(arcs):
    with pytest.raises(ValidationError):
        ContactGraph(2, arcs)


def test_from_matrix_roundtrip():
    B = np.array([[0, 0.3], [0.2, 0.1]])
    np.testing.assert_array_equal(adjacency_matrix(ContactGraph.from_matrix(B)), B)


@pytest.mark.parametrize("B, expected", [
    ([[0, 1], [1, 0]], True),
    ([[1, 1], [0, 1]], False),
    (np.roll(np.eye(5), 1, axis=0), True),
    ([[0, 0], [0, 0]], False),
])
def test_irreducible_examples(B, expected):
    assert check_irreducible(np.asarray(B, dtype=float)) is expected


def test_non_square_rejected():
    with pytest.raises(ValidationError):
        check_irreducible(np.zeros((2, 3)))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 7).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.sampled_from([0.0, 0.0, 0.0, 0.5, 1.0]))))
def test_irreducible_matches_bfs_oracle(B):
    assert check_irreducible(B) == reachable_everywhere(B)
