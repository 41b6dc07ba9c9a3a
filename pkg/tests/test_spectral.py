import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bivirus.exceptions import ConsistencyError, PreconditionError, ValidationError
from bivirus.spectral import (
    Threshold,
    as_metzler,
    diagonal_lyapunov,
    negative_inverse_check,
    perron_pair,
    sign_pattern_violation,
    spectral_abscissa,
    spectral_radius,
    threshold_trichotomy,
)
from bivirus.verify import random_irreducible

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.mark.parametrize("M, s", [
    (-np.eye(2), -1.0),
    ([[-1, 2], [2, -1]], 1.0),
    (C2 - 0.5 * np.eye(2), 0.5),
])
def test_spectral_abscissa(M, s):
    assert spectral_abscissa(np.asarray(M, dtype=float)) == pytest.approx(s, abs=1e-12)


@pytest.mark.parametrize("M, r", [(np.eye(3), 1.0), ([[0, 2], [2, 0]], 2.0), (np.zeros((2, 2)), 0.0)])
def test_spectral_radius(M, r):
    assert spectral_radius(np.asarray(M, dtype=float)) == pytest.approx(r, abs=1e-12)


def test_perron_pair_two_cycle():
    pair = perron_pair(C2)
    assert pair.value == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(pair.right, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(pair.left, [0.5, 0.5], atol=1e-12)


def test_perron_pair_shifted():
    pair = perron_pair(C2 - 2 * np.eye(2))
    assert pair.value == pytest.approx(-1.0, abs=1e-12)
    np.testing.assert_allclose(pair.right, [0.5, 0.5], atol=1e-12)


def test_perron_pair_scalar():
    pair = perron_pair(np.array([[-3.0]]))
    assert pair.value == -3.0
    np.testing.assert_array_equal(pair.right, [1.0])


def test_metzler_rejects_negative_off_diagonal():
    with pytest.raises(ValidationError):
        as_metzler(np.array([[0.0, -1.0], [1.0, 0.0]]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8))
def test_perron_pair_matches_dense_eigensolve(seed, n):
    rng = np.random.default_rng(seed)
    M = random_irreducible(rng, n) + np.diag(rng.uniform(-3, 1, n))
    pair = perron_pair(M)
    assert pair.value == pytest.approx(spectral_abscissa(M), abs=1e-9)
    assert np.all(pair.right > 0) and np.all(pair.left > 0)
    assert pair.right.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(M @ pair.right, pair.value * pair.right, atol=1e-9)


@pytest.mark.parametrize("scale, expected", [(1.0, Threshold.CRITICAL), (2.0, Threshold.BELOW),
                                             (0.5, Threshold.ABOVE)])
def test_trichotomy_examples(scale, expected):
    assert threshold_trichotomy(-scale * np.eye(2), C2) is expected


def test_trichotomy_accepts_vector_diagonal():
    assert threshold_trichotomy(np.array([-2.0, -2.0]), C2) is Threshold.BELOW


def test_trichotomy_rejects_nonnegative_diagonal():
    with pytest.raises(ValidationError):
        threshold_trichotomy(np.array([-1.0, 0.0]), C2)


def test_lyapunov_symmetric_case():
    M = -np.eye(2) + 0.5 * C2
    P = diagonal_lyapunov(M)
    np.testing.assert_allclose(P, np.eye(2) * P[0, 0])
    Q = M.T @ (P / P[0, 0]) + (P / P[0, 0]) @ M
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(Q)), [-3.0, -1.0], atol=1e-12)


def test_lyapunov_critical_case():
    M = np.array([[-1.0, 2.0], [0.5, -1.0]])
    assert spectral_abscissa(M) == pytest.approx(0.0, abs=1e-12)
    P = diagonal_lyapunov(M)
    assert np.all(np.diag(P) > 0)
    assert np.max(np.linalg.eigvalsh(M.T @ P + P @ M)) == pytest.approx(0.0, abs=1e-9)


def test_lyapunov_scalar():
    np.testing.assert_allclose(diagonal_lyapunov(np.array([[-1.0]])), [[1.0]])


def test_sign_pattern_examples():
    assert sign_pattern_violation(C2, np.array([1.0, 0.0])) == 1
    assert sign_pattern_violation(np.ones((3, 3)), np.array([0.0, 1.0, 0.0])) in (0, 2)
    ring = np.roll(np.eye(5), 1, axis=0)
    assert sign_pattern_violation(ring, np.eye(5)[0]) == 1


@pytest.mark.parametrize("x", [np.zeros(2), np.ones(2)])
def test_sign_pattern_preconditions(x):
    with pytest.raises(PreconditionError):
        sign_pattern_violation(C2, x)


def test_negative_inverse_examples():
    inv = negative_inverse_check(np.array([[-2.0, 1.0], [1.0, -2.0]]))
    np.testing.assert_allclose(inv, np.array([[-2.0, -1.0], [-1.0, -2.0]]) / 3, atol=1e-14)
    assert np.all(negative_inverse_check(np.array([[-1.0, 0.5], [0.5, -1.0]])) < 0)
    M3 = np.ones((3, 3)) - 4 * np.eye(3)
    inv3 = negative_inverse_check(M3)
    assert np.all(inv3 < 0)
    np.testing.assert_allclose(inv3, np.linalg.inv(M3), atol=1e-14)


def test_negative_inverse_requires_hurwitz():
    with pytest.raises(PreconditionError):
        negative_inverse_check(C2 - 0.5 * np.eye(2))


def test_negative_inverse_reducible_is_inconsistent():
    # Hurwitz but reducible: the inverse has zero entries, which the check reports.
    with pytest.raises((ConsistencyError, ValidationError)):
        negative_inverse_check(-np.eye(2))
