import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bivirus.exceptions import DomainError, ValidationError
from bivirus.model import (
    BiVirusModel,
    HomogeneityKind,
    SystemState,
    VirusParams,
    bivirus_field,
    check_domain,
    domain_violation,
    homogeneity_profile,
    jacobian,
    single_virus_field,
    validate,
)
from bivirus.verify import random_interior_state, random_virus

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])
RING3 = np.roll(np.eye(3), 1, axis=0)


def two_cycle_model(d1=0.5, d2=0.5, b1=1.0, b2=1.0):
    return BiVirusModel(VirusParams([d1, d1], b1 * C2), VirusParams([d2, d2], b2 * C2))


def test_virus_params_shapes():
    with pytest.raises(ValidationError):
        VirusParams([0.5], C2)
    with pytest.raises(ValidationError):
        VirusParams([0.5, 0.5], np.ones((2, 3)))
    with pytest.raises(ValidationError):
        VirusParams([np.inf, 0.5], C2)


def test_virus_params_scalar_delta_broadcasts():
    p = VirusParams(0.5, C2)
    np.testing.assert_array_equal(p.delta, [0.5, 0.5])
    np.testing.assert_array_equal(p.D, 0.5 * np.eye(2))


def test_virus_params_are_read_only():
    p = VirusParams([0.5, 0.5], C2)
    with pytest.raises(ValueError):
        p.B[0, 0] = 1.0


def test_from_decimal_strings_keeps_exact_values():
    p = VirusParams.from_decimal_strings(["0.1", "0.1"], [["0", "0.3"], ["0.3", "0"]])
    from fractions import Fraction
    assert p.exact[0][0] == Fraction(1, 10)
    assert p.delta[0] == 0.1


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        BiVirusModel(VirusParams([1.0], [[1.0]]), VirusParams([0.5, 0.5], C2))


def test_validate_homogeneous_two_cycle():
    report = validate(two_cycle_model())
    assert report.ok
    assert report.profile.kind is HomogeneityKind.IDENTICAL_PARAMS
    report = validate(two_cycle_model(d2=0.25))
    assert report.ok
    assert report.profile.kind is HomogeneityKind.HOMOGENEOUS_SAME_GRAPH
    assert (report.profile.delta1, report.profile.beta1, report.profile.delta2) == (0.5, 1.0, 0.25)


def test_validate_reducible():
    m = BiVirusModel(VirusParams([0.5, 0.5], [[1.0, 1.0], [0.0, 1.0]]), VirusParams([0.5, 0.5], C2))
    report = validate(m)
    assert not report.ok
    assert report.failures == ["virus1.B_irreducible"]


def test_validate_negative_rates():
    m = BiVirusModel(VirusParams([-0.5, 0.5], C2), VirusParams([0.5, 0.5], -C2))
    # a negated B has no positive arcs, so it is reducible as well
    assert set(validate(m).failures) == {"virus1.delta_nonnegative", "virus2.B_nonnegative", "virus2.B_irreducible"}


def test_validate_identical_on_ring():
    p = VirusParams([0.2, 0.3, 0.4], RING3)
    report = validate(BiVirusModel(p, VirusParams(p.delta.copy(), p.B.copy())))
    assert report.ok and report.profile.kind is HomogeneityKind.IDENTICAL_PARAMS


def test_zero_healing_warns_for_sensitivity():
    m = two_cycle_model(d1=0.0)
    assert validate(m, for_sensitivity=True).warnings
    assert not validate(m).warnings


def test_general_profile():
    m = BiVirusModel(VirusParams([0.5, 0.4], C2), VirusParams([0.5, 0.5], C2))
    assert homogeneity_profile(m).kind is HomogeneityKind.GENERAL


def test_domain():
    good = SystemState(np.array([0.5, 0.0]), np.array([0.5, 1.0]))
    check_domain(good)
    assert domain_violation(np.array([0.7]), np.array([0.4])) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        check_domain(SystemState(np.array([0.7]), np.array([0.4])))
    with pytest.raises(DomainError):
        check_domain(SystemState(np.array([-0.1]), np.array([0.4])))


def test_healthy_state_is_equilibrium():
    dx1, dx2 = bivirus_field(two_cycle_model(), SystemState.healthy(2))
    assert not dx1.any() and not dx2.any()


def test_scalar_fixed_point():
    m = BiVirusModel(VirusParams([0.5], [[1.0]]), VirusParams([0.5], [[1.0]]))
    dx1, dx2 = bivirus_field(m, SystemState(np.array([0.5]), np.array([0.0])))
    assert dx1[0] == 0.0 and dx2[0] == 0.0


def test_saturated_nodes_do_not_grow():
    rng = np.random.default_rng(3)
    m = BiVirusModel(random_virus(rng, 4, "super"), random_virus(rng, 4, "super"))
    x1 = rng.uniform(0, 1, 4)
    dx1, dx2 = bivirus_field(m, SystemState(x1, 1 - x1))
    assert np.all(dx1 <= 0) and np.all(dx2 <= 0)


def test_single_virus_field_examples():
    p = VirusParams([0.5, 0.5], C2)
    np.testing.assert_array_equal(single_virus_field(p, np.zeros(2)), 0)
    np.testing.assert_array_equal(single_virus_field(p, np.ones(2)), -p.delta)
    np.testing.assert_allclose(single_virus_field(p, np.full(2, 0.5)), 0, atol=1e-15)
    with pytest.raises(DomainError):
        single_virus_field(p, np.array([1.5, 0.0]))


def fd_jacobian(m, s, h=1e-6):
    y = s.stacked()
    cols = []
    for k in range(y.size):
        e = np.zeros_like(y)
        e[k] = h
        fp = np.concatenate(bivirus_field(m, SystemState.from_stacked(y + e), check=False))
        fm = np.concatenate(bivirus_field(m, SystemState.from_stacked(y - e), check=False))
        cols.append((fp - fm) / (2 * h))
    return np.column_stack(cols)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_jacobian_matches_central_differences(seed, n):
    rng = np.random.default_rng(seed)
    if n == 1:
        m = BiVirusModel(VirusParams(rng.uniform(0, 1, 1), rng.uniform(0, 2, (1, 1))),
                         VirusParams(rng.uniform(0, 1, 1), rng.uniform(0, 2, (1, 1))))
    else:
        m = BiVirusModel(random_virus(rng, n, "super"), random_virus(rng, n, "sub"))
    s = random_interior_state(rng, n)
    np.testing.assert_allclose(jacobian(m, s), fd_jacobian(m, s), atol=1e-6)


def test_jacobian_at_healthy_is_block_diagonal():
    m = two_cycle_model(0.5, 1.5)
    J = jacobian(m, SystemState.healthy(2))
    np.testing.assert_array_equal(J[:2, 2:], 0)
    np.testing.assert_array_equal(J[:2, :2], C2 - 0.5 * np.eye(2))
