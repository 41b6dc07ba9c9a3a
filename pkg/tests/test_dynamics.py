import io

import numpy as np
import pytest

from bivirus.dynamics import (
    IntegratorConfig,
    Method,
    TerminalReason,
    lyapunov_trace,
    positivity_time,
    simulate,
    simulate_single,
    stiffness_bound,
    write_trajectory_csv,
)
from bivirus.equilibria import solve_epidemic
from bivirus.exceptions import DomainError, ValidationError
from bivirus.model import BiVirusModel, SystemState, VirusParams
from bivirus.verify import random_interior_state, random_virus

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])
RING5 = np.roll(np.eye(5), 1, axis=0)


def model(d1, d2):
    return BiVirusModel(VirusParams([d1, d1], C2), VirusParams([d2, d2], C2))


def test_config_validation():
    with pytest.raises(ValidationError):
        IntegratorConfig(rtol=0)
    with pytest.raises(ValidationError):
        IntegratorConfig(record_stride=0)
    assert IntegratorConfig(method="RK4Fixed").method is Method.RK4_FIXED


@pytest.mark.parametrize("s0", [SystemState(np.array([0.3, 0.1]), np.array([0.2, 0.6])),
                                SystemState(np.array([0.01, 0.9]), np.array([0.9, 0.05]))])
def test_both_subcritical_goes_healthy(s0):
    rec = simulate(model(1.5, 1.5), s0)
    assert rec.converged
    assert np.max(np.abs(rec.Y[-1])) < 1e-6


def test_virus1_only_regime():
    rec = simulate(model(0.5, 1.5), SystemState(np.array([0.2, 0.3]), np.array([0.4, 0.1])))
    end = rec.terminal
    np.testing.assert_allclose(end.x1, [0.5, 0.5], atol=1e-6)
    np.testing.assert_allclose(end.x2, [0.0, 0.0], atol=1e-6)


def test_zero_virus_stays_zero():
    rec = simulate(model(0.5, 0.25), SystemState(np.zeros(2), np.array([0.3, 0.1])))
    assert np.all(rec.Y[:, :2] == 0)


def test_single_virus_logistic_closed_form():
    # dz/dt = z (1 - delta - z) with beta = 1: logistic toward 1 - delta.
    p = VirusParams([0.25], [[1.0]])
    rec = simulate_single(p, [0.1], IntegratorConfig(t_max=5.0, rtol=1e-10, atol=1e-12))
    r, K, z0 = 0.75, 0.75, 0.1
    exact = K / (1 + (K / z0 - 1) * np.exp(-r * rec.times))
    np.testing.assert_allclose(rec.Y[:, 0], exact, atol=1e-8)
    assert rec.terminal_reason is TerminalReason.MAX_TIME


def test_rk4_fixed_agrees_with_adaptive():
    p = VirusParams([0.5, 0.5], C2)
    a = simulate_single(p, [0.1, 0.2]).Y[-1]
    b = simulate_single(p, [0.1, 0.2], IntegratorConfig(method="RK4Fixed", dt=0.05)).Y[-1]
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_single_virus_regimes():
    rng = np.random.default_rng(0)
    sub = random_virus(rng, 5, "sub")
    assert np.max(simulate_single(sub, rng.uniform(0, 1, 5)).Y[-1]) < 1e-6
    sup = random_virus(rng, 5, "super")
    np.testing.assert_allclose(simulate_single(sup, rng.uniform(0, 1, 5)).Y[-1], solve_epidemic(sup), atol=1e-6)
    zero = simulate_single(sup, np.zeros(5))
    assert zero.converged and not zero.Y.any()


def test_initial_state_checks():
    with pytest.raises(DomainError):
        simulate(model(0.5, 0.5), SystemState(np.array([0.7, 0.0]), np.array([0.7, 0.0])))
    with pytest.raises(ValidationError):
        simulate(model(0.5, 0.5), SystemState(np.zeros(3), np.zeros(3)))
    with pytest.raises(ValidationError):
        simulate_single(VirusParams([0.5, 0.5], C2), [1.5, 0.0])


def test_trajectory_stays_in_invariant_set():
    rng = np.random.default_rng(11)
    m = BiVirusModel(random_virus(rng, 6, "super"), random_virus(rng, 6, "super"))
    rec = simulate(m, random_interior_state(rng, 6), IntegratorConfig(rtol=1e-10, atol=1e-12))
    assert rec.max_violation < 1e-9
    assert np.all(rec.Y >= 0)
    assert np.all(rec.Y[:, :6] + rec.Y[:, 6:] <= 1)


def test_stiffness_bound_dominates_jacobian_norm():
    from bivirus.model import jacobian
    rng = np.random.default_rng(5)
    m = BiVirusModel(random_virus(rng, 5, "super"), random_virus(rng, 5, "sub"))
    bound = stiffness_bound(m)
    for _ in range(20):
        J = jacobian(m, random_interior_state(rng, 5))
        assert np.max(np.abs(J).sum(axis=1)) <= bound


def test_record_stride():
    p = VirusParams([0.5, 0.5], C2)
    full = simulate_single(p, [0.1, 0.2])
    thin = simulate_single(p, [0.1, 0.2], IntegratorConfig(record_stride=5))
    assert len(thin.times) < len(full.times)
    np.testing.assert_array_equal(thin.Y[-1], full.Y[-1])


def test_positivity_time_examples():
    tau = positivity_time(VirusParams([0.5, 0.5], C2), [1.0, 0.0])
    assert 0 < tau < np.inf
    assert positivity_time(VirusParams([0.5, 0.5], C2), [0.3, 0.2]) == 0.0
    assert 0 < positivity_time(VirusParams(np.full(5, 0.5), RING5), np.eye(5)[0]) < np.inf
    with pytest.raises(ValidationError):
        positivity_time(VirusParams([0.5, 0.5], C2), [0.0, 0.0])


def test_lyapunov_trace_examples():
    p = VirusParams([0.5, 0.5], C2)
    x = solve_epidemic(p)
    _, V = lyapunov_trace(p, x, x)
    assert np.all(V < 1e-12)
    _, V = lyapunov_trace(p, np.zeros(2), x)
    np.testing.assert_array_equal(V, 1.0)
    _, V = lyapunov_trace(p, np.array([0.9, 0.05]), x)
    assert np.all(np.diff(V) <= 1e-12) and V[-1] < 1e-6


def test_csv_format():
    rec = simulate(model(0.5, 0.25), SystemState(np.array([0.2, 0.2]), np.array([0.3, 0.3])),
                   IntegratorConfig(t_max=1.0))
    text = write_trajectory_csv(rec)
    lines = text.splitlines()
    assert lines[0] == "t,x1_0,x1_1,x2_0,x2_1"
    assert len(lines) == len(rec.times) + 1
    back = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    np.testing.assert_array_equal(back[:, 1:], rec.Y)
    single = simulate_single(VirusParams([0.5, 0.5], C2), [0.1, 0.2], IntegratorConfig(t_max=1.0))
    assert write_trajectory_csv(single).startswith("t,z_0,z_1\n")


def test_simulation_is_deterministic():
    rng = np.random.default_rng(2)
    m = BiVirusModel(random_virus(rng, 4, "super"), random_virus(rng, 4, "super"))
    s0 = random_interior_state(rng, 4)
    assert write_trajectory_csv(simulate(m, s0)) == write_trajectory_csv(simulate(m, s0))


def test_oversized_fixed_step_is_caught_as_domain_error():
    B = 20 * C2
    m = BiVirusModel(VirusParams([5.0, 5.0], B), VirusParams([5.0, 5.0], B))
    s0 = SystemState(np.array([0.5, 0.5]), np.array([0.5, 0.49]))
    rec = simulate(m, s0, IntegratorConfig(method="RK4Fixed", dt=0.2))
    assert rec.terminal_reason is TerminalReason.DOMAIN_ERROR
    assert rec.max_violation > 1e-9
    rec = simulate(m, s0, IntegratorConfig(method="RK4Fixed", dt=0.02))
    assert rec.converged and rec.max_violation < 1e-9
