import numpy as np
import pytest

from bivirus.equilibria import solve_epidemic
from bivirus.exceptions import PreconditionError, ValidationError
from bivirus.model import VirusParams
from bivirus.sensitivity import (
    Perturbation,
    finite_difference,
    monotonicity_report,
    sensitivity_matrix,
    sensitivity_solve,
    write_sensitivity_csv,
)
from bivirus.verify import random_virus

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])
P2 = VirusParams([0.5, 0.5], C2)


def test_scalar_example():
    p = VirusParams([0.5], [[1.0]])
    res = sensitivity_solve(p, np.array([0.5]), Perturbation([0.01], [[0.0]]))
    assert res.d_x[0] == pytest.approx(-0.01, abs=1e-15)


@pytest.mark.parametrize("beta, delta", [(1.0, 0.5), (2.0, 0.3), (0.7, 0.1)])
def test_scalar_derivative_is_minus_one_over_beta(beta, delta):
    p = VirusParams([delta], [[beta]])
    d = sensitivity_solve(p, solve_epidemic(p), Perturbation.healing(1, 0, 1.0)).d_x[0]
    assert abs(d + 1 / beta) < 1e-10


def test_zero_perturbation():
    np.testing.assert_array_equal(sensitivity_solve(P2, np.full(2, 0.5), Perturbation.zero(2)).d_x, 0)


def test_two_cycle_matches_finite_difference():
    pert = Perturbation.healing(2, 0, 1.0)
    analytic = sensitivity_solve(P2, solve_epidemic(P2), pert * 1e-6).d_x
    fd = finite_difference(P2, pert, 1e-6)
    assert np.max(np.abs(analytic - fd)) / np.max(np.abs(fd)) < 1e-3


def test_random_models_match_finite_difference():
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = random_virus(rng, 5, "super")
        x = solve_epidemic(p)
        pert = Perturbation(rng.uniform(-1, 1, 5), rng.uniform(0, 1, (5, 5)) * (p.B > 0))
        analytic = sensitivity_solve(p, x, pert * 1e-6).d_x
        fd = finite_difference(p, pert, 1e-6)
        assert np.max(np.abs(analytic - fd)) / np.max(np.abs(fd)) < 1e-3


def test_system_matrix_is_the_single_virus_jacobian():
    x = np.array([0.3, 0.6])
    h = 1e-6
    f = lambda z: -P2.delta * z + (1 - z) * (P2.B @ z)
    fd = np.column_stack([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(sensitivity_matrix(P2, x), fd, atol=1e-8)


def test_monotonicity_two_cycle():
    rows = {r.parameter: r for r in monotonicity_report(P2, solve_epidemic(P2), 1e-4)}
    assert np.all(rows["delta[0]"].d_x < 0) and rows["delta[0]"].ok
    assert np.all(rows["beta[0,1]"].d_x > 0) and rows["beta[0,1]"].ok
    assert len(rows) == 4


def test_monotonicity_zero_step():
    rows = monotonicity_report(P2, solve_epidemic(P2), 0.0)
    assert all(r.verdict == "neutral" and not r.d_x.any() for r in rows)


def test_preconditions():
    with pytest.raises(PreconditionError):
        sensitivity_solve(VirusParams([0.0, 0.5], C2), np.full(2, 0.5), Perturbation.zero(2))
    with pytest.raises(PreconditionError):
        sensitivity_solve(P2, np.array([0.5, 0.0]), Perturbation.zero(2))
    with pytest.raises(ValidationError):
        sensitivity_solve(P2, np.full(2, 0.5), Perturbation.zero(3))
    with pytest.raises(ValidationError):
        Perturbation([0.1, 0.2], np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        Perturbation.healing(2, 0, -1.0).apply(P2)


def test_csv():
    text = write_sensitivity_csv(monotonicity_report(P2, solve_epidemic(P2), 1e-4))
    lines = text.splitlines()
    assert lines[0] == "parameter,dx_0,dx_1,verdict"
    assert lines[1].startswith("delta[0],-") and lines[1].endswith(",decreasing")
