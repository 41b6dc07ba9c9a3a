import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from bivirus import BiVirusSIS, SingleVirusSIS
from bivirus.equilibria import Regime, Verdict
from bivirus.exceptions import ValidationError
from bivirus.model import BiVirusModel, VirusParams

C2 = np.array([[0.0, 1.0], [1.0, 0.0]])
M = BiVirusModel(VirusParams([0.5, 0.5], C2), VirusParams([0.25, 0.25], C2))


def test_params_roundtrip():
    est = BiVirusSIS(rtol=1e-9, t_max=500.0)
    params = est.get_params()
    assert params["rtol"] == 1e-9 and params["t_max"] == 500.0
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(c_fraction=0.3)
    assert est.c_fraction == 0.3


def test_fit_sets_attributes():
    est = BiVirusSIS().fit(M)
    assert est.regime_.regime is Regime.BOTH_SUPERCRITICAL
    assert est.thresholds_ == pytest.approx((0.5, 0.75))
    assert [r.verdict for r in est.equilibria_] == [Verdict.UNSTABLE, Verdict.UNSTABLE, Verdict.LOCALLY_STABLE]
    assert est.n_nodes_ == 2


def test_predict_terminal_states():
    est = BiVirusSIS().fit(M)
    X = np.array([[0.2, 0.2, 0.3, 0.3], [0.5, 0.1, 0.01, 0.01]])
    Y = est.predict(X)
    assert Y.shape == (2, 4)
    np.testing.assert_allclose(Y[:, :2], 0, atol=1e-6)
    np.testing.assert_allclose(Y[:, 2:], 0.75, atol=1e-6)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        BiVirusSIS().predict(np.zeros((1, 4)))


def test_input_validation():
    est = BiVirusSIS().fit(M)
    with pytest.raises(ValueError):
        est.predict(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        est.predict(np.array([[np.nan, 0, 0, 0]]))
    with pytest.raises(ValidationError):
        BiVirusSIS().fit(np.zeros((2, 2)))
    bad = BiVirusModel(VirusParams([0.5, 0.5], [[1.0, 1.0], [0.0, 1.0]]), VirusParams([0.5, 0.5], C2))
    with pytest.raises(ValidationError):
        BiVirusSIS().fit(bad)


def test_single_virus_estimator():
    est = SingleVirusSIS().fit(VirusParams([0.5, 0.5], C2))
    assert est.threshold_ == pytest.approx(0.5)
    np.testing.assert_allclose(est.epidemic_state_, [0.5, 0.5], atol=1e-10)
    np.testing.assert_allclose(est.predict([[0.1, 0.9]]), [[0.5, 0.5]], atol=1e-6)
    sub = SingleVirusSIS().fit(VirusParams([1.5, 1.5], C2))
    assert sub.epidemic_state_ is None
    assert np.max(sub.predict([[0.5, 0.5]])) < 1e-6
