"""scikit-learn style wrappers.

``fit`` takes the model (there is no training data: the parameters are the
model) and computes its regime and equilibria; ``predict`` maps a batch of
initial states, one per row, to the terminal states of the dynamics.
Hyper-parameters are the integrator and fixed-point settings, so
``get_params``/``set_params``/``clone`` behave as usual.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .dynamics import IntegratorConfig, Method, simulate, simulate_single
from .equilibria import FixedPointConfig, classify, enumerate_equilibria, epidemic_threshold, solve_epidemic
from .exceptions import DomainError, ValidationError
from .model import DOMAIN_TOL, BiVirusModel, SystemState, VirusParams, validate
from .spectral import EPS_CRIT

__all__ = ["BiVirusSIS", "SingleVirusSIS"]


class _SISBase(BaseEstimator):
    def __init__(self, method="RK45Adaptive", rtol=1e-8, atol=1e-10, t_max=1e4,
                 convergence_tol=1e-10, c_fraction=0.5, epsilon_scale=0.9, fp_tol=1e-12,
                 eps_crit=EPS_CRIT):
        self.method = method
        self.rtol = rtol
        self.atol = atol
        self.t_max = t_max
        self.convergence_tol = convergence_tol
        self.c_fraction = c_fraction
        self.epsilon_scale = epsilon_scale
        self.fp_tol = fp_tol
        self.eps_crit = eps_crit

    def _integrator_config(self):
        return IntegratorConfig(method=Method(self.method), rtol=self.rtol, atol=self.atol,
                                t_max=self.t_max, convergence_tol=self.convergence_tol)

    def _fp_config(self):
        return FixedPointConfig(c_fraction=self.c_fraction, epsilon_scale=self.epsilon_scale, tol=self.fp_tol)

    def _check_states(self, X, width):
        X = check_array(X, dtype=np.float64, ensure_min_features=width)
        if X.shape[1] != width:
            raise ValidationError(f"X has {X.shape[1]} columns, expected {width}")
        return X


class BiVirusSIS(_SISBase):
    """Bi-virus SIS model as an estimator.

    After ``fit(model)``:

    regime_ : RegimeLabel
    thresholds_ : (s1, s2), spectral abscissae of ``-D^k + B^k``
    equilibria_ : list of EquilibriumReport
    n_nodes_ : int
    """

    def fit(self, X, y=None):
        if not isinstance(X, BiVirusModel):
            raise ValidationError(f"fit expects a BiVirusModel, got {type(X).__name__}")
        report = validate(X)
        if not report.ok:
            raise ValidationError("model fails validation: " + ", ".join(report.failures))
        self.model_ = X
        self.regime_ = classify(X, self.eps_crit)
        self.thresholds_ = (self.regime_.s1, self.regime_.s2)
        self.equilibria_ = enumerate_equilibria(X, self._fp_config(), self.eps_crit)
        self.n_nodes_ = X.n
        return self

    def predict(self, X):
        """Terminal state ``[x1, x2]`` for each row ``[x1(0), x2(0)]`` of ``X``."""
        check_is_fitted(self)
        n = self.n_nodes_
        X = self._check_states(X, 2 * n)
        cfg = self._integrator_config()
        return np.vstack([simulate(self.model_, SystemState(row[:n], row[n:]), cfg).Y[-1] for row in X])


class SingleVirusSIS(_SISBase):
    """Single-virus SIS model.

    After ``fit(params)``: ``threshold_`` (s(-D + B)), ``epidemic_state_``
    (None when there is no epidemic state) and ``n_nodes_``.
    """

    def fit(self, X, y=None):
        if not isinstance(X, VirusParams):
            raise ValidationError(f"fit expects VirusParams, got {type(X).__name__}")
        report = validate(BiVirusModel(X, X))
        if not report.ok:
            raise ValidationError("parameters fail validation: " + ", ".join(report.failures))
        self.params_ = X
        self.threshold_ = epidemic_threshold(X)
        self.epidemic_state_ = solve_epidemic(X, self._fp_config()) if self.threshold_ > self.eps_crit else None
        self.n_nodes_ = X.n
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = self._check_states(X, self.n_nodes_)
        if np.any(X < -DOMAIN_TOL) or np.any(X > 1 + DOMAIN_TOL):
            raise DomainError("initial states must lie in [0, 1]")
        cfg = self._integrator_config()
        return np.vstack([simulate_single(self.params_, row, cfg).Y[-1] for row in X])
