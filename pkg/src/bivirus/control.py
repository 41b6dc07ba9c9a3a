"""Proportional healing feedback ``delta_i(t) = k_i x_i(t)`` and its impossibility result.

Under this feedback the single-virus system is again an SIS system with
healing matrix K and infection matrix K + B, whose threshold quantity
rho(I + K^{-1} B) always exceeds one, so the healthy state repels.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import IntegratorConfig, simulate, simulate_single, stiffness_bound
from .equilibria import solve_epidemic, stability_verdict
from .exceptions import ConsistencyError, PreconditionError, ValidationError
from .model import VirusParams, check_domain
from .spectral import EPS_CRIT, spectral_abscissa, spectral_radius

__all__ = [
    "DEFAULT_EPSILONS",
    "FeedbackGains",
    "RepellerReport",
    "RepellerRun",
    "bivirus_feedback_simulate",
    "closed_loop_transform",
    "constant_healing_baseline",
    "feedback_field",
    "feedback_jacobian_at_healthy",
    "healthy_state_verdict_under_feedback",
    "repeller_experiment",
    "single_feedback_field",
]

DEFAULT_EPSILONS = (1e-6, 1e-4, 1e-2)
N_RANDOM_DIRECTIONS = 10
TARGET_TOL = 1e-6
BASELINE_T_MAX = 200.0


def _gains(k, n):
    k = np.asarray(k, dtype=float)
    if k.ndim == 0:
        k = np.full(n, float(k))
    if k.shape != (n,):
        raise ValidationError(f"gain vector has shape {k.shape}, expected ({n},)")
    if np.any(k <= 0):
        raise PreconditionError(f"feedback gains must be positive, got {k.tolist()}")
    return k


@dataclass(frozen=True, eq=False)
class FeedbackGains:
    k1: np.ndarray
    k2: np.ndarray

    def __post_init__(self):
        k1 = np.asarray(self.k1, dtype=float)
        object.__setattr__(self, "k1", _gains(k1, k1.size))
        object.__setattr__(self, "k2", _gains(self.k2, k1.size))


def closed_loop_transform(p, k):
    """Open-loop parameters ``(delta=k, B=K+B)`` equivalent to feedback with gains ``k``."""
    k = _gains(k, p.n)
    rho = spectral_radius(np.eye(p.n) + p.B / k[:, None])
    if not rho > 1:
        raise ConsistencyError(f"rho(I + K^-1 B) = {rho} is not above one")
    return VirusParams(k, np.diag(k) + p.B)


def single_feedback_field(p, k, z):
    return -k * z * z + (1.0 - z) * (p.B @ z)


def feedback_field(m, gains, s):
    """Two-virus field with each healing rate replaced by ``k_i * x_i``."""
    healthy = 1.0 - s.x1 - s.x2
    dx1 = -gains.k1 * s.x1 * s.x1 + healthy * (m.virus1.B @ s.x1)
    dx2 = -gains.k2 * s.x2 * s.x2 + healthy * (m.virus2.B @ s.x2)
    return dx1, dx2


def feedback_jacobian_at_healthy(m):
    """The feedback term is quadratic, so the linearisation at zero is ``blockdiag(B1, B2)``."""
    n = m.n
    J = np.zeros((2 * n, 2 * n))
    J[:n, :n] = m.virus1.B
    J[n:, n:] = m.virus2.B
    return J


def _feedback_rhs(m, gains):
    n = m.n
    k1, k2, B1, B2 = gains.k1, gains.k2, m.virus1.B, m.virus2.B

    def rhs(y):
        x1, x2 = y[:n], y[n:]
        healthy = 1.0 - x1 - x2
        return np.concatenate([-k1 * x1 * x1 + healthy * (B1 @ x1), -k2 * x2 * x2 + healthy * (B2 @ x2)])

    return rhs


def bivirus_feedback_simulate(m, gains, s0, cfg=None):
    if gains.k1.size != m.n:
        raise ValidationError(f"gains are for {gains.k1.size} nodes, model has {m.n}")
    check_domain(s0)
    bound = stiffness_bound(m, (gains.k1, gains.k2))
    return simulate(m, s0, cfg, rhs=_feedback_rhs(m, gains), stiffness=bound)


def _simulate_closed_loop(p, k, z0, cfg):
    bound = stiffness_bound([p], [k])
    return simulate_single(p, z0, cfg, rhs=lambda z: single_feedback_field(p, k, z), stiffness=bound)


@dataclass
class RepellerRun:
    epsilon: float
    direction: np.ndarray
    terminal: np.ndarray
    target_error: float
    min_norm: float
    escaped: bool
    converged: bool

    @property
    def ok(self):
        return self.converged and self.escaped and self.target_error < TARGET_TOL

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "direction": self.direction.tolist(),
            "terminal": self.terminal.tolist(),
            "target_error": self.target_error,
            "min_norm": self.min_norm,
            "escaped": self.escaped,
            "converged": self.converged,
            "verdict": "repelled" if self.ok else "counterexample",
        }


@dataclass
class RepellerReport:
    gains: np.ndarray
    rho: float
    x_star: np.ndarray
    runs: list = field(default_factory=list)
    baseline: dict = None

    @property
    def ok(self):
        return all(r.ok for r in self.runs) and (self.baseline is None or self.baseline["ok"])

    @property
    def counterexamples(self):
        return [r for r in self.runs if not r.ok]

    def to_dict(self):
        return {
            "gains": self.gains.tolist(),
            "rho_I_plus_Kinv_B": self.rho,
            "x_star": self.x_star.tolist(),
            "runs": [r.to_dict() for r in self.runs],
            "baseline": self.baseline,
            "ok": self.ok,
        }


def constant_healing_baseline(p, z0=None, t_max=BASELINE_T_MAX, cfg=None, eps_crit=EPS_CRIT):
    """Run with constant ``delta_i = sum_j beta_ij``, which puts ``s(-D + B)`` exactly at zero.

    At criticality the decay is algebraic, so field-norm convergence is not
    the test.  Instead the max-norm must be non-increasing and stay under the
    envelope ``1 / (1/|z0| + min(delta) t)``, which follows from
    ``dz_i/dt <= -delta_i z_i^2`` at the largest coordinate and forces
    convergence to the healthy state.
    """
    cfg = replace(cfg or IntegratorConfig(), t_max=t_max)
    base = VirusParams(p.B.sum(axis=1), p.B)
    s = spectral_abscissa(-base.D + base.B)
    z0 = np.full(p.n, 0.5) if z0 is None else np.asarray(z0, dtype=float)
    rec = simulate_single(base, z0, cfg)
    norms = np.max(rec.Y, axis=1)
    envelope = 1.0 / (1.0 / norms[0] + base.delta.min() * rec.times)
    monotone = bool(np.all(np.diff(norms) <= 1e-15))
    within = bool(np.all(norms <= envelope * (1 + 1e-6) + 1e-12))
    return {
        "delta": base.delta.tolist(),
        "spectral_abscissa": s,
        "critical": abs(s) <= eps_crit,
        "final_time": float(rec.times[-1]),
        "final_norm": float(norms[-1]),
        "envelope": float(envelope[-1]),
        "norm_nonincreasing": monotone,
        "within_envelope": within,
        "ok": abs(s) <= eps_crit and monotone and within,
    }


def repeller_experiment(p, k, epsilons=DEFAULT_EPSILONS, n_random=N_RANDOM_DIRECTIONS, seed=0,
                        cfg=None, fp_cfg=None, baseline=True):
    """Perturb the healthy state in axis and random positive directions and run the closed loop.

    Every run must converge to the epidemic state of the transformed system
    and end farther from zero than it started.
    """
    k = _gains(k, p.n)
    cfg = cfg or IntegratorConfig()
    transformed = closed_loop_transform(p, k)
    rho = spectral_radius(np.eye(p.n) + p.B / k[:, None])
    x_star = solve_epidemic(transformed, fp_cfg)
    rng = np.random.default_rng(seed)
    directions = list(np.eye(p.n))
    for _ in range(n_random):
        d = rng.uniform(0.0, 1.0, p.n) + 1e-3
        directions.append(d / d.max())
    report = RepellerReport(k, rho, x_star)
    for eps in epsilons:
        for d in directions:
            z0 = eps * d
            rec = _simulate_closed_loop(p, k, z0, cfg)
            norms = np.max(rec.Y, axis=1)
            report.runs.append(RepellerRun(
                epsilon=float(eps),
                direction=d,
                terminal=rec.Y[-1].copy(),
                target_error=float(np.max(np.abs(rec.Y[-1] - x_star))),
                min_norm=float(norms.min()),
                escaped=bool(norms[-1] > norms[0] and norms.min() > 0),
                converged=rec.converged,
            ))
    if baseline:
        report.baseline = constant_healing_baseline(p, cfg=cfg)
    return report


def healthy_state_verdict_under_feedback(m):
    return stability_verdict(feedback_jacobian_at_healthy(m))
