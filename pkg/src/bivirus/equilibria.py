"""Regime classification, epidemic-state solver and equilibrium stability."""

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, simulate
from .exceptions import ConsistencyError, NumericalError, PreconditionError, ValidationError
from .model import (
    HomogeneityKind,
    SystemState,
    VirusParams,
    bivirus_field,
    homogeneity_profile,
    jacobian,
)
from .spectral import EPS_CRIT, perron_pair, spectral_abscissa

__all__ = [
    "CoexistenceContinuum",
    "ContinuumPoint",
    "EquilibriumKind",
    "EquilibriumReport",
    "Fitness",
    "FixedPointConfig",
    "Regime",
    "RegimeLabel",
    "Verdict",
    "classify",
    "coexistence_continuum",
    "enumerate_equilibria",
    "epidemic_initializer",
    "epidemic_residual",
    "epidemic_threshold",
    "fitness_comparison",
    "fixed_point_map",
    "solve_epidemic",
    "stability_verdict",
]

RESIDUAL_TOL = 1e-10
PARALLEL_TOL = 1e-6


class Regime(str, enum.Enum):
    BOTH_SUBCRITICAL = "BothSubcritical"
    VIRUS1_ONLY = "Virus1Only"
    VIRUS2_ONLY = "Virus2Only"
    BOTH_SUPERCRITICAL = "BothSupercritical"


class Fitness(str, enum.Enum):
    VIRUS1_FITTER = "Virus1Fitter"
    VIRUS2_FITTER = "Virus2Fitter"
    EQUAL_FITNESS = "EqualFitness"


class Verdict(str, enum.Enum):
    LOCALLY_STABLE = "LocallyStable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


class EquilibriumKind(str, enum.Enum):
    HEALTHY = "Healthy"
    VIRUS1_EPIDEMIC = "Virus1Epidemic"
    VIRUS2_EPIDEMIC = "Virus2Epidemic"
    COEXISTING = "Coexisting"


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    fitness: Fitness = None
    s1: float = None
    s2: float = None

    def __str__(self):
        return self.regime.value if self.fitness is None else f"{self.regime.value}/{self.fitness.value}"


@dataclass(frozen=True)
class FixedPointConfig:
    c_fraction: float = 0.5
    epsilon_scale: float = 0.9
    tol: float = 1e-12
    max_iter: int = 100_000

    def __post_init__(self):
        if not 0 < self.c_fraction < 1:
            raise ValidationError(f"c_fraction must lie in (0, 1), got {self.c_fraction}")
        if not 0 < self.epsilon_scale <= 1:
            raise ValidationError(f"epsilon_scale must lie in (0, 1], got {self.epsilon_scale}")
        if not self.tol > 0 or self.max_iter < 1:
            raise ValidationError("tol and max_iter must be positive")


@dataclass(frozen=True)
class CoexistenceContinuum:
    """Equal-fitness family ``{(theta*total, (1-theta)*total) : 0 < theta < 1}``."""

    total: np.ndarray

    def point(self, theta):
        return SystemState(theta * self.total, (1.0 - theta) * self.total)


@dataclass
class EquilibriumReport:
    point: SystemState
    residual: float
    jacobian_spectral_abscissa: float
    verdict: Verdict
    kind: EquilibriumKind
    continuum: CoexistenceContinuum = field(default=None, repr=False)

    def to_dict(self):
        out = {
            "kind": self.kind.value,
            "point": {"x1": self.point.x1.tolist(), "x2": self.point.x2.tolist()},
            "residual": self.residual,
            "jacobian_abscissa": self.jacobian_spectral_abscissa,
            "verdict": self.verdict.value,
        }
        if self.continuum is not None:
            out["coexistence_continuum"] = {"total": self.continuum.total.tolist()}
        return out


def epidemic_threshold(p):
    """``s(-D + B)``, from the Perron pair of the irreducible Metzler matrix."""
    return perron_pair(-p.D + p.B).value


def fitness_comparison(profile, rel_tol=1e-12):
    """Compare ``delta/beta`` of the two homogeneous viruses; the smaller ratio is fitter.

    Exact Fraction ratios are used when both viruses were authored as decimal
    strings; otherwise floats are compared with relative tolerance ``rel_tol``.
    """
    if profile.delta1 is None:
        return None
    if profile.ratios_exact is not None:
        r1, r2 = profile.ratios_exact
        equal = r1 == r2
    else:
        r1, r2 = profile.delta1 / profile.beta1, profile.delta2 / profile.beta2
        equal = abs(r1 - r2) <= rel_tol * max(abs(r1), abs(r2))
    if equal:
        return Fitness.EQUAL_FITNESS
    return Fitness.VIRUS1_FITTER if r1 < r2 else Fitness.VIRUS2_FITTER


def classify(m, eps_crit=EPS_CRIT):
    """Regime of ``m`` from the signs of ``s(-D^k + B^k)``; critical counts as subcritical."""
    s1, s2 = (epidemic_threshold(p) for p in m)
    up1, up2 = s1 > eps_crit, s2 > eps_crit
    if up1 and up2:
        regime = Regime.BOTH_SUPERCRITICAL
    elif up1:
        regime = Regime.VIRUS1_ONLY
    elif up2:
        regime = Regime.VIRUS2_ONLY
    else:
        regime = Regime.BOTH_SUBCRITICAL
    fitness = None
    if regime is Regime.BOTH_SUPERCRITICAL:
        profile = homogeneity_profile(m)
        if profile.kind is HomogeneityKind.IDENTICAL_PARAMS:
            fitness = Fitness.EQUAL_FITNESS
        elif profile.kind is HomogeneityKind.HOMOGENEOUS_SAME_GRAPH:
            fitness = fitness_comparison(profile)
    return RegimeLabel(regime, fitness, s1, s2)


def fixed_point_map(p, c):
    """The monotone map whose fixed point in (0, 1]^n is the epidemic state.

    ``f_i(x) = y_i / (1 - c/(c + delta_i) + y_i)`` with ``y = (D + cI)^{-1} B x``.
    """
    inv_dbar = 1.0 / (p.delta + c)
    base = 1.0 - c * inv_dbar
    DB = inv_dbar[:, None] * p.B

    def f(x):
        y = DB @ x
        return y / (base + y)

    return f


@dataclass(frozen=True)
class _Initializer:
    c: float
    r: float
    v: np.ndarray
    epsilon: float
    x0: np.ndarray


def epidemic_initializer(p, cfg=None):
    """Shift ``c``, radius ``r = rho((D+cI)^{-1} B)``, Perron vector ``v`` and the
    starting point ``epsilon * v`` (below the fixed point, strictly inside (0, 1))."""
    cfg = cfg or FixedPointConfig()
    s = epidemic_threshold(p)
    if s <= 0:
        raise PreconditionError(f"no epidemic state: s(-D+B) = {s:.3e} <= 0")
    c = cfg.c_fraction * s
    pair = perron_pair((1.0 / (p.delta + c))[:, None] * p.B)
    r, v = pair.value, pair.right
    if r <= 1:
        raise ConsistencyError(f"rho((D+cI)^-1 B) = {r} <= 1 although s(-D+B) > c")
    epsilon = cfg.epsilon_scale * np.min((r - 1.0) / (r * v))
    return _Initializer(c, r, v, epsilon, epsilon * v)


def epidemic_residual(p, x):
    return float(np.max(np.abs(-p.delta * x + (1.0 - x) * (p.B @ x))))


def solve_epidemic(p, cfg=None, x0=None):
    """Unique strictly positive equilibrium of the single-virus system.

    Iterates the monotone map from ``epsilon * v`` (or from ``x0``, which
    should lie in ``[epsilon * v, 1]``) until successive iterates differ by
    less than ``cfg.tol`` in the max norm.  Requires ``s(-D + B) > 0``.
    """
    cfg = cfg or FixedPointConfig()
    init = epidemic_initializer(p, cfg)
    f = fixed_point_map(p, init.c)
    x = init.x0 if x0 is None else np.asarray(x0, dtype=float)
    if x.shape != (p.n,) or np.any(x <= 0) or np.any(x > 1):
        raise ValidationError("initial iterate must lie in (0, 1]^n")
    for _ in range(cfg.max_iter):
        x_new = f(x)
        if np.max(np.abs(x_new - x)) < cfg.tol:
            x = x_new
            break
        x = x_new
    else:
        raise NumericalError(f"epidemic fixed point not reached in {cfg.max_iter} iterations")
    res = epidemic_residual(p, x)
    if res > RESIDUAL_TOL or np.any(x <= 0):
        raise NumericalError(f"epidemic state failed verification (residual {res:.3e}, min {x.min():.3e})")
    return x


def stability_verdict(J, eps_crit=EPS_CRIT):
    s = spectral_abscissa(J)
    if s < -eps_crit:
        return Verdict.LOCALLY_STABLE
    if s > eps_crit:
        return Verdict.UNSTABLE
    return Verdict.MARGINAL


def _report(m, point, kind, eps_crit, continuum=None):
    dx1, dx2 = bivirus_field(m, point)
    J = jacobian(m, point)
    return EquilibriumReport(
        point=point,
        residual=float(max(np.max(np.abs(dx1)), np.max(np.abs(dx2)))),
        jacobian_spectral_abscissa=spectral_abscissa(J),
        verdict=stability_verdict(J, eps_crit),
        kind=kind,
        continuum=continuum,
    )


def _continuum_total(m, profile, fp_cfg):
    if profile.kind is HomogeneityKind.IDENTICAL_PARAMS:
        return solve_epidemic(m.virus1, fp_cfg)
    ratio = profile.delta1 / profile.beta1
    return solve_epidemic(VirusParams(np.full(m.n, ratio), profile.A), fp_cfg)


def enumerate_equilibria(m, fp_cfg=None, eps_crit=EPS_CRIT):
    """Healthy state plus each single-virus epidemic state that exists.

    With equal fitness on a shared graph (or identical parameters) the report
    list also carries the coexistence continuum on the first supercritical
    report's ``continuum`` field.
    """
    label = classify(m, eps_crit)
    n = m.n
    zero = np.zeros(n)
    reports = [_report(m, SystemState(zero, zero), EquilibriumKind.HEALTHY, eps_crit)]
    continuum = None
    if label.fitness is Fitness.EQUAL_FITNESS:
        continuum = CoexistenceContinuum(_continuum_total(m, homogeneity_profile(m), fp_cfg))
    if label.s1 > eps_crit:
        x1 = solve_epidemic(m.virus1, fp_cfg)
        reports.append(_report(m, SystemState(x1, zero), EquilibriumKind.VIRUS1_EPIDEMIC, eps_crit, continuum))
    if label.s2 > eps_crit:
        x2 = solve_epidemic(m.virus2, fp_cfg)
        reports.append(_report(m, SystemState(zero, x2), EquilibriumKind.VIRUS2_EPIDEMIC, eps_crit, continuum))
    return reports


@dataclass(frozen=True)
class ContinuumPoint:
    alpha: float
    point: SystemState
    max_rel_deviation: float


def coexistence_continuum(m, ics, cfg=None, fp_cfg=None):
    """Simulate from each initial state and fit ``x1 = alpha * x2`` at the endpoint.

    Requires equal fitness on a shared graph with both viruses supercritical,
    or identical parameters with ``s(-D + B) > 0``.  Each endpoint is checked
    for parallelism (relative deviation < 1e-6) and its sum against the
    single-virus epidemic state of the equal-fitness system; a failed check
    raises ConsistencyError.
    """
    cfg = cfg or IntegratorConfig()
    label = classify(m)
    if label.regime is not Regime.BOTH_SUPERCRITICAL or label.fitness is not Fitness.EQUAL_FITNESS:
        raise PreconditionError(f"no coexistence continuum in regime {label}")
    total = _continuum_total(m, homogeneity_profile(m), fp_cfg)
    out = []
    for k, s0 in enumerate(ics):
        if not (np.any(s0.x1 > 0) and np.any(s0.x2 > 0)):
            raise PreconditionError(f"initial state {k} must seed both viruses")
        rec = simulate(m, s0, cfg)
        if not rec.converged:
            raise NumericalError(f"run {k} did not converge ({rec.terminal_reason.value})")
        end = rec.terminal
        x1, x2 = end.x1, end.x2
        alpha = float(x1 @ x2 / (x2 @ x2))
        dev = float(np.max(np.abs(x1 - alpha * x2) / (alpha * x2)))
        if dev >= PARALLEL_TOL:
            raise ConsistencyError(f"run {k}: endpoint not parallel (max relative deviation {dev:.3e})")
        sum_err = float(np.max(np.abs(x1 + x2 - total)))
        if sum_err >= PARALLEL_TOL:
            raise ConsistencyError(f"run {k}: x1 + x2 misses the single-virus state by {sum_err:.3e}")
        out.append(ContinuumPoint(alpha, end, dev))
    return out
