"""Parameter containers, validation and vector fields of the bi-virus SIS model."""

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import DomainError, ValidationError
from .netgraph import check_irreducible

logger = logging.getLogger(__name__)

__all__ = [
    "DOMAIN_TOL",
    "BiVirusModel",
    "HomogeneityKind",
    "HomogeneityProfile",
    "SystemState",
    "ValidationReport",
    "VirusParams",
    "bivirus_field",
    "check_domain",
    "domain_violation",
    "homogeneity_profile",
    "jacobian",
    "single_virus_field",
    "validate",
]

DOMAIN_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class VirusParams:
    """Healing rates ``delta`` and infection matrix ``B`` of one virus.

    ``B[i, j]`` is the rate at which node j infects node i.  Construction only
    checks shapes; the modelling assumptions are reported by :func:`validate`.
    ``exact`` optionally carries the rates as Fractions (``(delta, B)`` object
    arrays) when they were authored as decimal strings.
    """

    delta: np.ndarray
    B: np.ndarray
    exact: tuple = field(default=None, repr=False)

    def __post_init__(self):
        delta, B = _frozen(self.delta), _frozen(self.B)
        if delta.ndim == 0:
            delta = _frozen(np.full(B.shape[0] if B.ndim == 2 else 1, float(delta)))
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValidationError(f"B must be a square matrix, got shape {B.shape}")
        if delta.shape != (B.shape[0],):
            raise ValidationError(f"delta has shape {delta.shape}, expected ({B.shape[0]},)")
        if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(B))):
            raise ValidationError("rates must be finite")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return self.B.shape[0]

    @property
    def D(self):
        return np.diag(self.delta)

    @classmethod
    def from_decimal_strings(cls, delta, B):
        """Build from decimal strings (or numbers), keeping exact Fraction copies."""
        dq = np.array([Fraction(str(d)) for d in delta], dtype=object)
        Bq = np.array([[Fraction(str(b)) for b in row] for row in B], dtype=object)
        return cls(dq.astype(float), Bq.astype(float), exact=(dq, Bq))


@dataclass(frozen=True, eq=False)
class BiVirusModel:
    virus1: VirusParams
    virus2: VirusParams

    def __post_init__(self):
        if self.virus1.n != self.virus2.n:
            raise ValidationError(f"viruses live on {self.virus1.n} and {self.virus2.n} nodes")

    @property
    def n(self):
        return self.virus1.n

    def __iter__(self):
        return iter((self.virus1, self.virus2))


@dataclass(frozen=True, eq=False)
class SystemState:
    """Infection probabilities ``(x1, x2)``; membership in the invariant set is
    checked by :func:`check_domain`, not at construction."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1, x2 = _frozen(self.x1), _frozen(self.x2)
        if x1.ndim != 1 or x1.shape != x2.shape:
            raise ValidationError(f"x1 and x2 must be vectors of equal length, got {x1.shape}, {x2.shape}")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def n(self):
        return self.x1.size

    def stacked(self):
        return np.concatenate([self.x1, self.x2])

    @classmethod
    def from_stacked(cls, y):
        y = np.asarray(y, dtype=float)
        n = y.size // 2
        return cls(y[:n], y[n:])

    @classmethod
    def healthy(cls, n):
        return cls(np.zeros(n), np.zeros(n))


def domain_violation(x1, x2):
    """Largest amount by which ``(x1, x2)`` leaves {x1 >= 0, x2 >= 0, x1 + x2 <= 1}."""
    return float(max(0.0, np.max(-x1), np.max(-x2), np.max(x1 + x2 - 1.0)))


def check_domain(s, tol=DOMAIN_TOL):
    v = domain_violation(s.x1, s.x2)
    if v > tol:
        raise DomainError(f"state lies outside the invariant set by {v:.3e}")


class HomogeneityKind(str, enum.Enum):
    GENERAL = "General"
    HOMOGENEOUS_SAME_GRAPH = "HomogeneousSameGraph"
    IDENTICAL_PARAMS = "IdenticalParams"


@dataclass(frozen=True)
class HomogeneityProfile:
    kind: HomogeneityKind
    delta1: float = None
    beta1: float = None
    delta2: float = None
    beta2: float = None
    A: np.ndarray = field(default=None, repr=False)
    # exact fitness ratios delta/beta when both viruses carry Fraction rates
    ratios_exact: tuple = field(default=None, repr=False)


def _uniform_virus(p):
    """``(delta, beta)`` if healing rates and all positive arc weights are equal."""
    if p.delta[0] <= 0 or np.any(p.delta != p.delta[0]):
        return None
    w = p.B[p.B > 0]
    if w.size == 0 or np.any(w != w[0]):
        return None
    return float(p.delta[0]), float(w[0])


def _exact_ratio(p):
    if p.exact is None:
        return None
    dq, Bq = p.exact
    beta = next(b for b in Bq.ravel() if b > 0)
    return dq[0] / beta


def homogeneity_profile(m):
    """Detect the special parameter structures, using exact equality of stored rates.

    IdenticalParams wins over HomogeneousSameGraph; the homogeneous scalars are
    filled in whenever both viruses are uniform on the same arc pattern.
    """
    p1, p2 = m.virus1, m.virus2
    identical = bool(np.all(p1.delta > 0) and np.array_equal(p1.delta, p2.delta)
                     and np.array_equal(p1.B, p2.B))
    u1, u2 = _uniform_virus(p1), _uniform_virus(p2)
    uniform = u1 is not None and u2 is not None and np.array_equal(p1.B > 0, p2.B > 0)
    if identical:
        kind = HomogeneityKind.IDENTICAL_PARAMS
    elif uniform:
        kind = HomogeneityKind.HOMOGENEOUS_SAME_GRAPH
    else:
        return HomogeneityProfile(HomogeneityKind.GENERAL)
    if not uniform:
        return HomogeneityProfile(kind)
    r1, r2 = _exact_ratio(p1), _exact_ratio(p2)
    return HomogeneityProfile(
        kind, u1[0], u1[1], u2[0], u2[1],
        A=(p1.B > 0).astype(float),
        ratios_exact=(r1, r2) if r1 is not None and r2 is not None else None,
    )


@dataclass
class ValidationReport:
    checks: dict
    profile: HomogeneityProfile
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return all(self.checks.values())

    @property
    def failures(self):
        return [name for name, passed in self.checks.items() if not passed]


def validate(m, for_sensitivity=False):
    """Check the standing assumptions on ``m`` and report per condition."""
    checks = {"dimension": m.virus1.n == m.virus2.n}
    warnings = []
    for k, p in enumerate(m, start=1):
        checks[f"virus{k}.delta_nonnegative"] = bool(np.all(p.delta >= 0))
        checks[f"virus{k}.B_nonnegative"] = bool(np.all(p.B >= 0))
        checks[f"virus{k}.B_irreducible"] = check_irreducible(p.B)
        if for_sensitivity and np.any(p.delta == 0):
            warnings.append(f"virus{k} has zero healing rates; sensitivity analysis assumes delta > 0")
    for w in warnings:
        logger.warning(w)
    return ValidationReport(checks, homogeneity_profile(m), warnings)


def bivirus_field(m, s, check=True):
    """Time derivative ``(dx1, dx2)`` of the coupled two-virus system at ``s``."""
    if check:
        check_domain(s)
    p1, p2 = m.virus1, m.virus2
    healthy = 1.0 - s.x1 - s.x2
    dx1 = -p1.delta * s.x1 + healthy * (p1.B @ s.x1)
    dx2 = -p2.delta * s.x2 + healthy * (p2.B @ s.x2)
    return dx1, dx2


def single_virus_field(p, z, check=True):
    z = np.asarray(z, dtype=float)
    if check and (np.any(z < -DOMAIN_TOL) or np.any(z > 1 + DOMAIN_TOL)):
        raise DomainError(f"state outside [0,1]^n: {z.tolist()}")
    return -p.delta * z + (1.0 - z) * (p.B @ z)


def jacobian(m, s):
    """Jacobian of :func:`bivirus_field` at ``s`` as a ``2n x 2n`` matrix."""
    p1, p2 = m.virus1, m.virus2
    healthy = np.diag(1.0 - s.x1 - s.x2)
    Bt1 = np.diag(p1.B @ s.x1)
    Bt2 = np.diag(p2.B @ s.x2)
    return np.block([
        [healthy @ p1.B - p1.D - Bt1, -Bt1],
        [-Bt2, healthy @ p2.B - p2.D - Bt2],
    ])
