"""First-order sensitivity of the single-virus epidemic state to rate perturbations."""

import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .equilibria import solve_epidemic
from .exceptions import ConsistencyError, NumericalError, PreconditionError, ValidationError
from .model import VirusParams
from .spectral import spectral_abscissa

logger = logging.getLogger(__name__)

__all__ = [
    "MonotonicityRow",
    "Perturbation",
    "SensitivityResult",
    "finite_difference",
    "monotonicity_report",
    "sensitivity_matrix",
    "sensitivity_solve",
    "write_sensitivity_csv",
]

COND_WARN = 1e12
FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class Perturbation:
    d_delta: np.ndarray
    d_B: np.ndarray

    def __post_init__(self):
        dd = np.asarray(self.d_delta, dtype=float)
        dB = np.asarray(self.d_B, dtype=float)
        if dB.ndim != 2 or dB.shape != (dd.size, dd.size):
            raise ValidationError(f"perturbation shapes disagree: d_delta {dd.shape}, d_B {dB.shape}")
        object.__setattr__(self, "d_delta", dd)
        object.__setattr__(self, "d_B", dB)

    @classmethod
    def zero(cls, n):
        return cls(np.zeros(n), np.zeros((n, n)))

    @classmethod
    def healing(cls, n, i, h):
        dd = np.zeros(n)
        dd[i] = h
        return cls(dd, np.zeros((n, n)))

    @classmethod
    def infection(cls, n, i, j, h):
        dB = np.zeros((n, n))
        dB[i, j] = h
        return cls(np.zeros(n), dB)

    def __mul__(self, scale):
        return Perturbation(self.d_delta * scale, self.d_B * scale)

    __rmul__ = __mul__

    def apply(self, p):
        """Perturbed parameters; they must stay nonnegative."""
        delta, B = p.delta + self.d_delta, p.B + self.d_B
        if np.any(delta < 0) or np.any(B < 0):
            raise ValidationError("perturbation drives a rate negative")
        return VirusParams(delta, B)


@dataclass
class SensitivityResult:
    d_x: np.ndarray
    system_matrix_abscissa: float
    raw_inverse_negative: bool
    condition_number: float = field(default=np.nan)


def sensitivity_matrix(p, x_star):
    """``-D + B - X*B - diag(B x*)``, the Jacobian of the single-virus field at ``x*``."""
    Bx = p.B @ x_star
    return -p.D + p.B - x_star[:, None] * p.B - np.diag(Bx)


def sensitivity_solve(p, x_star, pert):
    """Linearised change of the epidemic state under ``pert``.

    Solves ``M dx = X* d_delta + (X* - I) d_B x*`` by LU, after checking that
    M is Hurwitz with an entrywise negative inverse.
    """
    x_star = np.asarray(x_star, dtype=float)
    if np.any(p.delta <= 0):
        raise PreconditionError("sensitivity analysis requires strictly positive healing rates")
    if x_star.shape != (p.n,) or np.any(x_star <= 0) or np.any(x_star >= 1):
        raise PreconditionError("x_star must satisfy 0 << x_star << 1")
    if pert.d_delta.size != p.n:
        raise ValidationError(f"perturbation is for {pert.d_delta.size} nodes, model has {p.n}")
    M = sensitivity_matrix(p, x_star)
    s = spectral_abscissa(M)
    if s >= 0:
        raise ConsistencyError(f"linearisation at the epidemic state is not Hurwitz (s = {s:.3e})")
    try:
        lu = scipy.linalg.lu_factor(M, check_finite=True)
        inv = scipy.linalg.lu_solve(lu, np.eye(p.n))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"singular linearisation: {exc}") from exc
    negative = bool(np.all(inv < 0))
    if not negative:
        raise ConsistencyError(f"inverse of the Hurwitz linearisation is not entrywise negative: {inv.tolist()}")
    cond = float(np.linalg.norm(M, 1) * np.linalg.norm(inv, 1))
    if cond > COND_WARN:
        logger.warning("sensitivity system is ill-conditioned (cond ~ %.2e)", cond)
    rhs = x_star * pert.d_delta + (x_star - 1.0) * (pert.d_B @ x_star)
    d_x = scipy.linalg.lu_solve(lu, rhs)
    return SensitivityResult(d_x, s, negative, cond)


def finite_difference(p, pert, h=FD_STEP, fp_cfg=None):
    """Central-difference change of the epidemic state for the perturbation ``h * pert``."""
    plus = solve_epidemic((pert * h).apply(p), fp_cfg)
    minus = solve_epidemic((pert * -h).apply(p), fp_cfg)
    return (plus - minus) / 2.0


@dataclass
class MonotonicityRow:
    parameter: str
    d_x: np.ndarray
    d_x_resolved: np.ndarray
    verdict: str
    expected: str

    @property
    def ok(self):
        return self.verdict == self.expected


def _sign_verdict(d):
    if np.all(d == 0):
        return "neutral"
    if np.all(d < 0):
        return "decreasing"
    if np.all(d > 0):
        return "increasing"
    return "mixed"


def monotonicity_report(p, x_star, step, fp_cfg=None):
    """Sign of the epidemic-state change for a ``+step`` bump of each rate.

    Every healing rate and every infection rate on an existing arc is bumped
    in turn.  The linearised change must be strictly negative in all entries
    for healing rates and strictly positive for infection rates; the re-solved
    equilibrium must agree in sign.  Rows whose ``ok`` is false are
    counterexamples.
    """
    n = p.n
    x_star = np.asarray(x_star, dtype=float)
    cases = [(f"delta[{i}]", Perturbation.healing(n, i, step), "decreasing") for i in range(n)]
    cases += [
        (f"beta[{i},{j}]", Perturbation.infection(n, i, j, step), "increasing")
        for i, j in zip(*np.nonzero(p.B))
    ]
    rows = []
    for name, pert, expected in cases:
        if step == 0:
            zero = np.zeros(n)
            rows.append(MonotonicityRow(name, zero, zero.copy(), "neutral", "neutral"))
            continue
        d_x = sensitivity_solve(p, x_star, pert).d_x
        resolved = solve_epidemic(pert.apply(p), fp_cfg) - x_star
        verdict = _sign_verdict(d_x)
        if _sign_verdict(resolved) != verdict:
            verdict = "mixed"
        rows.append(MonotonicityRow(name, d_x, resolved, verdict, expected))
    return rows


def write_sensitivity_csv(rows, path_or_buf=None):
    n = rows[0].d_x.size if rows else 0
    buf = io.StringIO()
    buf.write(",".join(["parameter"] + [f"dx_{i}" for i in range(n)] + ["verdict"]) + "\n")
    for r in rows:
        buf.write(",".join([r.parameter] + [format(v, ".17g") for v in r.d_x] + [r.verdict]) + "\n")
    text = buf.getvalue()
    if path_or_buf is None:
        return text
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", newline="") as fh:
            fh.write(text)
    return text
