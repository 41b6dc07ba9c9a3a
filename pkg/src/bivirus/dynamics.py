"""Time integration of the bi-virus and single-virus ODEs.

The explicit integrators here project every accepted step back onto the
invariant set (clamp to [0, 1], proportional rescale when x1 + x2 > 1) and
record how far the raw step had strayed, which is why they are not
delegated to ``scipy.integrate``.
"""

import enum
import io
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError, ValidationError
from .model import DOMAIN_TOL, SystemState, bivirus_field, check_domain, single_virus_field

__all__ = [
    "IntegratorConfig",
    "Method",
    "TerminalReason",
    "TrajectoryRecord",
    "integrate",
    "lyapunov_trace",
    "positivity_time",
    "simulate",
    "simulate_single",
    "stiffness_bound",
    "write_trajectory_csv",
]

POSITIVITY_FLOOR = 1e-12


class Method(str, enum.Enum):
    RK4_FIXED = "RK4Fixed"
    RK45_ADAPTIVE = "RK45Adaptive"


class TerminalReason(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_TIME = "MaxTime"
    DOMAIN_ERROR = "DomainError"
    STOPPED = "Stopped"


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RK45_ADAPTIVE
    dt: float = 1e-2
    rtol: float = 1e-8
    atol: float = 1e-10
    t_max: float = 1e4
    convergence_tol: float = 1e-10
    record_stride: int = 1
    max_steps: int = 10_000_000
    # None: derived from the model so steps stay well inside the stability region
    h_max: float = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        for name in ("dt", "rtol", "atol", "t_max", "convergence_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"integrator {name} must be positive, got {getattr(self, name)!r}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValidationError(f"record_stride must be a positive integer, got {self.record_stride!r}")


@dataclass
class TrajectoryRecord:
    """Recorded ``times`` and stacked states ``Y`` (one row per recorded step).

    For the two-virus system each row is ``[x1, x2]``; for a single virus it
    is just ``z``.  ``max_violation`` is the largest pre-projection distance
    from the invariant set seen over all accepted steps.
    """

    times: np.ndarray
    Y: np.ndarray
    terminal_reason: TerminalReason
    max_violation: float
    n_viruses: int = 2
    n_steps: int = 0

    @property
    def states(self):
        if self.n_viruses == 1:
            return list(self.Y)
        return [SystemState.from_stacked(y) for y in self.Y]

    @property
    def terminal(self):
        y = self.Y[-1]
        return y.copy() if self.n_viruses == 1 else SystemState.from_stacked(y)

    @property
    def converged(self):
        return self.terminal_reason is TerminalReason.CONVERGED


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B5 - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _project_pair(y):
    """Clamp to [0, 1] and rescale (x1_i, x2_i) whenever their sum exceeds one.

    Returns the projected copy and the raw distance from the invariant set.
    """
    n = y.size // 2
    x1, x2 = y[:n], y[n:]
    violation = max(0.0, -x1.min(), -x2.min(), (x1 + x2 - 1.0).max())
    if violation == 0.0:
        return y, 0.0
    x1 = np.clip(x1, 0.0, 1.0)
    x2 = np.clip(x2, 0.0, 1.0)
    total = x1 + x2
    over = total > 1.0
    x1[over] /= total[over]
    x2[over] /= total[over]
    return np.concatenate([x1, x2]), violation


def _project_box(y):
    violation = max(0.0, -y.min(), (y - 1.0).max())
    if violation == 0.0:
        return y, 0.0
    return np.clip(y, 0.0, 1.0), violation


def _initial_step(rhs, y0, f0, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = np.linalg.norm(y0 / scale) / np.sqrt(y0.size)
    d1 = np.linalg.norm(f0 / scale) / np.sqrt(y0.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = rhs(y0 + h0 * f0)
    d2 = np.linalg.norm((f1 - f0) / scale) / np.sqrt(y0.size) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def stiffness_bound(params, feedback_gains=None):
    """Upper bound on ``||J||_inf`` over the invariant set for the given viruses.

    Row i of either Jacobian block is bounded by ``delta_i + 3 * sum_j B_ij``
    (``2 k_i + 3 * sum_j B_ij`` under proportional feedback).
    """
    bound = 0.0
    for k, p in enumerate(params):
        heal = p.delta if feedback_gains is None else 2 * np.asarray(feedback_gains[k], dtype=float)
        bound = max(bound, float(np.max(heal + 3 * p.B.sum(axis=1))))
    return bound


def _h_max(cfg, bound):
    if cfg.h_max is not None:
        return cfg.h_max
    return 2.0 / bound if bound > 0 else np.inf


def integrate(rhs, y0, cfg, project, stop=None, h_max=np.inf):
    """Integrate ``dy/dt = rhs(y)`` from ``y0`` with projection after every step.

    ``project(y)`` returns ``(projected, violation)``.  Integration ends on
    convergence (``max|rhs| < cfg.convergence_tol``), at ``cfg.t_max``, when a
    raw step leaves the invariant set by more than the domain tolerance, or
    when ``stop(t, y)`` returns true.  Adaptive steps never exceed ``h_max``;
    at the explicit-stability edge the step controller would otherwise stall
    the approach to equilibrium.  Returns ``(times, Y, reason, max_violation, n_steps)``.
    """
    y = np.array(y0, dtype=float)
    t = 0.0
    f = rhs(y)
    times, Y = [t], [y.copy()]
    max_violation = 0.0
    n_steps = 0
    adaptive = cfg.method is Method.RK45_ADAPTIVE
    h = min(_initial_step(rhs, y, f, cfg.rtol, cfg.atol), h_max) if adaptive else cfg.dt

    def finish(reason):
        if times[-1] != t:
            times.append(t)
            Y.append(y.copy())
        return np.array(times), np.array(Y), reason, max_violation, n_steps

    if np.max(np.abs(f)) < cfg.convergence_tol:
        return finish(TerminalReason.CONVERGED)
    if stop is not None and stop(t, y):
        return finish(TerminalReason.STOPPED)

    while t < cfg.t_max:
        if n_steps >= cfg.max_steps:
            raise NumericalError(f"exceeded {cfg.max_steps} integration steps at t={t}")
        h = min(h, cfg.t_max - t)
        if adaptive:
            K = [f]
            for a, c in zip(_A[1:], _C[1:]):
                K.append(rhs(y + h * sum(ai * ki for ai, ki in zip(a, K) if ai)))
            y_new = y + h * sum(b * k for b, k in zip(_B5, K) if b)
            f_new = K[-1]
            scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean((h * sum(e * k for e, k in zip(_E, K) if e) / scale) ** 2))
            if err > 1.0:
                h *= max(0.2, 0.9 * err ** -0.2)
                if t + h == t:
                    raise NumericalError(f"step size underflow at t={t}")
                continue
            h_next = min(h_max, h * (min(10.0, 0.9 * err ** -0.2) if err > 0 else 10.0))
        else:
            k1 = f
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y_new = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            f_new = None
            h_next = cfg.dt

        t += h
        n_steps += 1
        y_proj, violation = project(y_new)
        max_violation = max(max_violation, violation)
        if violation > DOMAIN_TOL:
            y = y_new
            return finish(TerminalReason.DOMAIN_ERROR)
        if y_proj is not y_new or f_new is None:
            f_new = rhs(y_proj)
        y, f, h = y_proj, f_new, h_next

        if n_steps % cfg.record_stride == 0:
            times.append(t)
            Y.append(y.copy())
        if np.max(np.abs(f)) < cfg.convergence_tol:
            return finish(TerminalReason.CONVERGED)
        if stop is not None and stop(t, y):
            return finish(TerminalReason.STOPPED)
    return finish(TerminalReason.MAX_TIME)


def _bivirus_rhs(m):
    n = m.n
    d1, B1, d2, B2 = m.virus1.delta, m.virus1.B, m.virus2.delta, m.virus2.B

    def rhs(y):
        x1, x2 = y[:n], y[n:]
        healthy = 1.0 - x1 - x2
        return np.concatenate([-d1 * x1 + healthy * (B1 @ x1), -d2 * x2 + healthy * (B2 @ x2)])

    return rhs


def simulate(m, s0, cfg=None, rhs=None, stiffness=None):
    """Trajectory of the two-virus system from ``s0``.

    ``rhs`` overrides the vector field on stacked states (used by the
    feedback-controlled system) and ``stiffness`` its Jacobian bound; the
    invariant set and projection are the same.
    """
    cfg = cfg or IntegratorConfig()
    if s0.n != m.n:
        raise ValidationError(f"initial state has {s0.n} nodes, model has {m.n}")
    check_domain(s0)
    y0, _ = _project_pair(s0.stacked())
    rhs = rhs or _bivirus_rhs(m)
    h_max = _h_max(cfg, stiffness if stiffness is not None else stiffness_bound(m))
    times, Y, reason, viol, steps = integrate(rhs, y0, cfg, _project_pair, h_max=h_max)
    return TrajectoryRecord(times, Y, reason, viol, 2, steps)


def _single_rhs(p):
    return lambda z: single_virus_field(p, z, check=False)


def simulate_single(p, z0, cfg=None, rhs=None, stop=None, stiffness=None):
    cfg = cfg or IntegratorConfig()
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (p.n,):
        raise ValidationError(f"initial state has shape {z0.shape}, expected ({p.n},)")
    y0, viol = _project_box(z0)
    if viol > DOMAIN_TOL:
        raise ValidationError(f"initial state outside [0,1]^n by {viol:.3e}")
    rhs = rhs or _single_rhs(p)
    h_max = _h_max(cfg, stiffness if stiffness is not None else stiffness_bound([p]))
    times, Y, reason, viol, steps = integrate(rhs, y0, cfg, _project_box, stop=stop, h_max=h_max)
    return TrajectoryRecord(times, Y, reason, viol, 1, steps)


def positivity_time(p, z0, cfg=None, floor=POSITIVITY_FLOOR):
    """First recorded time at which every coordinate exceeds ``floor``.

    ``z0`` must be nonnegative and nonzero.  Irreducibility of B guarantees
    this time is finite, so reaching ``t_max`` first raises NumericalError.
    """
    z0 = np.asarray(z0, dtype=float)
    if np.any(z0 < 0) or not np.any(z0 > 0):
        raise ValidationError("z0 must be nonnegative and nonzero")
    if np.all(z0 > floor):
        return 0.0
    cfg = cfg or IntegratorConfig()
    rec = simulate_single(p, z0, cfg, stop=lambda t, z: bool(np.all(z > floor)))
    hit = np.flatnonzero(np.all(rec.Y > floor, axis=1))
    if hit.size == 0:
        raise NumericalError(
            f"state never became strictly positive before t={rec.times[-1]} ({rec.terminal_reason.value})"
        )
    return float(rec.times[hit[0]])


def lyapunov_trace(p, z0, x_star, cfg=None):
    """``max_k |z_k(t) - x*_k| / x*_k`` along the single-virus trajectory from ``z0``.

    Returns ``(times, values)``.
    """
    x_star = np.asarray(x_star, dtype=float)
    if np.any(x_star <= 0):
        raise ValidationError("x_star must be strictly positive")
    rec = simulate_single(p, z0, cfg)
    return rec.times, np.max(np.abs(rec.Y - x_star) / x_star, axis=1)


def write_trajectory_csv(rec, path_or_buf=None):
    """Write ``t,x1_0..,x2_0..`` (or ``t,z_0..`` for one virus) rows at 17 significant digits."""
    n = rec.Y.shape[1] // rec.n_viruses
    if rec.n_viruses == 1:
        cols = [f"z_{i}" for i in range(n)]
    else:
        cols = [f"x1_{i}" for i in range(n)] + [f"x2_{i}" for i in range(n)]
    buf = io.StringIO()
    buf.write(",".join(["t"] + cols) + "\n")
    for t, y in zip(rec.times, rec.Y):
        buf.write(",".join(format(v, ".17g") for v in (t, *y)) + "\n")
    text = buf.getvalue()
    if path_or_buf is None:
        return text
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", newline="") as fh:
            fh.write(text)
    return text
