"""Randomised property checks over the whole library.

Each ``check_*`` function draws its own instances from a seeded generator,
compares the library against an independent route (dense eigensolves,
closed forms, simulation, finite differences) and returns a
:class:`PropertyResult` listing any counterexamples.  ``run_suite`` runs
them all; the CLI ``verify`` command and the acceptance tests use it.
"""

import functools
import inspect
import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .control import closed_loop_transform, constant_healing_baseline, repeller_experiment
from .dynamics import IntegratorConfig, lyapunov_trace, positivity_time, simulate, simulate_single
from .equilibria import (
    EquilibriumKind,
    Fitness,
    FixedPointConfig,
    Regime,
    Verdict,
    classify,
    coexistence_continuum,
    enumerate_equilibria,
    epidemic_initializer,
    epidemic_residual,
    solve_epidemic,
)
from .exceptions import BiVirusError
from .model import BiVirusModel, SystemState, VirusParams, jacobian
from .netgraph import check_irreducible
from .sensitivity import Perturbation, finite_difference, monotonicity_report, sensitivity_solve
from .spectral import (
    negative_inverse_check,
    perron_pair,
    sign_pattern_violation,
    spectral_abscissa,
    spectral_radius,
    threshold_trichotomy,
)

__all__ = [
    "PropertyResult",
    "SCALES",
    "check_coexistence_continuum",
    "check_epidemic_solver",
    "check_feedback_impossibility",
    "check_healthy_convergence",
    "check_invariant_set",
    "check_irreducibility_oracle",
    "check_lyapunov_trace",
    "check_negative_inverse",
    "check_perron_pair",
    "check_positivity_time",
    "check_sensitivity",
    "check_sign_pattern",
    "check_survival_of_fitter",
    "check_threshold_trichotomy",
    "random_interior_state",
    "random_irreducible",
    "random_virus",
    "run_suite",
]


@dataclass
class PropertyResult:
    name: str
    n_cases: int = 0
    counterexamples: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self):
        return self.n_cases > 0 and not self.counterexamples

    def fail(self, **info):
        self.counterexamples.append(info)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "n_cases": self.n_cases,
            "counterexamples": self.counterexamples[:10],
            "n_counterexamples": len(self.counterexamples),
            "detail": self.detail,
        }

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.n_cases} cases, {len(self.counterexamples)} counterexamples"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return functools.update_wrapper(wrapper, fn)


# ---------------------------------------------------------------- generators

def random_irreducible(rng, n, density=0.35, low=0.1, high=1.0, self_loops=False):
    """Random nonnegative matrix made irreducible by overlaying a random Hamiltonian cycle."""
    B = rng.uniform(low, high, (n, n)) * (rng.random((n, n)) < density)
    if not self_loops:
        np.fill_diagonal(B, 0.0)
    perm = rng.permutation(n)
    for a, b in zip(perm, np.roll(perm, -1)):
        if n > 1 and B[b, a] == 0:
            B[b, a] = rng.uniform(low, high)
    return B


def random_virus(rng, n, regime):
    """Random valid virus; ``regime`` is "sub" (s(-D+B) < 0) or "super" (> 0).

    Healing rates are the row sums of B scaled by a factor above 1.1
    (subcritical) or below 0.8 (supercritical); the minimum row sum of
    D^{-1}B then bounds rho(D^{-1}B) on the correct side of one.
    """
    B = random_irreducible(rng, n)
    rows = B.sum(axis=1)
    if regime == "sub":
        delta = rows * rng.uniform(1.1, 2.0, n)
    elif regime == "super":
        delta = rows * rng.uniform(0.3, 0.8, n)
    else:
        raise ValueError(regime)
    return VirusParams(delta, B)


def random_interior_state(rng, n):
    """Uniform draw on the open simplex {x1, x2, 1 - x1 - x2 > 0} at every node."""
    w = rng.dirichlet(np.ones(3), size=n)
    return SystemState(w[:, 0], w[:, 1])


def _regular_instances():
    """(name, A, in-degree) for graphs whose every node has the same in-degree."""
    out = []
    for n in (3, 5, 8):
        ring = np.roll(np.eye(n), 1, axis=0)
        out.append((f"ring{n}", ring, 1))
        out.append((f"biring{n}", ring + ring.T, 2))
        out.append((f"complete{n}", np.ones((n, n)) - np.eye(n), n - 1))
        out.append((f"complete_loops{n}", np.ones((n, n)), n))
    return out


def _homogeneous_adjacency(rng, n):
    A = (random_irreducible(rng, n, density=0.4, self_loops=rng.random() < 0.5) > 0).astype(float)
    return A


# ---------------------------------------------------------------- module invariants

@_timed
def check_irreducibility_oracle(seed=0, count=200):
    """SCC-based irreducibility agrees with the (I + sign B)^(n-1) > 0 reachability test."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("irreducibility_vs_reachability")
    for _ in range(count):
        n = int(rng.integers(1, 9))
        B = rng.uniform(0, 1, (n, n)) * (rng.random((n, n)) < rng.uniform(0.05, 0.6))
        R = np.linalg.matrix_power(np.eye(n) + (B > 0), max(n - 1, 1))
        if check_irreducible(B) != bool(np.all(R > 0)):
            res.fail(B=B.tolist())
        res.n_cases += 1
    return res


@_timed
def check_perron_pair(seed=0, count=100):
    """Power-iteration Perron value matches the dense abscissa; the row-ratio upper bound holds."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("perron_pair")
    for _ in range(count):
        n = int(rng.integers(1, 9))
        M = random_irreducible(rng, n) + np.diag(rng.uniform(-3, 1, n))
        pair = perron_pair(M)
        s = spectral_abscissa(M)
        resid = max(np.max(np.abs(M @ pair.right - pair.value * pair.right)),
                    np.max(np.abs(pair.left @ M - pair.value * pair.left)))
        if abs(s - pair.value) >= 1e-8 or resid >= 1e-8:
            res.fail(M=M.tolist(), s=s, value=pair.value, residual=resid)
        x = rng.uniform(0.1, 1.0, n)
        lam = np.max(M @ x / x) + 1e-3
        if not s < lam:
            res.fail(M=M.tolist(), x=x.tolist(), lam=lam, s=s)
        res.n_cases += 1
    return res


# ---------------------------------------------------------------- acceptance properties

@_timed
def check_threshold_trichotomy(seed=0, count=500, band=1e-9):
    """sign s(Lam + N) == sign(rho(-Lam^{-1} N) - 1) with values inside ``band`` read as zero."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("threshold_trichotomy")

    def sgn(v):
        return 0 if abs(v) <= band else int(np.sign(v))

    for _ in range(count):
        n = int(rng.integers(1, 9))
        N = random_irreducible(rng, n, self_loops=True)
        lam = -N.sum(axis=1) * rng.uniform(0.5, 1.6, n)
        lam[lam == 0] = -1.0
        s = spectral_abscissa(np.diag(lam) + N)
        gap = spectral_radius(-N / lam[:, None]) - 1.0
        try:
            label = threshold_trichotomy(lam, N, band)
        except BiVirusError as exc:
            res.fail(lam=lam.tolist(), N=N.tolist(), error=str(exc))
            res.n_cases += 1
            continue
        expected = {-1: "Below", 0: "Critical", 1: "Above"}[sgn(s)]
        if sgn(s) != sgn(gap) or label.value != expected:
            res.fail(lam=lam.tolist(), N=N.tolist(), s=s, rho_minus_1=gap, label=label.value)
        res.n_cases += 1
    # exact-critical instances: row-stochastic -Lam^{-1} N
    for n in range(1, 9):
        N = random_irreducible(rng, n, self_loops=True) + (np.eye(n) if n == 1 else 0)
        lam = -N.sum(axis=1)
        if threshold_trichotomy(lam, N, band).value != "Critical":
            res.fail(lam=lam.tolist(), N=N.tolist(), expected="Critical")
        res.n_cases += 1
    return res


@_timed
def check_healthy_convergence(seed=0, count=50, cfg=None, tol=1e-6):
    """Both viruses subcritical: every run reaches max(|x1|, |x2|) < tol before t_max."""
    rng = np.random.default_rng(seed)
    cfg = cfg or IntegratorConfig()
    res = PropertyResult("healthy_state_convergence")
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        m = BiVirusModel(random_virus(rng, n, "sub"), random_virus(rng, n, "sub"))
        s0 = random_interior_state(rng, n)
        rec = simulate(m, s0, cfg)
        end = np.max(np.abs(rec.Y[-1]))
        worst = max(worst, end)
        if classify(m).regime is not Regime.BOTH_SUBCRITICAL or end >= tol or rec.times[-1] > cfg.t_max:
            res.fail(n=n, terminal_norm=end, reason=rec.terminal_reason.value)
        res.n_cases += 1
    res.detail["worst_terminal_norm"] = worst
    return res


@_timed
def check_epidemic_solver(seed=0, count=50, n_inits=10, cfg=None, fp_cfg=None):
    """Closed forms on regular graphs, ODE agreement, residual and uniqueness from many starts."""
    rng = np.random.default_rng(seed)
    cfg = cfg or IntegratorConfig()
    fp_cfg = fp_cfg or FixedPointConfig()
    res = PropertyResult("epidemic_solver")
    worst = {"closed_form": 0.0, "ode": 0.0, "residual": 0.0, "uniqueness": 0.0}
    for name, A, d in _regular_instances():
        for beta, delta in ((1.0, 0.25), (0.7, 0.3 * d), (2.0, 1.5)):
            if beta * d <= delta:
                continue
            n = A.shape[0]
            x = solve_epidemic(VirusParams(np.full(n, delta), beta * A), fp_cfg)
            err = float(np.max(np.abs(x - (1 - delta / (beta * d)))))
            worst["closed_form"] = max(worst["closed_form"], err)
            if err >= 1e-10:
                res.fail(case=name, beta=beta, delta=delta, error=err)
            res.n_cases += 1
    for _ in range(count):
        n = int(rng.integers(1, 9))
        p = random_virus(rng, n, "super") if n > 1 else VirusParams(rng.uniform(0.1, 0.9, 1), [[1.0]])
        x = solve_epidemic(p, fp_cfg)
        r = epidemic_residual(p, x)
        z0 = rng.uniform(0.05, 1.0, n)
        rec = simulate_single(p, z0, cfg)
        ode_err = float(np.max(np.abs(rec.Y[-1] - x)))
        init = epidemic_initializer(p, fp_cfg)
        spread = 0.0
        for _ in range(n_inits):
            x0 = init.x0 + rng.uniform(0, 1, n) * (1 - init.x0)
            spread = max(spread, float(np.max(np.abs(solve_epidemic(p, fp_cfg, x0=x0) - x))))
        worst["ode"] = max(worst["ode"], ode_err)
        worst["residual"] = max(worst["residual"], r)
        worst["uniqueness"] = max(worst["uniqueness"], spread)
        if r >= 1e-10 or ode_err >= 1e-6 or spread >= 1e-9 or not rec.converged:
            res.fail(n=n, residual=r, ode_error=ode_err, init_spread=spread)
        res.n_cases += 1
    res.detail.update({f"worst_{k}": v for k, v in worst.items()})
    return res


def _fitter_model(rng):
    n = int(rng.integers(2, 8))
    A = _homogeneous_adjacency(rng, n)
    sA = spectral_abscissa(A)
    r1 = sA * rng.uniform(0.5, 0.85)
    r2 = r1 * rng.uniform(0.3, 0.7)
    b1, b2 = rng.uniform(0.5, 2.0, 2)
    return BiVirusModel(VirusParams(np.full(n, r1 * b1), b1 * A), VirusParams(np.full(n, r2 * b2), b2 * A))


@_timed
def check_survival_of_fitter(seed=0, count=20, runs_per_model=3, cfg=None):
    """Homogeneous viruses with s(A) > d1/b1 > d2/b2: virus 2 wins from every positive start."""
    rng = np.random.default_rng(seed)
    cfg = cfg or IntegratorConfig()
    res = PropertyResult("survival_of_the_fitter")
    expected = [Verdict.UNSTABLE, Verdict.UNSTABLE, Verdict.LOCALLY_STABLE]
    worst = 0.0
    for _ in range(count):
        m = _fitter_model(rng)
        label = classify(m)
        reports = enumerate_equilibria(m)
        verdicts = [r.verdict for r in reports]
        if label.fitness is not Fitness.VIRUS2_FITTER or verdicts != expected:
            res.fail(label=str(label), verdicts=[v.value for v in verdicts])
        x2 = reports[2].point.x2
        for _ in range(runs_per_model):
            rec = simulate(m, random_interior_state(rng, m.n), cfg)
            end = rec.terminal
            err = float(max(np.max(end.x1), np.max(np.abs(end.x2 - x2))))
            worst = max(worst, err)
            if err >= 1e-6:
                res.fail(n=m.n, error=err, reason=rec.terminal_reason.value)
            res.n_cases += 1
    res.detail["worst_distance_to_virus2_state"] = worst
    return res


def _equal_ratio_model(rng):
    """Homogeneous, equal delta/beta with dyadic rates so the tie is exact in floating point."""
    n = int(rng.integers(2, 7))
    A = _homogeneous_adjacency(rng, n)
    sA = spectral_abscissa(A)
    ratio = np.floor(sA * rng.uniform(0.3, 0.8) * 16) / 16
    ratio = max(ratio, 1 / 16)
    b1, b2 = rng.choice([0.5, 1.0, 1.5, 2.0], 2, replace=False)
    m = BiVirusModel(VirusParams(np.full(n, ratio * b1), b1 * A), VirusParams(np.full(n, ratio * b2), b2 * A))
    return m, VirusParams(np.full(n, ratio), A)


def _identical_model(rng):
    n = int(rng.integers(2, 7))
    p = random_virus(rng, n, "super")
    return BiVirusModel(p, VirusParams(p.delta.copy(), p.B.copy())), p


def _continuum_ics(n):
    one = np.ones(n)
    return [SystemState(0.2 * one, 0.2 * one), SystemState(0.3 * one, 0.1 * one),
            SystemState(0.05 * one, 0.6 * one), SystemState(0.6 * one, 0.05 * one)]


@_timed
def check_coexistence_continuum(seed=0, count=10, cfg=None):
    """Equal fitness: endpoints are parallel, sum to the single-virus state, depend on the start,
    and sit on a zero Jacobian eigenvalue with eigenvector (x1, -x1)."""
    rng = np.random.default_rng(seed)
    cfg = cfg or IntegratorConfig()
    res = PropertyResult("coexistence_continuum")
    worst = {"parallel": 0.0, "sum": 0.0, "zero_eig": 0.0, "eigvec_residual": 0.0}
    min_spread = np.inf
    for k in range(count):
        m, p_total = _equal_ratio_model(rng) if k % 2 == 0 else _identical_model(rng)
        ics = _continuum_ics(m.n)
        try:
            points = coexistence_continuum(m, ics, cfg)
        except BiVirusError as exc:
            res.fail(model=k, error=str(exc))
            res.n_cases += 1
            continue
        total = solve_epidemic(p_total)
        alphas = [cp.alpha for cp in points]
        spread = max(a - b for a, b in itertools.permutations(alphas, 2))
        min_spread = min(min_spread, spread)
        if spread <= 0.1:
            res.fail(model=k, alphas=alphas)
        if abs(alphas[0] - 1.0) > 1e-6 and k % 2:
            res.fail(model=k, symmetric_alpha=alphas[0])
        for cp in points:
            x1, x2 = cp.point.x1, cp.point.x2
            worst["parallel"] = max(worst["parallel"], cp.max_rel_deviation)
            sum_err = float(np.max(np.abs(x1 + x2 - total)))
            worst["sum"] = max(worst["sum"], sum_err)
            if sum_err >= 1e-6:
                res.fail(model=k, sum_error=sum_err)
            J = jacobian(m, cp.point)
            ev, vecs = np.linalg.eig(J)
            i0 = int(np.argmin(np.abs(ev)))
            w = np.concatenate([x1, -x1])
            w /= np.linalg.norm(w)
            v = np.real(vecs[:, i0])
            v /= np.linalg.norm(v)
            resid = float(np.linalg.norm(J @ w))
            align = abs(float(v @ w))
            worst["zero_eig"] = max(worst["zero_eig"], abs(ev[i0]))
            worst["eigvec_residual"] = max(worst["eigvec_residual"], resid)
            if abs(ev[i0]) >= 1e-6 or resid >= 1e-6 or align < 1 - 1e-6:
                res.fail(model=k, zero_eig=abs(ev[i0]), eigvec_residual=resid, alignment=align)
            if cp.max_rel_deviation >= 1e-6:
                res.fail(model=k, parallel_deviation=cp.max_rel_deviation)
            res.n_cases += 1
    res.detail.update({f"worst_{k}": v for k, v in worst.items()})
    res.detail["min_alpha_spread"] = min_spread
    return res


@_timed
def check_sensitivity(seed=0, count=50, h=1e-6, step=1e-4):
    """Linearised change vs central re-solve differences; strict monotonicity signs."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("sensitivity")
    worst = 0.0
    n_signs = 0
    for _ in range(count):
        n = int(rng.integers(1, 7))
        p = random_virus(rng, n, "super") if n > 1 else VirusParams(rng.uniform(0.1, 0.9, 1), [[1.0]])
        x = solve_epidemic(p)
        perts = [Perturbation.healing(n, int(rng.integers(n)), 1.0)]
        i, j = np.argwhere(p.B > 0)[int(rng.integers(np.count_nonzero(p.B)))]
        perts.append(Perturbation.infection(n, i, j, 1.0))
        perts.append(Perturbation(rng.uniform(-1, 1, n), rng.uniform(0, 1, (n, n)) * (p.B > 0)))
        for pert in perts:
            analytic = sensitivity_solve(p, x, pert * h).d_x
            fd = finite_difference(p, pert, h)
            rel = float(np.max(np.abs(analytic - fd)) / np.max(np.abs(fd)))
            worst = max(worst, rel)
            if rel >= 1e-3:
                res.fail(n=n, relative_error=rel)
        for row in monotonicity_report(p, x, step):
            n_signs += 1
            if not row.ok:
                res.fail(n=n, parameter=row.parameter, verdict=row.verdict, d_x=row.d_x.tolist())
        res.n_cases += 1
    for beta, delta in ((1.0, 0.5), (2.0, 0.5), (0.8, 0.1)):
        p = VirusParams([delta], [[beta]])
        d = sensitivity_solve(p, solve_epidemic(p), Perturbation.healing(1, 0, 1.0)).d_x[0]
        if abs(d + 1 / beta) >= 1e-10:
            res.fail(scalar_beta=beta, derivative=d, expected=-1 / beta)
        res.n_cases += 1
    res.detail.update(worst_relative_error=worst, sign_checks=n_signs)
    return res


@_timed
def check_feedback_impossibility(seed=0, count=20, cfg=None, n_random=10):
    """rho(I + K^{-1}B) > 1; every perturbed closed-loop run goes to x* >> 0; the
    constant-healing baseline is critical and decays to the healthy state."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("feedback_impossibility")
    min_rho = np.inf
    for _ in range(count):
        n = int(rng.integers(1, 7))
        B = random_irreducible(rng, n) if n > 1 else rng.uniform(0.2, 2, (1, 1))
        p = VirusParams(np.ones(n), B)
        k = rng.uniform(0.2, 3.0, n)
        rho = spectral_radius(np.eye(n) + B / k[:, None])
        min_rho = min(min_rho, rho)
        report = repeller_experiment(p, k, n_random=n_random, seed=int(rng.integers(2**31)), cfg=cfg)
        x_star = solve_epidemic(closed_loop_transform(p, k))
        if not rho > 1 or not np.all((x_star > 0) & (x_star < 1)):
            res.fail(n=n, rho=rho)
        for run in report.counterexamples:
            res.fail(n=n, **{k_: v for k_, v in run.to_dict().items() if k_ in ("epsilon", "target_error", "escaped")})
        if not report.baseline["ok"] or abs(report.baseline["spectral_abscissa"]) > 1e-9:
            res.fail(n=n, baseline=report.baseline)
        res.n_cases += 1
    res.detail["min_rho"] = min_rho
    return res


@_timed
def check_sign_pattern(seed=0, count=200):
    rng = np.random.default_rng(seed)
    res = PropertyResult("sign_pattern")
    for _ in range(count):
        n = int(rng.integers(2, 9))
        M = random_irreducible(rng, n, self_loops=True)
        x = rng.uniform(0, 1, n) * (rng.random(n) < 0.5)
        if not np.any(x > 0):
            x[int(rng.integers(n))] = 0.5
        if np.all(x > 0):
            x[int(rng.integers(n))] = 0.0
        try:
            i = sign_pattern_violation(M, x)
            ok = x[i] == 0 and (M @ x)[i] > 0
        except BiVirusError as exc:
            ok, i = False, str(exc)
        if not ok:
            res.fail(M=M.tolist(), x=x.tolist(), index=i)
        res.n_cases += 1
    return res


@_timed
def check_invariant_set(seed=0, count=20, tight=None):
    """Raw (pre-projection) steps never leave the invariant set by 1e-9 at rtol 1e-10."""
    rng = np.random.default_rng(seed)
    tight = tight or IntegratorConfig(rtol=1e-10, atol=1e-12)
    res = PropertyResult("invariant_set")
    worst = 0.0
    for k in range(count):
        n = int(rng.integers(2, 8))
        regimes = [("super", "super"), ("super", "sub"), ("sub", "super"), ("sub", "sub")][k % 4]
        m = BiVirusModel(random_virus(rng, n, regimes[0]), random_virus(rng, n, regimes[1]))
        # start on the boundary: some coordinates zero, some sums one
        w = rng.dirichlet(np.ones(3), size=n)
        w[rng.random(n) < 0.3, 2] = 0.0
        w[rng.random(n) < 0.3, 0] = 0.0
        w /= w.sum(axis=1, keepdims=True)
        rec = simulate(m, SystemState(w[:, 0], w[:, 1]), tight)
        worst = max(worst, rec.max_violation)
        if rec.max_violation >= 1e-9 or rec.terminal_reason.value == "DomainError":
            res.fail(n=n, violation=rec.max_violation)
        res.n_cases += 1
    res.detail["worst_violation"] = worst
    return res


@_timed
def check_positivity_time(seed=0, count=50, cfg=None):
    rng = np.random.default_rng(seed)
    res = PropertyResult("positivity_time")
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        p = random_virus(rng, n, "super" if rng.random() < 0.5 else "sub")
        z0 = rng.uniform(0, 1, n) * (rng.random(n) < 0.4)
        if not np.any(z0 > 0):
            z0[int(rng.integers(n))] = rng.uniform(0.01, 1)
        if np.all(z0 > 0):
            z0[int(rng.integers(n))] = 0.0
        try:
            tau = positivity_time(p, z0, cfg)
        except BiVirusError as exc:
            res.fail(n=n, z0=z0.tolist(), error=str(exc))
            tau = np.inf
        if not np.isfinite(tau):
            res.fail(n=n, z0=z0.tolist(), tau=tau)
        else:
            worst = max(worst, tau)
        res.n_cases += 1
    res.detail["max_tau"] = worst
    return res


@_timed
def check_negative_inverse(seed=0, count=100):
    rng = np.random.default_rng(seed)
    res = PropertyResult("negative_inverse")
    for _ in range(count):
        n = int(rng.integers(1, 9))
        N = random_irreducible(rng, n)
        M = N - np.diag(N.sum(axis=1) * rng.uniform(1.05, 3.0, n) + (n == 1))
        try:
            inv = negative_inverse_check(M)
            ok = bool(np.all(inv < 0)) and np.allclose(inv @ M, np.eye(n), atol=1e-9)
        except BiVirusError as exc:
            ok = False
            inv = str(exc)
        if not ok:
            res.fail(M=M.tolist(), inverse=inv if isinstance(inv, str) else inv.tolist())
        res.n_cases += 1
    return res


@_timed
def check_lyapunov_trace(seed=0, count=20, cfg=None, slack=1e-12):
    """max_k |z_k - x*_k| / x*_k never increases along supercritical runs from z0 >> 0."""
    rng = np.random.default_rng(seed)
    res = PropertyResult("lyapunov_trace_monotone")
    worst_rise = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        p = random_virus(rng, n, "super")
        x = solve_epidemic(p)
        z0 = rng.uniform(0.01, 1.0, n)
        _, V = lyapunov_trace(p, z0, x, cfg)
        rise = float(np.max(np.diff(V))) if V.size > 1 else 0.0
        worst_rise = max(worst_rise, rise)
        if rise > slack or V[-1] >= V[0]:
            res.fail(n=n, max_increase=rise, start=V[0], end=V[-1])
        res.n_cases += 1
    res.detail["worst_increase"] = worst_rise
    return res


# name -> (function, full-size kwargs, quick kwargs)
SUITE = {
    "irreducibility": (check_irreducibility_oracle, {"count": 200}, {"count": 50}),
    "perron": (check_perron_pair, {"count": 100}, {"count": 20}),
    "trichotomy": (check_threshold_trichotomy, {"count": 500}, {"count": 100}),
    "healthy": (check_healthy_convergence, {"count": 50}, {"count": 10}),
    "epidemic_solver": (check_epidemic_solver, {"count": 50}, {"count": 10}),
    "survival_of_fitter": (check_survival_of_fitter, {"count": 20}, {"count": 4}),
    "coexistence": (check_coexistence_continuum, {"count": 10}, {"count": 2}),
    "sensitivity": (check_sensitivity, {"count": 50}, {"count": 10}),
    "feedback": (check_feedback_impossibility, {"count": 20}, {"count": 4, "n_random": 3}),
    "sign_pattern": (check_sign_pattern, {"count": 200}, {"count": 50}),
    "invariant_set": (check_invariant_set, {"count": 20}, {"count": 4}),
    "positivity_time": (check_positivity_time, {"count": 50}, {"count": 10}),
    "negative_inverse": (check_negative_inverse, {"count": 100}, {"count": 20}),
    "lyapunov_trace": (check_lyapunov_trace, {"count": 20}, {"count": 5}),
}
SCALES = ("full", "quick")


def run_suite(seed=0, scale="full", only=None, cfg=None):
    """Run every property check (or the names in ``only``) and return their results in order."""
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    results = []
    for name, (fn, full, quick) in SUITE.items():
        if only and name not in only:
            continue
        kwargs = dict(full if scale == "full" else quick)
        if cfg is not None and "cfg" in inspect.signature(fn.__wrapped__).parameters:
            kwargs["cfg"] = cfg
        results.append(fn(seed=seed, **kwargs))
    return results
