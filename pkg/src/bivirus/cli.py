"""Command-line front end.

    bivirus classify|simulate|equilibrium|sensitivity|control|verify --config PATH [--out DIR]

Reports are JSON.  Everything in a report is a function of the config and
its seed; the only exception is the generation timestamp, which sits on
the first line of each JSON report.  Exit codes: 0 success, 1 validation
failure, 2 numerical failure, 3 internal-consistency failure.  The
``BIVIRUS_LOG`` environment variable sets log verbosity (error, info, debug).
"""

import argparse
import datetime
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, rate_matrix, rate_vector
from .control import (
    DEFAULT_EPSILONS,
    N_RANDOM_DIRECTIONS,
    FeedbackGains,
    bivirus_feedback_simulate,
    feedback_jacobian_at_healthy,
    healthy_state_verdict_under_feedback,
    repeller_experiment,
)
from .dynamics import simulate, write_trajectory_csv
from .equilibria import Fitness, classify, coexistence_continuum, enumerate_equilibria, solve_epidemic
from .exceptions import BiVirusError, ConfigError, ConsistencyError, PreconditionError
from .model import SystemState, validate
from .sensitivity import Perturbation, monotonicity_report, sensitivity_solve, write_sensitivity_csv
from .spectral import spectral_abscissa, spectral_radius
from .verify import SCALES, SUITE, run_suite

logger = logging.getLogger("bivirus")

COMMANDS = ("classify", "simulate", "equilibrium", "sensitivity", "control", "verify")
LOG_LEVELS = {"error": logging.ERROR, "warning": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def write_report(path, command, body):
    """JSON report whose first line holds the metadata (and the only timestamp)."""
    meta = {
        "command": command,
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
    }
    text = json.dumps(body, indent=2, sort_keys=True, default=_jsonable)
    head = '{"metadata": ' + json.dumps(meta, sort_keys=True)
    text = head + ("}\n" if text == "{}" else ",\n" + text[2:] + "\n")
    Path(path).write_text(text, encoding="utf-8")
    return path


def _validation_block(m):
    report = validate(m)
    return report, {
        "ok": report.ok,
        "checks": report.checks,
        "failures": report.failures,
        "homogeneity": report.profile.kind.value,
        "warnings": report.warnings,
    }


def _require_valid(m, out, command):
    report, block = _validation_block(m)
    if not report.ok:
        write_report(out / f"{command}.json", command, {"validation": block})
        raise PreconditionError("model fails validation: " + ", ".join(report.failures))
    return block


def cmd_classify(cfg, out):
    m = cfg.model
    block = _require_valid(m, out, "classify")
    label = classify(m)
    viruses = {}
    for k, p in enumerate(m, start=1):
        entry = {"s": float(spectral_abscissa(-p.D + p.B))}
        if np.all(p.delta > 0):
            entry["rho_Dinv_B"] = float(spectral_radius(p.B / p.delta[:, None]))
        viruses[f"virus{k}"] = entry
    body = {
        "validation": block,
        "regime": label.regime.value,
        "fitness": label.fitness.value if label.fitness else None,
        "label": str(label),
        "thresholds": viruses,
    }
    write_report(out / "classify.json", "classify", body)
    print(str(label))
    return 0


def _states_or_fail(cfg, command):
    if not cfg.initial_states:
        raise ConfigError(f"initial_states: at least one initial state is required for {command}")
    return cfg.initial_states


def cmd_simulate(cfg, out):
    m = cfg.model
    _require_valid(m, out, "simulate")
    runs = []
    for k, s0 in enumerate(_states_or_fail(cfg, "simulate")):
        rec = simulate(m, s0, cfg.integrator)
        name = f"trajectory_{k}.csv"
        write_trajectory_csv(rec, out / name)
        end = rec.terminal
        runs.append({
            "index": k,
            "file": name,
            "terminal_reason": rec.terminal_reason.value,
            "final_time": float(rec.times[-1]),
            "n_steps": rec.n_steps,
            "max_domain_violation": rec.max_violation,
            "terminal": {"x1": end.x1, "x2": end.x2},
        })
        logger.info("run %d: %s at t=%.6g", k, rec.terminal_reason.value, rec.times[-1])
    write_report(out / "simulate.json", "simulate", {"label": str(classify(m)), "runs": runs})
    for r in runs:
        print(f"run {r['index']}: {r['terminal_reason']} at t={r['final_time']:.6g}")
    return 0


def cmd_equilibrium(cfg, out):
    m = cfg.model
    _require_valid(m, out, "equilibrium")
    label = classify(m)
    reports = enumerate_equilibria(m, cfg.fixed_point)
    body = {"label": str(label), "equilibria": [r.to_dict() for r in reports]}
    if label.fitness is Fitness.EQUAL_FITNESS and cfg.initial_states:
        points = coexistence_continuum(m, cfg.initial_states, cfg.integrator, cfg.fixed_point)
        body["coexistence_runs"] = [
            {"alpha": cp.alpha, "point": {"x1": cp.point.x1, "x2": cp.point.x2},
             "max_rel_deviation": cp.max_rel_deviation}
            for cp in points
        ]
    write_report(out / "equilibria.json", "equilibrium", body)
    for r in reports:
        print(f"{r.kind.value}: {r.verdict.value} (abscissa {r.jacobian_spectral_abscissa:.6g})")
    return 0


def cmd_sensitivity(cfg, out):
    m = cfg.model
    _require_valid(m, out, "sensitivity")
    opts = cfg.sensitivity
    virus = opts.get("virus", 1)
    if virus not in (1, 2):
        raise ConfigError("sensitivity.virus: expected 1 or 2")
    p = m.virus1 if virus == 1 else m.virus2
    step = float(rate_vector(opts.get("step", "1e-4"), 1, "sensitivity.step")[0])
    if step < 0:
        raise ConfigError("sensitivity.step: must be nonnegative")
    s = spectral_abscissa(-p.D + p.B)
    if not s > 0:
        raise PreconditionError(f"virus{virus} has no epidemic state (s = {s:.3e})")
    x_star = solve_epidemic(p, cfg.fixed_point)
    rows = monotonicity_report(p, x_star, step, cfg.fixed_point)
    write_sensitivity_csv(rows, out / "sensitivity.csv")
    body = {
        "virus": virus,
        "x_star": x_star,
        "step": step,
        "rows": [{"parameter": r.parameter, "d_x": r.d_x, "d_x_resolved": r.d_x_resolved,
                  "verdict": r.verdict, "expected": r.expected} for r in rows],
        "counterexamples": [r.parameter for r in rows if not r.ok],
    }
    if "perturbation" in opts:
        spec = opts["perturbation"]
        if not isinstance(spec, dict):
            raise ConfigError("sensitivity.perturbation: expected an object")
        d_delta = rate_vector(spec.get("d_delta", "0"), p.n, "sensitivity.perturbation.d_delta")
        d_B = (rate_matrix(spec["d_B"], p.n, "sensitivity.perturbation.d_B") if "d_B" in spec
               else np.zeros((p.n, p.n)))
        res = sensitivity_solve(p, x_star, Perturbation(d_delta, d_B))
        body["perturbation"] = {"d_x": res.d_x, "condition_number": res.condition_number,
                                "system_matrix_abscissa": res.system_matrix_abscissa}
    write_report(out / "sensitivity.json", "sensitivity", body)
    if body["counterexamples"]:
        raise ConsistencyError("monotonicity violated for " + ", ".join(body["counterexamples"]))
    print(f"{len(rows)} monotonicity rows, no counterexamples")
    return 0


def _gain_vectors(opts, n):
    if "gains" in opts:
        k = rate_vector(opts["gains"], n, "control.gains")
        return k, k.copy()
    return (rate_vector(opts.get("k1", "1"), n, "control.k1"),
            rate_vector(opts.get("k2", "1"), n, "control.k2"))


def cmd_control(cfg, out):
    m = cfg.model
    _require_valid(m, out, "control")
    opts = cfg.control
    k1, k2 = _gain_vectors(opts, m.n)
    gains = FeedbackGains(k1, k2)
    eps = opts.get("epsilons", list(DEFAULT_EPSILONS))
    if not isinstance(eps, list) or not eps:
        raise ConfigError("control.epsilons: expected a nonempty list")
    eps = [float(e) for e in rate_vector(eps, len(eps), "control.epsilons")]
    if any(e <= 0 or e >= 0.5 for e in eps):
        raise ConfigError("control.epsilons: magnitudes must lie in (0, 0.5)")
    n_random = opts.get("n_random", N_RANDOM_DIRECTIONS)
    if isinstance(n_random, bool) or not isinstance(n_random, int) or n_random < 0:
        raise ConfigError("control.n_random: expected a nonnegative integer")
    body = {}
    ok = True
    for k, (p, kv) in enumerate(zip(m, (gains.k1, gains.k2)), start=1):
        rep = repeller_experiment(p, kv, eps, n_random, seed=cfg.seed + k - 1,
                                  cfg=cfg.integrator, fp_cfg=cfg.fixed_point)
        body[f"virus{k}"] = rep.to_dict()
        ok &= rep.ok
    J0 = feedback_jacobian_at_healthy(m)
    runs = []
    rng = np.random.default_rng(cfg.seed)
    for e in eps:
        d = rng.uniform(0.0, 1.0, 2 * m.n) + 1e-3
        s0 = SystemState.from_stacked(e * d / (2 * d.max()))
        rec = bivirus_feedback_simulate(m, gains, s0, cfg.integrator)
        norms = np.max(rec.Y, axis=1)
        escaped = bool(norms[-1] > norms[0])
        ok &= escaped
        runs.append({"epsilon": e, "initial": s0.stacked(), "terminal": rec.Y[-1],
                     "terminal_reason": rec.terminal_reason.value, "escaped": escaped})
    body["bivirus"] = {
        "healthy_jacobian_abscissa": float(spectral_abscissa(J0)),
        "healthy_verdict": healthy_state_verdict_under_feedback(m).value,
        "runs": runs,
    }
    body["ok"] = bool(ok)
    write_report(out / "control.json", "control", body)
    if not ok:
        raise ConsistencyError("feedback experiment produced counterexamples; see control.json")
    print(f"healthy state under feedback: {body['bivirus']['healthy_verdict']}; all perturbed runs repelled")
    return 0


def cmd_verify(cfg, out):
    _require_valid(cfg.model, out, "verify")
    opts = cfg.verify
    scale = opts.get("scale", "full")
    if scale not in SCALES:
        raise ConfigError(f"verify.scale: expected one of {list(SCALES)}")
    only = opts.get("only")
    if only is not None and (not isinstance(only, list) or any(o not in SUITE for o in only)):
        raise ConfigError(f"verify.only: expected a list drawn from {sorted(SUITE)}")
    results = run_suite(seed=cfg.seed, scale=scale, only=only)
    body = {
        "seed": cfg.seed,
        "scale": scale,
        "properties": [r.to_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    }
    write_report(out / "verify.json", "verify", body)
    for r in results:
        print(r.line())
    if not body["all_passed"]:
        raise ConsistencyError("property suite found counterexamples; see verify.json")
    return 0


HANDLERS = {
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "equilibrium": cmd_equilibrium,
    "sensitivity": cmd_sensitivity,
    "control": cmd_control,
    "verify": cmd_verify,
}


def _configure_logging():
    name = os.environ.get("BIVIRUS_LOG", "error").strip().lower()
    level = LOG_LEVELS.get(name)
    logging.basicConfig(level=level or logging.ERROR, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    if level is None:
        logger.error("unknown BIVIRUS_LOG level %r; using error", name)


class _Parser(argparse.ArgumentParser):
    """Usage errors are input-validation failures (exit 1); 2 is reserved for numerics."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="bivirus", description="Bi-virus SIS model experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="experiment config (JSON)")
    parser.add_argument("--out", help="output directory (overrides output_dir in the config)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging()
    try:
        cfg = load_config(args.config)
        out = Path(args.out or cfg.output_dir or ".")
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[args.command](cfg, out)
    except BiVirusError as exc:
        print(f"bivirus {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
