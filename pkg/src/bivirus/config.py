"""Experiment configuration files (JSON).

Example::

    {
      "model": {
        "n": 2,
        "virus1": {"delta": ["0.5", "0.5"], "arcs": [[0, 1, "1"], [1, 0, "1"]]},
        "virus2": {"delta": "0.75", "B": [["0", "1"], ["1", "0"]]}
      },
      "initial_states": [{"x1": ["0.2", "0.2"], "x2": ["0.3", "0.3"]}],
      "integrator": {"rtol": 1e-8, "t_max": 1e4},
      "fixed_point": {"c_fraction": 0.5},
      "seed": 0,
      "output_dir": "out"
    }

Rates are decimal strings (plain JSON numbers are tolerated) and are kept
as exact fractions next to their float values.  An arc ``[i, j, w]`` means
node i infects node j at rate w.  Errors name the offending field.
"""

import json
from dataclasses import dataclass, field, fields
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import numpy as np

from .dynamics import IntegratorConfig, Method
from .equilibria import FixedPointConfig
from .exceptions import ConfigError, ValidationError
from .model import BiVirusModel, SystemState, VirusParams

__all__ = ["ExperimentConfig", "load_config", "parse_config"]


@dataclass
class ExperimentConfig:
    model: BiVirusModel
    initial_states: list = field(default_factory=list)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)
    seed: int = 0
    output_dir: str = None
    sensitivity: dict = field(default_factory=dict)
    control: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)


def _rate(value, where):
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ConfigError(f"{where}: expected a decimal string, got {value!r}")
    try:
        d = Decimal(str(value).strip())
    except InvalidOperation:
        raise ConfigError(f"{where}: not a decimal number: {value!r}") from None
    if not d.is_finite():
        raise ConfigError(f"{where}: rate must be finite, got {value!r}")
    return Fraction(d)


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    if key not in obj:
        raise ConfigError(f"{where}.{key}: missing required field")
    return obj[key]


def _vector(value, n, where):
    if isinstance(value, (str, int, float)) and not isinstance(value, bool):
        return [_rate(value, where)] * n
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{where}: expected {n} entries")
    return [_rate(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _rows(value, n, where):
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{where}: expected {n} rows")
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise ConfigError(f"{where}[{i}]: expected a list of {n} entries")
    return [_vector(row, n, f"{where}[{i}]") for i, row in enumerate(value)]


def _matrix(spec, n, where):
    if "B" in spec and "arcs" in spec:
        raise ConfigError(f"{where}: give either B or arcs, not both")
    if "B" in spec:
        return _rows(spec["B"], n, f"{where}.B")
    if "arcs" in spec:
        arcs = spec["arcs"]
        if not isinstance(arcs, list):
            raise ConfigError(f"{where}.arcs: expected a list of [source, target, weight]")
        B = [[Fraction(0)] * n for _ in range(n)]
        for k, arc in enumerate(arcs):
            w = f"{where}.arcs[{k}]"
            if not isinstance(arc, list) or len(arc) != 3:
                raise ConfigError(f"{w}: expected [source, target, weight]")
            i, j, rate = arc
            for name, idx in (("source", i), ("target", j)):
                if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < n:
                    raise ConfigError(f"{w}: {name} must be an integer in [0, {n})")
            B[j][i] += _rate(rate, f"{w}[2]")
        return B
    raise ConfigError(f"{where}.B: missing required field (or give {where}.arcs)")


def _virus(spec, n, where):
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object")
    delta = _vector(_require(spec, "delta", where), n, f"{where}.delta")
    B = _matrix(spec, n, where)
    dq = np.array(delta, dtype=object)
    Bq = np.array(B, dtype=object)
    return VirusParams(dq.astype(float), Bq.astype(float), exact=(dq, Bq))


def _model(spec):
    n = _require(spec, "n", "model")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError("model.n: expected a positive integer")
    return BiVirusModel(_virus(_require(spec, "virus1", "model"), n, "model.virus1"),
                        _virus(_require(spec, "virus2", "model"), n, "model.virus2"))


def _state(spec, n, where):
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object with x1 and x2")
    x1 = _vector(_require(spec, "x1", where), n, f"{where}.x1")
    x2 = _vector(_require(spec, "x2", where), n, f"{where}.x2")
    try:
        return SystemState(np.array(x1, dtype=float), np.array(x2, dtype=float))
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _dataclass_from(cls, spec, where):
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in spec.items():
        if key not in known:
            raise ConfigError(f"{where}.{key}: unknown field")
        if key == "method":
            try:
                value = Method(value)
            except ValueError:
                raise ConfigError(f"{where}.method: expected one of {[m.value for m in Method]}") from None
        elif isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ConfigError(f"{where}.{key}: expected a number")
        else:
            value = float(_rate(value, f"{where}.{key}"))
            if key in ("record_stride", "max_steps", "max_iter"):
                value = int(value)
            if not value > 0:
                raise ConfigError(f"{where}.{key}: must be positive")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None


_TOP = {"model", "initial_states", "integrator", "fixed_point", "seed", "output_dir",
        "sensitivity", "control", "verify"}


def parse_config(data):
    """Build an :class:`ExperimentConfig` from a parsed JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    for key in data:
        if key not in _TOP:
            raise ConfigError(f"{key}: unknown top-level field")
    model = _model(_require(data, "model", "config"))
    states = data.get("initial_states", [])
    if not isinstance(states, list):
        raise ConfigError("initial_states: expected a list")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed: expected a nonnegative integer")
    out = data.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_dir: expected a path string")
    extras = {}
    for key in ("sensitivity", "control", "verify"):
        extras[key] = data.get(key, {})
        if not isinstance(extras[key], dict):
            raise ConfigError(f"{key}: expected an object")
    return ExperimentConfig(
        model=model,
        initial_states=[_state(s, model.n, f"initial_states[{k}]") for k, s in enumerate(states)],
        integrator=_dataclass_from(IntegratorConfig, data.get("integrator", {}), "integrator"),
        fixed_point=_dataclass_from(FixedPointConfig, data.get("fixed_point", {}), "fixed_point"),
        seed=seed,
        output_dir=out,
        **extras,
    )


def load_config(path):
    """Read and parse a config file; JSON syntax errors report line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


def rate_vector(value, n, where):
    """Float vector from a decimal-string scalar or list (used for gains and perturbations)."""
    return np.array(_vector(value, n, where), dtype=float)


def rate_matrix(value, n, where):
    return np.array(_rows(value, n, where), dtype=float)
