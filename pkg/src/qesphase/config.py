"""Run configuration: a flat TOML file of ``key = value`` lines.

Example::

    epsilon = [1.0]          # eps_1, eps_2, ... (eps_p multiplies (a^dag a)^p)
    a_coeff = [0.1]          # A_0, A_1, ...
    family = "coherent"      # custom | coherent | binomial | negative_binomial
    alpha_mag = 1.0
    theta = 0.0
    sweep_variable = "theta" # theta | alpha_mag | A_s[k] | epsilon[k]
    sweep_start = 0.0
    sweep_stop = 6.283185307179586
    sweep_points = 32
    quadrature_steps = 1024
    tail_tol = 1e-12

See README.md for the full key list.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, GaugeUndefinedError
from .hamiltonian import QESParams, lambda_and_period
from .statistics import Binomial, Coherent, Custom, NegativeBinomial, StatisticsSpec

DEFAULT_STEPS = 1024
DEFAULT_TAIL_TOL = 1e-12

_FAMILY_KEYS = {
    "custom": {"amplitudes"},
    "coherent": {"alpha_mag", "theta"},
    "binomial": {"n_trials", "prob", "theta"},
    "negative_binomial": {"w", "q", "theta"},
}
_KNOWN_KEYS = {
    "epsilon", "a_coeff", "family", "dim",
    "sweep_variable", "sweep_start", "sweep_stop", "sweep_points", "sweep_endpoint",
    "quadrature_steps", "tail_tol", "out", "seed", "instances",
}.union(*_FAMILY_KEYS.values())

_INDEXED = re.compile(r"^(A_s|epsilon)\[(\d+)\]$")


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    start: float
    stop: float
    points: int
    endpoint: bool

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points, endpoint=self.endpoint)


@dataclass(frozen=True)
class RunConfig:
    params: QESParams
    statistics: StatisticsSpec
    sweep: Optional[SweepAxis] = None
    quadrature_steps: int = DEFAULT_STEPS
    tail_tol: float = DEFAULT_TAIL_TOL
    dim: Optional[int] = None
    out: Optional[str] = None
    seed: int = 0
    instances: int = 100
    raw: dict = field(default_factory=dict, compare=False)

    def echo(self) -> dict:
        """Normalised view of the configuration for output files."""
        out: dict[str, Any] = {
            "epsilon": list(self.params.epsilon),
            "a_coeff": list(self.params.a_coeff),
        }
        out.update(statistics_echo(self.statistics))
        if self.sweep is not None:
            out.update(
                sweep_variable=self.sweep.variable,
                sweep_start=self.sweep.start,
                sweep_stop=self.sweep.stop,
                sweep_points=self.sweep.points,
                sweep_endpoint=self.sweep.endpoint,
            )
        out.update(quadrature_steps=self.quadrature_steps, tail_tol=self.tail_tol, dim=self.dim)
        return out


def statistics_echo(spec: StatisticsSpec) -> dict:
    if isinstance(spec, Custom):
        return {"family": "custom", "amplitudes": [[c.real, c.imag] for c in spec.amplitudes]}
    if isinstance(spec, Coherent):
        return {"family": "coherent", "alpha_mag": spec.alpha_mag, "theta": spec.theta % (2 * math.pi)}
    if isinstance(spec, Binomial):
        return {"family": "binomial", "n_trials": spec.n_trials, "prob": spec.prob,
                "theta": spec.theta % (2 * math.pi), "theta_is_extension": True}
    return {"family": "negative_binomial", "w": spec.w, "q": spec.q,
            "theta": spec.theta % (2 * math.pi), "theta_is_extension": True}


def _number(raw: dict, key: str, default=None, kind=float):
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def _real_list(raw: dict, key: str) -> tuple[float, ...]:
    value = raw.get(key, [])
    if not isinstance(value, list):
        raise ConfigError(f"{key} must be an array of numbers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{key} entries must be finite numbers, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _complex_list(raw: dict, key: str) -> tuple[complex, ...]:
    value = raw.get(key)
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key} must be a non-empty array")
    out = []
    for v in value:
        if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(float(v)))
        else:
            raise ConfigError(f"{key} entries must be numbers or [re, im] pairs, got {v!r}")
    return tuple(out)


def _statistics(raw: dict) -> StatisticsSpec:
    family = raw.get("family")
    if family not in _FAMILY_KEYS:
        raise ConfigError(f"family must be one of {sorted(_FAMILY_KEYS)}, got {family!r}")
    stray = {k for keys in _FAMILY_KEYS.values() for k in keys} - _FAMILY_KEYS[family] - {"theta"}
    stray = stray & raw.keys()
    if stray:
        raise ConfigError(f"keys {sorted(stray)} do not apply to family {family!r}")
    try:
        if family == "custom":
            return Custom(_complex_list(raw, "amplitudes"))
        theta = _number(raw, "theta", 0.0)
        if family == "coherent":
            return Coherent(_number(raw, "alpha_mag"), theta)
        if family == "binomial":
            return Binomial(_number(raw, "n_trials", kind=int), _number(raw, "prob"), theta)
        return NegativeBinomial(_number(raw, "w", kind=int), _number(raw, "q"), theta)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _sweep(raw: dict, family: str) -> Optional[SweepAxis]:
    if "sweep_variable" not in raw:
        extra = [k for k in raw if k.startswith("sweep_")]
        if extra:
            raise ConfigError(f"{extra} given without sweep_variable")
        return None
    variable = raw["sweep_variable"]
    if not isinstance(variable, str):
        raise ConfigError("sweep_variable must be a string")
    if variable == "alpha_mag" and family != "coherent":
        raise ConfigError("sweeping alpha_mag requires family = 'coherent'")
    if variable == "theta" and family == "custom":
        raise ConfigError("sweeping theta requires a parametric family, not 'custom'")
    if variable not in ("theta", "alpha_mag") and not _INDEXED.match(variable):
        raise ConfigError(f"sweep_variable must be theta, alpha_mag, A_s[k] or epsilon[k], got {variable!r}")
    m = _INDEXED.match(variable)
    if m and m.group(1) == "epsilon" and int(m.group(2)) < 1:
        raise ConfigError("epsilon[k] is 1-based: epsilon[1] is the coefficient of a^dag a")
    start = _number(raw, "sweep_start")
    stop = _number(raw, "sweep_stop")
    points = _number(raw, "sweep_points", kind=int)
    endpoint = raw.get("sweep_endpoint", variable != "theta")
    if not isinstance(endpoint, bool):
        raise ConfigError("sweep_endpoint must be true or false")
    if points < 2:
        raise ConfigError(f"sweep_points must be >= 2, got {points}")
    if not start < stop:
        raise ConfigError(f"sweep_start must be < sweep_stop ({start} >= {stop})")
    return SweepAxis(variable, start, stop, points, endpoint)


def apply_sweep_value(cfg: RunConfig, value: float) -> RunConfig:
    """Copy of ``cfg`` with the swept quantity set to ``value``."""
    var = cfg.sweep.variable
    spec = cfg.statistics
    if var == "theta":
        return replace(cfg, statistics=replace(spec, theta=value))
    if var == "alpha_mag":
        return replace(cfg, statistics=replace(spec, alpha_mag=value))
    name, idx = _INDEXED.match(var).groups()
    if name == "A_s":
        return replace(cfg, params=cfg.params.with_a(int(idx), value))
    return replace(cfg, params=cfg.params.with_epsilon(int(idx), value))


def _check_gauge(params: QESParams, where: str = "") -> None:
    try:
        lambda_and_period(params)
    except GaugeUndefinedError as exc:
        raise ConfigError(f"{where}lambda = sum(A_s) must be > 0 (got {params.lam!r})") from exc


def from_dict(raw: dict) -> RunConfig:
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    try:
        params = QESParams(_real_list(raw, "epsilon"), _real_list(raw, "a_coeff"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    statistics = _statistics(raw)
    sweep = _sweep(raw, raw["family"])
    steps = _number(raw, "quadrature_steps", DEFAULT_STEPS, kind=int)
    tail_tol = _number(raw, "tail_tol", DEFAULT_TAIL_TOL)
    dim = _number(raw, "dim", kind=int) if "dim" in raw else None
    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out must be a path string")
    cfg = RunConfig(
        params=params,
        statistics=statistics,
        sweep=sweep,
        quadrature_steps=steps,
        tail_tol=tail_tol,
        dim=dim,
        out=out,
        seed=_number(raw, "seed", 0, kind=int),
        instances=_number(raw, "instances", 100, kind=int),
        raw=dict(raw),
    )
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.quadrature_steps < 16 or cfg.quadrature_steps % 2:
        raise ConfigError(f"quadrature_steps must be an even integer >= 16, got {cfg.quadrature_steps}")
    if not 0.0 < cfg.tail_tol < 1.0:
        raise ConfigError(f"tail_tol must lie in (0, 1), got {cfg.tail_tol}")
    if cfg.dim is not None and cfg.dim < 1:
        raise ConfigError("dim must be >= 1")
    _check_gauge(cfg.params)
    if cfg.sweep is not None:
        for value in cfg.sweep.values():
            point = apply_sweep_value(cfg, float(value))
            _check_gauge(point.params, f"at {cfg.sweep.variable} = {value!r}: ")
            if cfg.sweep.variable == "alpha_mag" and value < 0:
                raise ConfigError("alpha_mag sweep must stay >= 0")
    return cfg


def load_raw(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return raw


def load(path: str | Path) -> RunConfig:
    return from_dict(load_raw(path))


def verify_settings(raw: dict) -> dict:
    """The subset of keys the ``verify`` subcommand reads; others are ignored."""
    out = {"seed": _number(raw, "seed", 0, kind=int), "instances": _number(raw, "instances", 100, kind=int)}
    if "quadrature_steps" in raw:
        out["steps"] = _number(raw, "quadrature_steps", kind=int)
    if raw.get("out") is not None:
        if not isinstance(raw["out"], str):
            raise ConfigError("out must be a path string")
        out["out"] = raw["out"]
    return out
