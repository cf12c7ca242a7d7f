"""
Simulation configuration: ``key = value`` files with ``#`` comments.

Recognised keys and defaults::

    nu = 1            mu = 0.1          alpha = 1        beta = 1
    gamma = 0.5       delta = 1         eta = 1          control = open
    n_points = 33     kte_alpha = 0.1   dt = 0.001       t_end = 5
    newton_tol = 1e-10                  newton_max_iter = 25
    sample_every = 1  u0 = sin_pi       output_dir = out rng_seed = 0

``u0`` is one of ``sin_pi``, ``zero``, ``bump:a,b`` (smooth bump supported on
[a, b]) or ``file:<path>`` (two columns x,u or one column of nodal values).
"""

import dataclasses
import functools
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .control import ControlLaw, check_compatible
from .errors import ConfigError
from .model import ModelParams
from .spectral import DEFAULT_KTE_ALPHA, DEFAULT_POINTS, build_grid
from .timestepper import SolverSettings

_FLOAT_KEYS = {"nu", "mu", "alpha", "beta", "gamma", "eta", "kte_alpha", "dt", "t_end", "newton_tol"}
_INT_KEYS = {"delta", "n_points", "newton_max_iter", "sample_every", "rng_seed"}
_STR_KEYS = {"control", "u0", "output_dir"}
KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams = field(default_factory=ModelParams)
    law: ControlLaw = ControlLaw.OPEN
    n_points: int = DEFAULT_POINTS
    kte_alpha: float = DEFAULT_KTE_ALPHA
    solver: SolverSettings = field(default_factory=SolverSettings)
    u0: str = "sin_pi"
    output_dir: str = "out"
    rng_seed: int = 0
    base_dir: str = "."

    def __post_init__(self):
        check_compatible(self.law, self.params.delta)
        build_grid(self.n_points, self.kte_alpha)
        parse_initial_condition(self.u0, self.base_dir)

    def grid(self):
        return _cached_grid(self.n_points, self.kte_alpha)

    def initial_condition(self):
        return parse_initial_condition(self.u0, self.base_dir)

    def replace(self, **changes):
        """Copy with top-level, model or solver fields changed by name."""
        model_keys = set(ModelParams.__dataclass_fields__)
        solver_keys = set(SolverSettings.__dataclass_fields__)
        params = {k: changes.pop(k) for k in list(changes) if k in model_keys}
        solver = {k: changes.pop(k) for k in list(changes) if k in solver_keys}
        if params:
            changes["params"] = dataclasses.replace(self.params, **params)
        if solver:
            changes["solver"] = dataclasses.replace(self.solver, **solver)
        return dataclasses.replace(self, **changes)

    def echo(self):
        """Flat dict of every setting, in config-file key names."""
        p, s = self.params, self.solver
        return {
            "nu": p.nu, "mu": p.mu, "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma,
            "delta": p.delta, "eta": p.eta, "control": self.law.value,
            "n_points": self.n_points, "kte_alpha": self.kte_alpha,
            "dt": s.dt, "t_end": s.t_end, "newton_tol": s.newton_tol,
            "newton_max_iter": s.newton_max_iter, "sample_every": s.sample_every,
            "u0": self.u0, "output_dir": self.output_dir, "rng_seed": self.rng_seed,
        }

    def to_text(self):
        return "".join(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n"
                       for k, v in self.echo().items())

    def hash(self):
        """Short digest of the settings that determine the trajectory."""
        echo = self.echo()
        echo.pop("output_dir")
        blob = json.dumps(echo, sort_keys=True, default=repr).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@functools.lru_cache(maxsize=16)
def _cached_grid(n_points, kte_alpha):
    return build_grid(n_points, kte_alpha)


def sin_pi(x):
    return np.sin(np.pi * x)


def bump(a, b):
    """C-infinity bump supported on [a, b], peak value 1 at the midpoint."""
    if not (0.0 <= a < b <= 1.0):
        raise ConfigError(f"bump support must satisfy 0 <= a < b <= 1, got [{a}, {b}]")

    def f(x):
        x = np.asarray(x, dtype=float)
        s = (2 * x - (a + b)) / (b - a)
        out = np.zeros_like(x)
        inside = np.abs(s) < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    return f


def _samples_file(path):
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read initial condition file {path}: {exc}") from None
    if data.shape[1] == 1:
        return data[:, 0]
    if data.shape[1] != 2:
        raise ConfigError(f"initial condition file {path} must have 1 or 2 columns")
    xs, us = data[:, 0], data[:, 1]
    order = np.argsort(xs)
    return lambda x: np.interp(x, xs[order], us[order])


def parse_initial_condition(text, base_dir="."):
    """Callable (or nodal array) for a named initial condition."""
    text = str(text).strip()
    if text == "sin_pi":
        return sin_pi
    if text == "zero":
        return np.zeros_like
    if text.startswith("bump:"):
        try:
            a, b = (float(s) for s in text[5:].split(","))
        except ValueError:
            raise ConfigError(f"bump needs two numbers 'bump:a,b', got {text!r}") from None
        return bump(a, b)
    if text.startswith("file:"):
        path = Path(text[5:].strip())
        if not path.is_absolute():
            path = Path(base_dir) / path
        return _samples_file(path)
    raise ConfigError(f"unknown initial condition {text!r} (sin_pi, zero, bump:a,b, file:<path>)")


def _convert(key, raw, lineno):
    try:
        if key in _FLOAT_KEYS:
            value = float(raw)
            if not np.isfinite(value):
                raise ValueError
            return value
        if key in _INT_KEYS:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
    except ValueError:
        kind = "a number" if key in _FLOAT_KEYS else "an integer"
        raise ConfigError(f"{key} must be {kind}, got {raw!r}", line=lineno) from None
    return raw


def parse_config_text(text, base_dir="."):
    """Parse config text; errors carry the offending line number."""
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        if not value:
            raise ConfigError(f"missing value for {key!r}", line=lineno)
        raw[key] = _convert(key, value, lineno)
        lines[key] = lineno

    def build(keys, cls):
        return cls(**{k: raw[k] for k in keys if k in raw})

    def blame(*keys):
        found = [lines[k] for k in keys if k in lines]
        return max(found) if found else None

    try:
        params = build(ModelParams.__dataclass_fields__, ModelParams)
    except ConfigError as exc:
        raise ConfigError(str(exc), line=blame(*ModelParams.__dataclass_fields__)) from None
    try:
        solver = build(SolverSettings.__dataclass_fields__, SolverSettings)
    except ConfigError as exc:
        raise ConfigError(str(exc), line=blame(*SolverSettings.__dataclass_fields__)) from None
    law = ControlLaw.OPEN
    if "control" in raw:
        try:
            law = ControlLaw.parse(raw["control"])
        except ConfigError as exc:
            raise ConfigError(str(exc), line=lines["control"]) from None
    try:
        check_compatible(law, params.delta)
    except ConfigError as exc:
        raise ConfigError(str(exc), line=blame("control", "delta")) from None
    top = {k: raw[k] for k in ("n_points", "kte_alpha", "u0", "output_dir", "rng_seed") if k in raw}
    try:
        return SimConfig(params=params, law=law, solver=solver, base_dir=str(base_dir), **top)
    except ConfigError as exc:
        raise ConfigError(str(exc), line=blame("n_points", "kte_alpha", "u0")) from None


def shipped_configs():
    """Names of the configuration files bundled with the package."""
    folder = resources.files("gkdvbh") / "configs"
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".cfg"))


def resolve_config_path(path):
    """Filesystem path, falling back to a bundled config of the same name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("gkdvbh") / "configs" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config file not found: {path}")


def parse_config(path):
    """Read a config file (or a bundled config by name) into a SimConfig."""
    p = resolve_config_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from None
    return parse_config_text(text, base_dir=p.parent)
