"""Flat ``key = value`` run configuration.

Defaults come from the packaged ``default.conf``; a user file overrides any
subset of keys.  Values round-trip: ``parse(emit(cfg)) == cfg``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import ModelParams, stability_bound
from .errors import ConfigurationError
from .grid import CutoffSpec, Grid

PROFILES = ("constant", "gaussian", "zero")


class ConfigParseError(ConfigurationError):
    """Malformed config text; ``lineno`` is 1-based."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class RunConfig:
    half_width: float
    dx: float
    dt: float
    horizon: float
    lam: float
    beta: float
    plateau: float
    ramp: float
    m1_profile: str
    m1_amplitude: float
    m1_width: float
    m2_profile: str
    m2_amplitude: float
    m2_width: float
    noise: bool
    seed: int
    tol: float
    max_iter: int
    picard_steps: int
    alpha: float
    p: float
    n: int
    replicas: int
    noise_times: tuple
    decay_plateau: float
    decay_ramp: float
    decay_horizon: float
    cauchy_plateaus: tuple
    cauchy_ramp: float
    consistency_dts: tuple
    out: str
    csv_every: int

    @classmethod
    def defaults(cls):
        text = resources.files(__package__).joinpath("default.conf").read_text()
        return parse_config(text, base=None)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    # derived objects

    def grid(self, horizon=None):
        return Grid.from_spacing(self.half_width, self.dx, self.dt,
                                 self.horizon if horizon is None else horizon)

    @property
    def cutoff(self):
        return CutoffSpec(self.plateau, self.ramp)

    def initial_data(self, grid):
        return (_profile(self.m1_profile, self.m1_amplitude, self.m1_width, grid.x),
                _profile(self.m2_profile, self.m2_amplitude, self.m2_width, grid.x))

    def model(self, grid, cutoff=None):
        m1, m2 = self.initial_data(grid)
        return ModelParams(self.lam, cutoff or self.cutoff, m1, m2, self.beta)

    @property
    def seeds(self):
        return (self.seed, self.seed) if self.noise else None

    def validate(self):
        """Check physical ranges; raises ConfigurationError naming the constraint."""
        _require(self.half_width > self.plateau + self.ramp,
                 f"L > a+w violated: half_width={self.half_width} <= plateau+ramp={self.plateau + self.ramp}")
        _require(self.ramp > 0, f"ramp w > 0 violated: ramp={self.ramp}")
        _require(self.plateau >= 0, f"plateau a >= 0 violated: plateau={self.plateau}")
        _require(self.dx > 0 and self.dt > 0 and self.horizon > 0,
                 "dx > 0, dt > 0 and horizon > 0 required")
        _require(self.lam >= 0, f"lam >= 0 violated: lam={self.lam}")
        _require(self.beta >= 0, f"beta >= 0 violated: beta={self.beta}")
        _require(self.alpha > 0, f"alpha > 0 violated: alpha={self.alpha}")
        _require(self.p >= 1, f"p >= 1 violated: p={self.p}")
        _require(self.n >= 0, f"n >= 0 violated: n={self.n}")
        _require(self.tol > 0 and self.max_iter >= 1 and self.picard_steps >= 1,
                 "tol > 0, max_iter >= 1 and picard_steps >= 1 required")
        _require(self.replicas >= 2, f"replicas >= 2 violated: replicas={self.replicas}")
        _require(self.csv_every >= 1, f"csv_every >= 1 violated: csv_every={self.csv_every}")
        for name, kind in (("m1_profile", self.m1_profile), ("m2_profile", self.m2_profile)):
            _require(kind in PROFILES, f"{name} must be one of {', '.join(PROFILES)}, got {kind!r}")
        nx = 2 * self.half_width / self.dx
        _require(math.isclose(nx, round(nx), rel_tol=1e-9),
                 f"2*half_width/dx must be an integer, got {nx}")
        steps = self.horizon / self.dt
        _require(math.isclose(steps, round(steps), rel_tol=1e-9),
                 f"horizon/dt must be an integer, got {steps}")
        M = max(abs(self.m1_amplitude) * (self.m1_profile != "zero"),
                abs(self.m2_amplitude) * (self.m2_profile != "zero"))
        bound = stability_bound(M, self.lam)
        _require(self.dt <= bound,
                 f"dt below stability bound violated: dt={self.dt} > 0.5/(3M^2+1+2lam)={bound:.6g} at M={M}")
        return self


def _require(ok, message):
    if not ok:
        raise ConfigurationError(message)


def _profile(kind, amplitude, width, x):
    if kind == "constant":
        return np.full(x.shape, float(amplitude))
    if kind == "gaussian":
        return amplitude * np.exp(-(x / width) ** 2)
    if kind == "zero":
        return np.zeros(x.shape)
    raise ConfigurationError(f"unknown profile {kind!r}")


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(kind, raw):
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "tuple":
        items = [s.strip() for s in raw.split(",")]
        if not all(items):
            raise ValueError(f"empty list item in {raw!r}")
        return tuple(float(s) for s in items)
    return raw


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def parse_config(text, base: RunConfig | None = "defaults"):
    """Parse config text over ``base`` (the packaged defaults unless ``None``).

    With ``base=None`` every key must be present.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(lineno, f"expected 'key = value', got {body!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _TYPES:
            raise ConfigParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ConfigParseError(lineno, f"duplicate key {key!r}")
        if not raw:
            raise ConfigParseError(lineno, f"missing value for {key!r}")
        try:
            values[key] = _convert(_TYPES[key], raw)
        except ValueError as exc:
            raise ConfigParseError(lineno, f"bad value for {key!r}: {exc}") from None
    if base == "defaults":
        base = RunConfig.defaults()
    if base is None:
        missing = [k for k in _TYPES if k not in values]
        if missing:
            raise ConfigurationError(f"missing keys: {', '.join(missing)}")
        return RunConfig(**values)
    return dataclasses.replace(base, **values)


def emit_config(cfg: RunConfig, exclude=()):
    return "".join(f"{f.name} = {_format(getattr(cfg, f.name))}\n" for f in fields(cfg)
                   if f.name not in exclude)


def load_config(path=None):
    if path is None:
        return RunConfig.defaults()
    return parse_config(Path(path).read_text())
