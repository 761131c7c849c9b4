"""Run configuration shared by the CLI and the figure generators."""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass, fields

import numpy as np

from .densmat import SIGMA_Z, qubit_from_theta
from .dynamics import (
    AmplitudeDamping,
    ConstantRate,
    Dephasing,
    OhmicZeroT,
    RateModel,
    Trajectory,
    Unitary,
    advance,
    integrate_master,
    shift_origin,
    trajectory_from_analytic,
)

STEPS_PER_UNIT_TIME = 4000
CHANNELS = ("dephasing", "damping", "unitary")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Bad command-line or config-file input (exit code 2)."""


_ANGLE = re.compile(r"^\s*(?:([0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_angle(value) -> float:
    """Accept plain numbers or tokens such as ``pi/2``, ``2pi/3``, ``3*pi/4``."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower()
    m = _ANGLE.match(text)
    try:
        if m:
            num = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return num * math.pi / den
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse angle {value!r}") from exc


def parse_rate(spec: str) -> RateModel:
    """``const:<g>`` or ``ohmic:k=<k>,wc=<w>``."""
    text = str(spec).strip()
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            return ConstantRate(float(rest))
        if kind == "ohmic":
            params = dict(item.split("=", 1) for item in rest.split(",") if item)
            unknown = set(params) - {"k", "wc"}
            if unknown:
                raise ConfigError(f"unknown ohmic parameter(s): {sorted(unknown)}")
            return OhmicZeroT(k=float(params["k"]), omega_c=float(params.get("wc", 1.0)))
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad rate specification {spec!r}: {exc}") from exc
    raise ConfigError(f"rate must be const:<g> or ohmic:k=<k>,wc=<w>, got {spec!r}")


@dataclass(frozen=True)
class RunConfig:
    channel: str = "dephasing"
    gamma: str = "const:2"
    theta: float = math.pi / 2
    phase: float = 0.0
    omega0: float = 0.0
    tau: float = 0.5
    steps: int | None = None
    t0: float = 0.0
    out: str | None = None
    format: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.steps is not None and self.steps < 8:
            raise ConfigError(f"steps must be at least 8, got {self.steps}")
        if self.t0 < 0:
            raise ConfigError(f"t0 must be non-negative, got {self.t0}")
        parse_rate(self.gamma)

    @property
    def n_steps(self) -> int:
        if self.steps is not None:
            return self.steps
        return max(8, int(round(STEPS_PER_UNIT_TIME * self.tau)))

    def echo(self) -> dict:
        d = asdict(self)
        d["steps"] = self.n_steps
        d.pop("out")
        return d


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Merge a JSON config file with flag overrides (flags win)."""
    data = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("theta", "phase"):
        if key in data:
            data[key] = parse_angle(data[key])
    try:
        for key in ("omega0", "tau", "t0"):
            if key in data:
                data[key] = float(data[key])
        for key in ("steps", "seed"):
            if key in data and data[key] is not None:
                data[key] = int(data[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(**data)


def build_channel(cfg: RunConfig):
    rate = parse_rate(cfg.gamma)
    if cfg.channel == "dephasing":
        return Dephasing(cfg.omega0, rate)
    if cfg.channel == "damping":
        return AmplitudeDamping(rate)
    return Unitary(0.5 * cfg.omega0 * SIGMA_Z)


def run_trajectory(cfg: RunConfig) -> Trajectory:
    """Trajectory over [t0, t0 + tau] starting from the theta/phase state.

    With t0 > 0 the initial state is carried through [0, t0] by the same
    channel, so the run continues the process rather than restarting it.
    """
    rho0 = qubit_from_theta(cfg.theta, cfg.phase)
    channel = build_channel(cfg)
    if cfg.t0 > 0:
        rho0 = advance(rho0, channel, cfg.t0)
        channel = shift_origin(channel, cfg.t0)
    if isinstance(channel, Unitary):
        return integrate_master(rho0, channel, cfg.tau, cfg.n_steps)
    return trajectory_from_analytic(rho0, channel, cfg.tau, cfg.n_steps)
