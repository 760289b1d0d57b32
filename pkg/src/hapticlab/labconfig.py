"""Process configuration: flat key-path registry, file + CLI override parsing.

Validation collects every violation rather than bailing on the first one,
and unknown keys are rejected so typos never silently fall back to a
default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

from .kinematics import StepConfig
from .servo import CouplingParams, check_coupling_stability


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _boolish(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str):
        if v.lower() in ("true", "1", "yes", "on"):
            return True
        if v.lower() in ("false", "0", "no", "off"):
            return False
    raise ValueError(f"not a boolean: {v!r}")


@dataclass(frozen=True)
class _Key:
    default: object
    coerce: Callable
    check: Optional[Callable[[object], Optional[str]]] = None
    live: bool = False
    help: str = ""


def _positive(v) -> Optional[str]:
    return None if v > 0 else "must be > 0"


def _non_negative(v) -> Optional[str]:
    return None if v >= 0 else "must be >= 0"


REGISTRY: dict[str, _Key] = {
    "scenario": _Key("friction", str,
                     lambda v: None if v in ("friction", "coriolis", "precession")
                     else "must be friction, coriolis or precession",
                     help="active lab"),
    "port": _Key(8765, int, lambda v: None if 1 <= v <= 65535 else "must be in [1, 65535]",
                 help="WebSocket service port"),
    "servo.rate_hz": _Key(1000.0, float,
                          lambda v: None if v >= 200.0 else "must be >= 200 (dt <= 5 ms)",
                          help="haptic loop rate"),
    "snapshot.rate_hz": _Key(60.0, float, _positive, help="snapshot stream rate"),
    "coupling.k": _Key(400.0, float, _positive, help="coupling spring, N/m"),
    "coupling.b": _Key(2.0, float, _non_negative, help="coupling damper, N*s/m"),
    "clamp.max_force_n": _Key(8.0, float, _positive, help="device force limit, N"),
    "device.workspace_half_extent_m": _Key(0.06, float, _positive),
    "device.workspace_scale": _Key(0.0, float, _non_negative,
                                   help="scene m per device m; 0 = per-scenario default"),
    "friction.theta_deg": _Key(30.0, float,
                               lambda v: None if 0.0 <= v < 90.0 else "must be in [0, 90)",
                               live=True),
    # mu_s > tan(30 deg) so the default scene starts in static equilibrium
    "friction.mu_s": _Key(0.6, float, _non_negative, live=True),
    "friction.mu_k": _Key(0.3, float, _non_negative, live=True),
    "friction.mass_kg": _Key(1.0, float, _positive, live=True),
    "friction.track_len_m": _Key(1.2, float, _positive),
    "coriolis.omega": _Key(1.0, float, None, live=True, help="platform spin, rad/s, signed"),
    "coriolis.platform_radius_m": _Key(0.5, float, _positive),
    "coriolis.goal_angle_deg": _Key(0.0, float, None),
    "coriolis.goal_radius_m": _Key(0.08, float, _positive),
    "coriolis.variant": _Key("ball", str,
                             lambda v: None if v in ("ball", "glider") else "must be ball or glider"),
    "coriolis.drag": _Key(0.8, float, _non_negative, live=True, help="surface drag, N*s/m (ball)"),
    "coriolis.centrifugal": _Key(False, _boolish, None, live=True),
    "coriolis.puck_mass_kg": _Key(0.5, float, _positive),
    "coriolis.haptic_gain": _Key(1.0, float, _non_negative, live=True),
    "precession.wheel_mass_kg": _Key(1.0, float, _positive, live=True),
    "precession.wheel_radius_m": _Key(0.2, float, _positive, live=True),
    "precession.handle_half_len_m": _Key(0.15, float, _positive, live=True),
    "precession.spin_rate": _Key(100.0, float,
                                 lambda v: None if 0.0 <= v <= 200.0 else "must be in [0, 200]",
                                 live=True),
}

LIVE_TUNABLE = frozenset(k for k, spec in REGISTRY.items() if spec.live)

_SCENARIO_SCALE = {"friction": 10.0, "coriolis": 10.0, "precession": 2.5}


class LabConfig:
    """Validated, effectively-immutable view of the flat key/value map."""

    def __init__(self, values: dict):
        self._v = dict(values)

    def __getitem__(self, key: str):
        return self._v[key]

    @property
    def scenario(self) -> str:
        return self._v["scenario"]

    @property
    def dt(self) -> float:
        return 1.0 / self._v["servo.rate_hz"]

    @property
    def port(self) -> int:
        return self._v["port"]

    def workspace_scale(self) -> float:
        v = self._v["device.workspace_scale"]
        return v if v > 0.0 else _SCENARIO_SCALE[self.scenario]

    def step_config(self) -> StepConfig:
        return StepConfig(dt=self.dt)

    def coupling_params(self) -> CouplingParams:
        return CouplingParams(k_c=self._v["coupling.k"], b_c=self._v["coupling.b"])

    def to_flat(self) -> dict:
        return dict(self._v)

    def with_value(self, key: str, value) -> "LabConfig":
        merged = dict(self._v)
        merged[key] = value
        return validate(merged)

    @staticmethod
    def from_flat(values: dict) -> "LabConfig":
        return validate(values)


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        path = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, prefix=f"{path}."))
        else:
            out[path] = v
    return out


def validate(raw: dict) -> LabConfig:
    """Coerce + range-check every key, then the cross-field invariants."""
    violations: list[str] = []
    values: dict = {}
    for key, spec in REGISTRY.items():
        values[key] = spec.default
    for key, v in raw.items():
        spec = REGISTRY.get(key)
        if spec is None:
            violations.append(f"{key}: unknown key")
            continue
        try:
            cv = spec.coerce(v)
        except (TypeError, ValueError):
            violations.append(f"{key}: cannot interpret {v!r}")
            continue
        if spec.check is not None:
            problem = spec.check(cv)
            if problem is not None:
                violations.append(f"{key}: {problem}")
                continue
        values[key] = cv

    if not violations:
        if values["friction.mu_s"] < values["friction.mu_k"]:
            violations.append("friction.mu_s: must be >= friction.mu_k")
        if values["coriolis.goal_radius_m"] >= values["coriolis.platform_radius_m"]:
            violations.append("coriolis.goal_radius_m: must be smaller than the platform radius")
        if values["snapshot.rate_hz"] > values["servo.rate_hz"]:
            violations.append("snapshot.rate_hz: cannot exceed servo.rate_hz")
        dt = 1.0 / values["servo.rate_hz"]
        m_min = min(values["friction.mass_kg"], values["coriolis.puck_mass_kg"], 0.1)
        try:
            check_coupling_stability(CouplingParams(values["coupling.k"], values["coupling.b"]),
                                     dt, m_min)
        except ValueError as exc:
            violations.append(f"coupling.k: {exc}")

    if violations:
        raise ConfigError(violations)
    return LabConfig(values)


def parse_config(path: Optional[str] = None, overrides: Optional[dict] = None,
                 fallbacks: Optional[dict] = None) -> LabConfig:
    """Load a JSON config file (flat dotted keys or nested sections), apply overrides.

    `fallbacks` sit below the file: used only when neither the file nor the
    overrides name the key (e.g. the LAB_PORT environment variable).
    """
    raw: dict = {}
    if fallbacks:
        raw.update(fallbacks)
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError([f"{path}: not valid JSON: {exc}"]) from exc
        if not isinstance(data, dict):
            raise ConfigError([f"{path}: config must be a JSON object"])
        raw.update(_flatten(data))
    if overrides:
        raw.update(overrides)
    return validate(raw)


def default_config() -> LabConfig:
    return validate({})
