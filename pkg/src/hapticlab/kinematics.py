"""Shared vector math, the fixed-step integrator, and frame transforms.

Everything in this module is pure and never reads the wall clock, so a
simulation driven only through these primitives is bitwise reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class StateCorruptionError(ValueError):
    """A kinematic quantity went non-finite (NaN or inf leaked into the sim)."""


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other):
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, k: float):
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other) -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


ZERO = Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class StepConfig:
    """Servo-step parameters: period and the rest-detection threshold."""

    dt: float = 1e-3      # s
    v_eps: float = 1e-4   # m/s, below this a sliding body is considered at rest

    def __post_init__(self):
        if not (0.0 < self.dt <= 5e-3):
            raise ValueError(f"dt must be in (0, 5e-3], got {self.dt}")
        if self.v_eps <= 0.0:
            raise ValueError(f"v_eps must be > 0, got {self.v_eps}")


def integrate_semi_implicit(pos: Vec3, vel: Vec3, acc: Vec3, dt: float) -> tuple[Vec3, Vec3]:
    """One symplectic Euler step: velocity first, then position with the new velocity."""
    if dt <= 0.0 or not (pos.is_finite() and vel.is_finite() and acc.is_finite() and math.isfinite(dt)):
        raise StateCorruptionError(f"non-finite integrator input: pos={pos} vel={vel} acc={acc} dt={dt}")
    vel2 = Vec3(vel.x + acc.x * dt, vel.y + acc.y * dt, vel.z + acc.z * dt)
    pos2 = Vec3(pos.x + vel2.x * dt, pos.y + vel2.y * dt, pos.z + vel2.z * dt)
    return pos2, vel2


def clamp_force(f: Vec3, max_n: float) -> Vec3:
    """Scale a force down to max_n newtons if it exceeds the limit; direction is preserved."""
    if max_n <= 0.0:
        raise ValueError(f"max_n must be > 0, got {max_n}")
    n = f.norm()
    if n <= max_n:
        return f
    return f * (max_n / n)


def rotate_about(v: Vec3, axis_unit: Vec3, angle: float) -> Vec3:
    """Rodrigues rotation of v by angle (rad) about a unit axis."""
    c = math.cos(angle)
    s = math.sin(angle)
    k = axis_unit
    kxv = k.cross(v)
    kdv = k.dot(v)
    return Vec3(
        v.x * c + kxv.x * s + k.x * kdv * (1.0 - c),
        v.y * c + kxv.y * s + k.y * kdv * (1.0 - c),
        v.z * c + kxv.z * s + k.z * kdv * (1.0 - c),
    )


def rotate_z(v: Vec3, angle: float) -> Vec3:
    """Rotation about the +z axis; the common case for the spinning-platform lab."""
    c = math.cos(angle)
    s = math.sin(angle)
    return Vec3(v.x * c - v.y * s, v.x * s + v.y * c, v.z)


def frame_transform(v: Vec3, omega: Vec3, t: float, direction: str) -> Vec3:
    """Rigid rotation between a rotating frame and the inertial frame.

    direction is "rotating_to_inertial" or "inertial_to_rotating"; the frame
    has turned by |omega|*t at time t, so the two directions are inverses.
    """
    if direction == "rotating_to_inertial":
        sign = 1.0
    elif direction == "inertial_to_rotating":
        sign = -1.0
    else:
        raise ValueError(f"unknown direction {direction!r}")
    w = omega.norm()
    if w == 0.0:
        return v
    return rotate_about(v, omega * (1.0 / w), sign * w * t)
