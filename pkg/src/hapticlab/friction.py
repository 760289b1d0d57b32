"""Block on an inclined plane with stick/slip Coulomb friction.

Motion is one-dimensional along the track (up-slope positive). The force
breakdown carries everything the arrow display and the HUD need, computed
from the same tick's state with no smoothing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Mode(enum.Enum):
    STICK = 0
    SLIP = 1


@dataclass(frozen=True)
class FrictionScene:
    theta: float              # incline angle, rad
    mu_s: float
    mu_k: float
    mass: float               # kg
    g: float = 9.81           # m/s^2
    track_half_length: float = 0.6  # m

    def __post_init__(self):
        if not (0.0 <= self.theta < math.pi / 2):
            raise ValueError(f"theta must be in [0, pi/2), got {self.theta}")
        if not (self.mu_s >= self.mu_k >= 0.0):
            raise ValueError(f"need mu_s >= mu_k >= 0, got mu_s={self.mu_s} mu_k={self.mu_k}")
        if self.mass <= 0.0 or self.g <= 0.0 or self.track_half_length <= 0.0:
            raise ValueError("mass, g and track_half_length must be > 0")


@dataclass(frozen=True)
class BlockState:
    s: float          # m along the track, up-slope positive
    v: float          # m/s
    mode: Mode = Mode.STICK


@dataclass(frozen=True)
class ForceBreakdown:
    gravity_tangential: float   # N, signed along track (negative = down-slope)
    normal: float               # N, >= 0
    friction: float             # N, signed along track
    applied_tangential: float   # N, signed along track
    applied_normal: float       # N, positive = pulling away from the plane


def normal_force(scene: FrictionScene, applied_normal: float) -> float:
    """Reaction of the plane. Pulling off reduces it, pressing increases it; never negative."""
    return max(0.0, scene.mass * scene.g * math.cos(scene.theta) - applied_normal)


def gravity_tangential(scene: FrictionScene) -> float:
    """Tangential weight component; negative because gravity pulls down-slope."""
    return -scene.mass * scene.g * math.sin(scene.theta)


def breakaway_check(scene: FrictionScene, applied_tangential: float, normal: float) -> Mode:
    """Stick survives while the net non-friction force stays within the static bound (strict)."""
    net = applied_tangential + gravity_tangential(scene)
    if abs(net) > scene.mu_s * normal:
        return Mode.SLIP
    return Mode.STICK


def friction_step(
    scene: FrictionScene,
    state: BlockState,
    applied: tuple[float, float],
    dt: float,
    v_eps: float = 1e-4,
) -> tuple[BlockState, ForceBreakdown]:
    """Advance the block one servo tick under (tangential, normal) applied force.

    Stick holds v = 0 and reports the balancing friction. Slip integrates
    m*a = net - mu_k*N*sgn(v) with semi-implicit Euler; a velocity that
    crosses zero (or falls below v_eps) re-sticks unless the static bound is
    already exceeded, which kills the classic sign-flip chatter. Track ends
    are inelastic stops.
    """
    a_t, a_n = applied
    n = normal_force(scene, a_n)
    g_t = gravity_tangential(scene)
    f_net = a_t + g_t
    mode = state.mode
    v = state.v

    if mode is Mode.STICK:
        mode = breakaway_check(scene, a_t, n)
        if mode is Mode.STICK:
            bd = ForceBreakdown(g_t, n, -f_net, a_t, a_n)
            return BlockState(state.s, 0.0, Mode.STICK), bd

    # sliding: kinetic friction opposes velocity (or, at breakaway, the impending motion)
    direction = math.copysign(1.0, v) if v != 0.0 else math.copysign(1.0, f_net)
    if f_net == 0.0 and v == 0.0:
        direction = 0.0
    fric = -scene.mu_k * n * direction
    a = (f_net + fric) / scene.mass
    v2 = v + a * dt

    # sign comparison, not v2*v < 0: the product underflows for denormal speeds
    crossed = (v != 0.0 and (v > 0.0) != (v2 > 0.0)) or abs(v2) < v_eps
    if crossed and abs(f_net) <= scene.mu_s * n:
        bd = ForceBreakdown(g_t, n, -f_net, a_t, a_n)
        return BlockState(state.s, 0.0, Mode.STICK), bd

    s2 = state.s + v2 * dt
    if s2 > scene.track_half_length:
        bd = ForceBreakdown(g_t, n, fric, a_t, a_n)
        return BlockState(scene.track_half_length, 0.0, Mode.STICK), bd
    if s2 < -scene.track_half_length:
        bd = ForceBreakdown(g_t, n, fric, a_t, a_n)
        return BlockState(-scene.track_half_length, 0.0, Mode.STICK), bd

    bd = ForceBreakdown(g_t, n, fric, a_t, a_n)
    return BlockState(s2, v2, Mode.SLIP), bd


def hud_fields(breakdown: ForceBreakdown) -> dict[str, str]:
    """Magnitudes of the displayed forces, formatted to two decimals."""
    return {
        "gravity_tangential": format_newtons(abs(breakdown.gravity_tangential)),
        "normal": format_newtons(breakdown.normal),
        "friction": format_newtons(abs(breakdown.friction)),
        "applied": format_newtons(abs(breakdown.applied_tangential)),
    }


def format_newtons(value: float) -> str:
    # Exact 2-decimal ties do not exist for binary doubles, so this matches
    # round-half-up (and JS toFixed) on every representable input.
    return f"{value:.2f}"
