"""Hand-held gyroscope: two handles on the spin axis, torque from hand forces,
axis precession at the analytic rate tau_perp / |L|.

The wheel is a uniform disc spun at a commanded rate (a control, not a
dynamical variable), so |L| only changes when the user moves the spin
slider. The axis update is an exact rotation about (axis x tau_perp)/|L|,
which realizes d(axis)/dt = tau_perp/|L| -- i.e. dL/dt = tau -- while
keeping the axis unit-length to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .kinematics import Vec3, rotate_about

SPIN_RATE_MAX = 200.0  # rad/s

# viscous response used when the wheel is not spinning and there is no
# gyroscopic stiffness: the axis turns about the applied couple like a rod
FREE_ROD_DAMPING = 0.5  # N*m*s


class UndefinedPrecessionError(ValueError):
    """Precession rate is undefined when the wheel has no spin (|L| = 0)."""


@dataclass(frozen=True)
class GyroConfig:
    wheel_mass: float          # kg
    wheel_radius: float        # m
    handle_half_length: float  # m, pivot to each handle

    def __post_init__(self):
        if self.wheel_mass <= 0.0 or self.wheel_radius <= 0.0 or self.handle_half_length <= 0.0:
            raise ValueError("wheel_mass, wheel_radius and handle_half_length must be > 0")


@dataclass(frozen=True)
class GyroState:
    axis: Vec3        # unit vector
    spin_rate: float  # rad/s, in [0, SPIN_RATE_MAX]


class HandleForcePair(NamedTuple):
    left: Vec3   # N, acts at -handle_half_length * axis
    right: Vec3  # N, acts at +handle_half_length * axis


def moment_of_inertia(wheel_mass: float, wheel_radius: float) -> float:
    """Uniform disc about its symmetry axis."""
    if wheel_mass <= 0.0 or wheel_radius <= 0.0:
        raise ValueError("wheel_mass and wheel_radius must be > 0")
    return 0.5 * wheel_mass * wheel_radius * wheel_radius


def angular_momentum(config: GyroConfig, state: GyroState) -> Vec3:
    i = moment_of_inertia(config.wheel_mass, config.wheel_radius)
    return state.axis * (i * state.spin_rate)


def handles_to_torque(left_force: Vec3, right_force: Vec3, handle_half_length: float, axis: Vec3) -> Vec3:
    """Torque about the gyro center from the two handle forces. Common-mode pushes cancel."""
    arm = axis * handle_half_length
    return arm.cross(right_force) + (-arm).cross(left_force)


def perpendicular_torque(torque: Vec3, axis: Vec3) -> Vec3:
    """Component of the torque perpendicular to the spin axis; the only part that precesses it."""
    return torque - axis * torque.dot(axis)


def precession_rate(torque_perp: float, l_mag: float) -> float:
    """Analytic rate: perpendicular torque divided by spin angular momentum."""
    if l_mag <= 0.0:
        raise UndefinedPrecessionError("wheel is not spinning: no gyroscopic stiffness")
    return torque_perp / l_mag


def gyro_step(
    config: GyroConfig,
    state: GyroState,
    handle_forces: HandleForcePair,
    dt: float,
) -> tuple[GyroState, bool]:
    """Advance the axis one tick; returns (new state, free_rod flag).

    Spinning: the axis is rotated about (axis x tau_perp)/|L|, so the axis
    tip chases the torque at rate |tau_perp|/|L|. Not spinning: the axis
    turns about the couple itself (free-rod response), flagged so the panel
    can show that the gyroscopic stiffness is gone.
    """
    tau = handles_to_torque(handle_forces.left, handle_forces.right, config.handle_half_length, state.axis)
    tau_perp = perpendicular_torque(tau, state.axis)
    tau_mag = tau_perp.norm()
    l_mag = moment_of_inertia(config.wheel_mass, config.wheel_radius) * state.spin_rate

    if l_mag > 0.0:
        free_rod = False
        if tau_mag == 0.0:
            return state, free_rod
        omega_rot = state.axis.cross(tau_perp) * (1.0 / l_mag)
    else:
        free_rod = True
        if tau_mag == 0.0:
            return state, free_rod
        omega_rot = tau_perp * (1.0 / FREE_ROD_DAMPING)

    rate = omega_rot.norm()
    axis2 = rotate_about(state.axis, omega_rot * (1.0 / rate), rate * dt)
    axis2 = axis2.normalized()
    return GyroState(axis2, state.spin_rate), free_rod


def handle_reaction(config: GyroConfig, state: GyroState, axis_rate: Vec3) -> HandleForcePair:
    """Gyroscopic reaction couple felt at the handles for a user-imposed axis rotation rate."""
    l_vec = angular_momentum(config, state)
    tau_r = axis_rate.cross(l_vec)
    right = tau_r.cross(state.axis) * (1.0 / (2.0 * config.handle_half_length))
    return HandleForcePair(left=-right, right=right)
