"""Virtual haptic device boundary: position samples in, clamped force commands out.

A real driver would sit behind the same contract; everything here is a
deterministic stand-in (scripted hand, session replay, network pointer) so
the whole system runs and tests without hardware.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .kinematics import Vec3, clamp_force

VELOCITY_CUTOFF_HZ = 50.0


class ScriptError(ValueError):
    """Waypoint script is empty or its timestamps are not strictly increasing."""


@dataclass(frozen=True)
class DeviceDescriptor:
    workspace_half_extent: float = 0.06  # m per axis
    max_force_n: float = 8.0
    id: int = 0

    def __post_init__(self):
        if self.workspace_half_extent <= 0.0 or self.max_force_n <= 0.0:
            raise ValueError("workspace_half_extent and max_force_n must be > 0")


class DeviceSample(NamedTuple):
    t: float
    pos: Vec3
    vel: Vec3
    button: bool = False


class ForceCommand(NamedTuple):
    force: Vec3


class _VelocityFilter:
    """Backward difference + first-order low-pass; raw 1 kHz differentiation is noise."""

    __slots__ = ("_prev_pos", "_vel")

    def __init__(self):
        self._prev_pos: Optional[Vec3] = None
        self._vel = Vec3(0.0, 0.0, 0.0)

    def step(self, pos: Vec3, dt: float) -> Vec3:
        if self._prev_pos is None:
            self._prev_pos = pos
            return self._vel
        raw = (pos - self._prev_pos) * (1.0 / dt)
        rc = 1.0 / (2.0 * math.pi * VELOCITY_CUTOFF_HZ)
        alpha = dt / (dt + rc)
        self._vel = self._vel + (raw - self._vel) * alpha
        self._prev_pos = pos
        return self._vel


@dataclass
class ForceStats:
    """Bounded per-device record of what was commanded; feeds the safety invariant."""

    count: int = 0
    max_norm: float = 0.0
    last: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))


class VirtualDevice:
    """Base class: clamps positions to the workspace and forces to the device limit."""

    def __init__(self, descriptor: DeviceDescriptor):
        self.descriptor = descriptor
        self.stats = ForceStats()
        self._filter = _VelocityFilter()
        self._last_t: Optional[float] = None
        self.exhausted = False

    def _position(self, t: float) -> Optional[Vec3]:
        raise NotImplementedError

    def sample(self, t: float) -> Optional[DeviceSample]:
        if self._last_t is not None and t <= self._last_t:
            raise ValueError(f"sample times must increase: {t} after {self._last_t}")
        pos = self._position(t)
        if pos is None:
            self.exhausted = True
            return None
        dt = t - self._last_t if self._last_t is not None else 0.0
        self._last_t = t
        pos = self._clamp_workspace(pos)
        vel = self._filter.step(pos, dt) if dt > 0.0 else self._filter.step(pos, 1.0)
        return DeviceSample(t=t, pos=pos, vel=vel, button=self._button(t))

    def _button(self, t: float) -> bool:
        return False

    def _clamp_workspace(self, pos: Vec3) -> Vec3:
        h = self.descriptor.workspace_half_extent
        return Vec3(
            min(h, max(-h, pos.x)),
            min(h, max(-h, pos.y)),
            min(h, max(-h, pos.z)),
        )

    def command_force(self, cmd: ForceCommand) -> bool:
        """Clamp and dispatch; returns False (pause) once the input stream has ended."""
        f = clamp_force(cmd.force, self.descriptor.max_force_n)
        self.stats.count += 1
        n = f.norm()
        if n > self.stats.max_norm:
            self.stats.max_norm = n
        self.stats.last = f
        return not self.exhausted


class ScriptedDevice(VirtualDevice):
    """Deterministic stand-in for the hand: piecewise-linear waypoints, hold at the ends."""

    def __init__(self, descriptor: DeviceDescriptor, waypoints: Sequence[tuple[float, Vec3]],
                 button: bool = False):
        super().__init__(descriptor)
        if len(waypoints) == 0:
            raise ScriptError("script needs at least one waypoint")
        times = [t for t, _ in waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScriptError("waypoint times must be strictly increasing")
        self._times = times
        self._points = [p for _, p in waypoints]
        self._pressed = button

    def _button(self, t: float) -> bool:
        return self._pressed

    def _position(self, t: float) -> Vec3:
        return script_position(self._times, self._points, t)


def script_position(times: Sequence[float], points: Sequence[Vec3], t: float) -> Vec3:
    """Piecewise-linear interpolation with boundary hold."""
    if t <= times[0]:
        return points[0]
    if t >= times[-1]:
        return points[-1]
    i = bisect.bisect_right(times, t)
    t0, t1 = times[i - 1], times[i]
    u = (t - t0) / (t1 - t0)
    p0, p1 = points[i - 1], points[i]
    return p0 + (p1 - p0) * u


def load_script(path: str) -> list[tuple[float, Vec3]]:
    """Script file: JSON array of {"t": seconds, "pos": [x, y, z]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_script(data)


def parse_script(data) -> list[tuple[float, Vec3]]:
    if not isinstance(data, list) or not data:
        raise ScriptError("script must be a non-empty JSON array of waypoints")
    out = []
    for entry in data:
        try:
            t = float(entry["t"])
            x, y, z = entry["pos"]
            out.append((t, Vec3(float(x), float(y), float(z))))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScriptError(f"bad waypoint {entry!r}: {exc}") from exc
    return out


class ReplayDevice(VirtualDevice):
    """Feeds back recorded samples verbatim, then signals end-of-input."""

    def __init__(self, descriptor: DeviceDescriptor, samples: Sequence[DeviceSample]):
        super().__init__(descriptor)
        self._samples = list(samples)
        self._next = 0

    def sample(self, t: float) -> Optional[DeviceSample]:
        if self._next >= len(self._samples):
            self.exhausted = True
            return None
        s = self._samples[self._next]
        self._next += 1
        return s


class NetworkPointerDevice(VirtualDevice):
    """UI-driven pointer: latest-wins mailbox, resampled onto servo ticks.

    push() may be called from any thread; the single-reference swap is the
    whole synchronization story, so the servo loop never blocks on the
    network and a missing update just holds the last position.
    """

    def __init__(self, descriptor: DeviceDescriptor):
        super().__init__(descriptor)
        self._target = Vec3(0.0, 0.0, 0.0)

    def push(self, normalized: Vec3) -> None:
        h = self.descriptor.workspace_half_extent
        self._target = Vec3(
            min(1.0, max(-1.0, normalized.x)) * h,
            min(1.0, max(-1.0, normalized.y)) * h,
            min(1.0, max(-1.0, normalized.z)) * h,
        )

    def _position(self, t: float) -> Vec3:
        return self._target


def mirror_x(v: Vec3) -> Vec3:
    return Vec3(-v.x, v.y, v.z)


class DualRig:
    """Two devices pointed toward each other, expressed in one shared world frame.

    The right device is mounted mirrored, so its local x flips in world
    coordinates (positions, velocities and commanded forces alike). Rest
    poses sit at +-handle_half_length on the world x axis. Either stream
    ending ends the whole rig.
    """

    def __init__(self, left: VirtualDevice, right: VirtualDevice,
                 handle_half_length: float, scale: float = 1.0):
        self.left = left
        self.right = right
        self.handle_half_length = handle_half_length
        self.scale = scale

    @property
    def devices(self) -> list[VirtualDevice]:
        return [self.left, self.right]

    def sample(self, t: float) -> Optional[list[DeviceSample]]:
        sl = self.left.sample(t)
        sr = self.right.sample(t)
        if sl is None or sr is None:
            return None
        d = self.handle_half_length
        left_world = DeviceSample(
            t=sl.t, pos=Vec3(-d, 0.0, 0.0) + sl.pos * self.scale,
            vel=sl.vel * self.scale, button=sl.button)
        right_world = DeviceSample(
            t=sr.t, pos=Vec3(d, 0.0, 0.0) + mirror_x(sr.pos) * self.scale,
            vel=mirror_x(sr.vel) * self.scale, button=sr.button)
        return [left_world, right_world]

    def command(self, forces: Sequence[Vec3]) -> bool:
        ok_l = self.left.command_force(ForceCommand(forces[0]))
        ok_r = self.right.command_force(ForceCommand(mirror_x(forces[1])))
        return ok_l and ok_r


class SingleRig:
    """Adapter giving one device the same sample/command surface as the dual rig."""

    def __init__(self, device: VirtualDevice):
        self.device = device

    @property
    def devices(self) -> list[VirtualDevice]:
        return [self.device]

    def sample(self, t: float) -> Optional[list[DeviceSample]]:
        s = self.device.sample(t)
        return None if s is None else [s]

    def command(self, forces: Sequence[Vec3]) -> bool:
        return self.device.command_force(ForceCommand(forces[0]))
