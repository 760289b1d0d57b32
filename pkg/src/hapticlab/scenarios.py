"""Lab adapters: bind each sim to the servo contract (projection, grab logic,
force arrows, HUD assembly, canonical state serialization).

The pointer engages a proxy by proximity with hysteresis -- grab close,
release only once clearly away -- so an idle pointer applies nothing and
the force display shows the textbook static balance.
"""
from __future__ import annotations

import math
import struct
from typing import Optional, Sequence

from . import coriolis as co
from . import friction as fr
from . import precession as pr
from .devices import DeviceSample
from .kinematics import StepConfig, Vec3, ZERO
from .servo import Arrow, Frame, Scenario

LAUNCH_SPEED = 0.05      # m/s; first crossing counts the attempt
AXIS_RATE_CUTOFF_HZ = 20.0


class FrictionLab(Scenario):
    scenario_id = "friction"
    num_devices = 1

    GRAB_RADIUS = 0.08    # scene m
    RELEASE_RADIUS = 0.16

    def __init__(self, scene: fr.FrictionScene, step: StepConfig, workspace_scale: float = 10.0):
        self.scene = scene
        self.step = step
        self.workspace_scale = workspace_scale
        self.reset()

    def reset(self) -> None:
        self.state = fr.BlockState(0.0, 0.0, fr.Mode.STICK)
        self.grabbed = False
        self._pointer = ZERO

    def _basis(self) -> tuple[Vec3, Vec3]:
        c = math.cos(self.scene.theta)
        s = math.sin(self.scene.theta)
        return Vec3(c, s, 0.0), Vec3(-s, c, 0.0)  # along-track (up-slope), plane normal

    def project(self, index: int, sample: DeviceSample) -> tuple[Vec3, Vec3]:
        u, n = self._basis()
        k = self.workspace_scale
        pos = u * (sample.pos.x * k) + n * (sample.pos.y * k) + Vec3(0.0, 0.0, sample.pos.z * k)
        vel = u * (sample.vel.x * k) + n * (sample.vel.y * k) + Vec3(0.0, 0.0, sample.vel.z * k)
        return pos, vel

    def anchors(self, projected):
        u, _ = self._basis()
        anchor_pos = u * self.state.s
        anchor_vel = u * self.state.v
        pos, _vel = projected[0]
        self._pointer = pos
        dist = (pos - anchor_pos).norm()
        if self.grabbed:
            if dist > self.RELEASE_RADIUS:
                self.grabbed = False
        elif dist <= self.GRAB_RADIUS:
            self.grabbed = True
        return [(anchor_pos, anchor_vel) if self.grabbed else None]

    def advance(self, coupling, projected, dt: float) -> Frame:
        u, n = self._basis()
        f = coupling[0]
        applied = (f.dot(u), f.dot(n)) if self.grabbed else (0.0, 0.0)
        self.state, bd = fr.friction_step(self.scene, self.state, applied, dt, self.step.v_eps)

        block = u * self.state.s
        arrows = [
            Arrow(block, u * bd.gravity_tangential, "gravity_tangential", abs(bd.gravity_tangential)),
            Arrow(block, n * bd.normal, "normal", bd.normal),
            Arrow(block, u * bd.friction, "friction", abs(bd.friction)),
            Arrow(block, u * bd.applied_tangential, "applied", abs(bd.applied_tangential)),
        ]
        hud = {
            "gravity_tangential": abs(bd.gravity_tangential),
            "normal": bd.normal,
            "friction": abs(bd.friction),
            "applied": abs(bd.applied_tangential),
        }
        bodies = {
            "block_s": self.state.s,
            "block_pos": [block.x, block.y, block.z],
            "theta": self.scene.theta,
            "track_half_length": self.scene.track_half_length,
            "mode": self.state.mode.name.lower(),
            "pointer": [self._pointer.x, self._pointer.y, self._pointer.z],
            "grabbed": self.grabbed,
        }
        return Frame(feedback=[ZERO], bodies=bodies, arrows=arrows, hud=hud)

    def state_bytes(self) -> bytes:
        return b"friction" + struct.pack(
            "<ddBB", self.state.s, self.state.v, self.state.mode.value, self.grabbed)

    def apply_param(self, key: str, value) -> None:
        sc = self.scene
        if key == "friction.theta_deg":
            sc = fr.FrictionScene(math.radians(float(value)), sc.mu_s, sc.mu_k, sc.mass,
                                  sc.g, sc.track_half_length)
        elif key == "friction.mu_s":
            sc = fr.FrictionScene(sc.theta, float(value), sc.mu_k, sc.mass, sc.g,
                                  sc.track_half_length)
        elif key == "friction.mu_k":
            sc = fr.FrictionScene(sc.theta, sc.mu_s, float(value), sc.mass, sc.g,
                                  sc.track_half_length)
        elif key == "friction.mass_kg":
            sc = fr.FrictionScene(sc.theta, sc.mu_s, sc.mu_k, float(value), sc.g,
                                  sc.track_half_length)
        else:
            raise KeyError(f"not a live-tunable friction key: {key}")
        self.scene = sc


class CoriolisLab(Scenario):
    scenario_id = "coriolis"
    num_devices = 1

    GRAB_RADIUS = 0.06
    RELEASE_RADIUS = 0.12

    def __init__(self, scene: co.CoriolisScene, kind: co.Kind, step: StepConfig,
                 workspace_scale: float = 10.0, haptic_gain: float = 1.0):
        self.scene = scene
        self.kind = kind
        self.step = step
        self.workspace_scale = workspace_scale
        self.haptic_gain = haptic_gain
        self.attempts = 0
        self.goals = 0
        self.reset()

    def reset(self) -> None:
        """Re-rack the puck for a new round; the running score is kept."""
        self.state = co.PuckState(self.kind, ZERO, ZERO)
        self.outcome = co.Outcome.IN_PLAY
        self.launched = False
        self.grabbed = False
        self._pointer = ZERO

    def project(self, index: int, sample: DeviceSample) -> tuple[Vec3, Vec3]:
        k = self.workspace_scale
        return (Vec3(sample.pos.x * k, sample.pos.y * k, 0.0),
                Vec3(sample.vel.x * k, sample.vel.y * k, 0.0))

    def anchors(self, projected):
        pos, _ = projected[0]
        self._pointer = pos
        dist = (pos - self.state.pos).norm()
        if self.grabbed:
            if dist > self.RELEASE_RADIUS:
                self.grabbed = False
        elif dist <= self.GRAB_RADIUS:
            self.grabbed = True
        if self.outcome is not co.Outcome.IN_PLAY:
            return [None]
        return [(self.state.pos, self.state.vel) if self.grabbed else None]

    def advance(self, coupling, projected, dt: float) -> Frame:
        applied = Vec3(coupling[0].x, coupling[0].y, 0.0) if self.grabbed else ZERO
        omega_vec = Vec3(0.0, 0.0, self.scene.omega)

        if self.outcome is co.Outcome.IN_PLAY:
            if self.kind is co.Kind.BALL:
                self.state = co.step_ball(self.scene, self.state, applied, dt)
            else:
                self.state = co.step_glider(self.scene, self.state, applied, dt)
            if not self.launched and self.state.vel.norm() > LAUNCH_SPEED:
                self.launched = True
                self.attempts += 1
            if self.launched:
                outcome = co.goal_check(self.state, self.scene.goal, self.scene.platform_radius)
                if outcome is not co.Outcome.IN_PLAY:
                    self.outcome = outcome
                    if outcome is co.Outcome.SCORED:
                        self.goals += 1

        deflection = ZERO
        if self.kind is co.Kind.BALL:
            deflection = co.coriolis_force(self.scene.puck_mass, omega_vec, self.state.vel)
        feedback = deflection * self.haptic_gain

        arrows = [
            Arrow(self.state.pos, applied, "applied", applied.norm()),
            Arrow(self.state.pos, deflection, "deflection", deflection.norm()),
        ]
        if self.scene.centrifugal_enabled:
            w2 = self.scene.omega * self.scene.omega
            cf = Vec3(self.state.pos.x, self.state.pos.y, 0.0) * (self.scene.puck_mass * w2)
            arrows.append(Arrow(self.state.pos, cf, "centrifugal", cf.norm()))
        hud = {
            "speed": self.state.vel.norm(),
            "deflection": deflection.norm(),
            "platform_omega": self.scene.omega,
        }
        bodies = {
            "puck": [self.state.pos.x, self.state.pos.y, self.state.pos.z],
            "vel": [self.state.vel.x, self.state.vel.y, self.state.vel.z],
            "kind": self.kind.name.lower(),
            "platform_radius": self.scene.platform_radius,
            "goal_center": [self.scene.goal.center.x, self.scene.goal.center.y, 0.0],
            "goal_radius": self.scene.goal.radius,
            "outcome": self.outcome.name.lower(),
            "attempts": self.attempts,
            "pointer": [self._pointer.x, self._pointer.y, self._pointer.z],
            "grabbed": self.grabbed,
        }
        return Frame(feedback=[feedback], bodies=bodies, arrows=arrows, hud=hud,
                     score=self.goals)

    def state_bytes(self) -> bytes:
        return b"coriolis" + struct.pack(
            "<ddddBBBqq",
            self.state.pos.x, self.state.pos.y,
            self.state.vel.x, self.state.vel.y,
            self.kind.value, self.outcome.value,
            (self.launched << 1) | self.grabbed,
            self.attempts, self.goals,
        )

    def apply_param(self, key: str, value) -> None:
        sc = self.scene
        if key == "coriolis.omega":
            sc = co.CoriolisScene(float(value), sc.platform_radius, sc.goal, sc.puck_mass,
                                  sc.ground_drag, sc.centrifugal_enabled)
        elif key == "coriolis.drag":
            sc = co.CoriolisScene(sc.omega, sc.platform_radius, sc.goal, sc.puck_mass,
                                  float(value), sc.centrifugal_enabled)
        elif key == "coriolis.centrifugal":
            sc = co.CoriolisScene(sc.omega, sc.platform_radius, sc.goal, sc.puck_mass,
                                  sc.ground_drag, bool(value))
        elif key == "coriolis.haptic_gain":
            self.haptic_gain = float(value)
            return
        else:
            raise KeyError(f"not a live-tunable coriolis key: {key}")
        self.scene = sc


class PrecessionLab(Scenario):
    scenario_id = "precession"
    num_devices = 2

    def __init__(self, config: pr.GyroConfig, spin_rate: float, step: StepConfig,
                 workspace_scale: float = 2.5):
        self.config = config
        self.step = step
        self.workspace_scale = workspace_scale  # applied by the dual rig, kept for reference
        self._initial_spin = spin_rate
        self.reset()

    def reset(self) -> None:
        self.state = pr.GyroState(Vec3(1.0, 0.0, 0.0), self._initial_spin)
        self._axis_vel = ZERO          # d(axis)/dt from the last step, for anchor damping
        self._user_rate = ZERO         # filtered user-imposed axis rotation rate
        self._prev_u: Optional[Vec3] = None
        self.free_rod = False

    def project(self, index: int, sample: DeviceSample) -> tuple[Vec3, Vec3]:
        # the dual rig already produces shared-world-frame samples
        return sample.pos, sample.vel

    def anchors(self, projected):
        d = self.config.handle_half_length
        a = self.state.axis
        left = (a * -d, self._axis_vel * -d)
        right = (a * d, self._axis_vel * d)
        return [left, right]

    def _estimate_user_rate(self, projected, dt: float) -> None:
        span = projected[1][0] - projected[0][0]
        n = span.norm()
        if n < 1e-9:
            return
        u = span * (1.0 / n)
        if self._prev_u is not None:
            du = u - self._prev_u
            raw = self._prev_u.cross(du) * (1.0 / dt)
            rc = 1.0 / (2.0 * math.pi * AXIS_RATE_CUTOFF_HZ)
            alpha = dt / (dt + rc)
            self._user_rate = self._user_rate + (raw - self._user_rate) * alpha
        self._prev_u = u

    def advance(self, coupling, projected, dt: float) -> Frame:
        pair = pr.HandleForcePair(left=coupling[0], right=coupling[1])
        prev_axis = self.state.axis
        self.state, self.free_rod = pr.gyro_step(self.config, self.state, pair, dt)
        self._axis_vel = (self.state.axis - prev_axis) * (1.0 / dt)
        self._estimate_user_rate(projected, dt)

        reaction = pr.handle_reaction(self.config, self.state, self._user_rate)
        tau = pr.handles_to_torque(pair.left, pair.right,
                                   self.config.handle_half_length, self.state.axis)
        tau_perp = pr.perpendicular_torque(tau, self.state.axis)
        l_vec = pr.angular_momentum(self.config, self.state)
        l_mag = l_vec.norm()
        rate = tau_perp.norm() / l_mag if l_mag > 0.0 else 0.0

        d = self.config.handle_half_length
        left_pos = self.state.axis * -d
        right_pos = self.state.axis * d
        arrows = [
            Arrow(left_pos, pair.left, "left_hand", pair.left.norm()),
            Arrow(right_pos, pair.right, "right_hand", pair.right.norm()),
            Arrow(ZERO, tau_perp, "torque", tau_perp.norm()),
        ]
        hud = {
            "spin_rate": self.state.spin_rate,
            "angular_momentum": l_mag,
            "torque": tau_perp.norm(),
            "precession_rate": rate,
        }
        bodies = {
            "axis": [self.state.axis.x, self.state.axis.y, self.state.axis.z],
            "wheel_radius": self.config.wheel_radius,
            "handle_half_length": d,
            "handle_left": [left_pos.x, left_pos.y, left_pos.z],
            "handle_right": [right_pos.x, right_pos.y, right_pos.z],
            "pointer_left": [projected[0][0].x, projected[0][0].y, projected[0][0].z],
            "pointer_right": [projected[1][0].x, projected[1][0].y, projected[1][0].z],
        }
        return Frame(feedback=[reaction.left, reaction.right], bodies=bodies,
                     arrows=arrows, hud=hud, flags={"free_rod": self.free_rod})

    def state_bytes(self) -> bytes:
        pu = self._prev_u if self._prev_u is not None else ZERO
        return b"precession" + struct.pack(
            "<dddddddddd",
            self.state.axis.x, self.state.axis.y, self.state.axis.z,
            self.state.spin_rate,
            self._user_rate.x, self._user_rate.y, self._user_rate.z,
            pu.x, pu.y, pu.z,
        )

    def apply_param(self, key: str, value) -> None:
        c = self.config
        if key == "precession.spin_rate":
            v = float(value)
            if not (0.0 <= v <= pr.SPIN_RATE_MAX):
                raise ValueError(f"spin_rate must be in [0, {pr.SPIN_RATE_MAX}]")
            self.state = pr.GyroState(self.state.axis, v)
            return
        if key == "precession.wheel_mass_kg":
            c = pr.GyroConfig(float(value), c.wheel_radius, c.handle_half_length)
        elif key == "precession.wheel_radius_m":
            c = pr.GyroConfig(c.wheel_mass, float(value), c.handle_half_length)
        elif key == "precession.handle_half_len_m":
            c = pr.GyroConfig(c.wheel_mass, c.wheel_radius, float(value))
        else:
            raise KeyError(f"not a live-tunable precession key: {key}")
        self.config = c


def build_scenario(cfg) -> Scenario:
    """Construct the active lab from a validated configuration."""
    step = cfg.step_config()
    name = cfg["scenario"]
    if name == "friction":
        scene = fr.FrictionScene(
            theta=math.radians(cfg["friction.theta_deg"]),
            mu_s=cfg["friction.mu_s"],
            mu_k=cfg["friction.mu_k"],
            mass=cfg["friction.mass_kg"],
            track_half_length=cfg["friction.track_len_m"] / 2.0,
        )
        return FrictionLab(scene, step, workspace_scale=cfg.workspace_scale())
    if name == "coriolis":
        r = cfg["coriolis.platform_radius_m"]
        ang = math.radians(cfg["coriolis.goal_angle_deg"])
        gr = cfg["coriolis.goal_radius_m"]
        goal = co.Goal(center=Vec3((r - gr) * math.cos(ang), (r - gr) * math.sin(ang), 0.0),
                       radius=gr)
        scene = co.CoriolisScene(
            omega=cfg["coriolis.omega"],
            platform_radius=r,
            goal=goal,
            puck_mass=cfg["coriolis.puck_mass_kg"],
            ground_drag=cfg["coriolis.drag"],
            centrifugal_enabled=cfg["coriolis.centrifugal"],
        )
        kind = co.Kind.BALL if cfg["coriolis.variant"] == "ball" else co.Kind.GLIDER
        return CoriolisLab(scene, kind, step, workspace_scale=cfg.workspace_scale(),
                           haptic_gain=cfg["coriolis.haptic_gain"])
    if name == "precession":
        gc = pr.GyroConfig(
            wheel_mass=cfg["precession.wheel_mass_kg"],
            wheel_radius=cfg["precession.wheel_radius_m"],
            handle_half_length=cfg["precession.handle_half_len_m"],
        )
        return PrecessionLab(gc, spin_rate=cfg["precession.spin_rate"], step=step,
                             workspace_scale=cfg.workspace_scale())
    raise ValueError(f"unknown scenario {name!r}")
