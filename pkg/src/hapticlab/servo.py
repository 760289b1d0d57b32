"""Fixed-rate servo loop: virtual coupling, per-tick orchestration, snapshots.

The core state evolution is a pure function of (scenario state, input
samples); wall-clock time only ever touches scheduling and reporting, so a
recorded session replays bitwise. On a realtime overrun the step size stays
fixed and the schedule slips -- dt is physics, not a measurement.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .devices import DeviceSample
from .kinematics import StepConfig, Vec3, ZERO, clamp_force

DEFAULT_ARROW_SCALE = 0.02  # m of drawn arrow per newton, a hint for the front panel


@dataclass(frozen=True)
class CouplingParams:
    k_c: float = 400.0  # N/m
    b_c: float = 2.0    # N*s/m

    def __post_init__(self):
        if self.k_c <= 0.0 or self.b_c < 0.0:
            raise ValueError("need k_c > 0 and b_c >= 0")


def check_coupling_stability(params: CouplingParams, dt: float, m_min: float) -> None:
    """Discrete-time guard for the spring-damper under semi-implicit Euler."""
    if params.k_c * dt > 2.0 * params.b_c + 2.0 * m_min / dt:
        raise ValueError(
            f"unstable coupling: k_c*dt={params.k_c * dt:.4g} exceeds "
            f"2*b_c + 2*m_min/dt = {2.0 * params.b_c + 2.0 * m_min / dt:.4g}"
        )


def coupling_force(device_pos: Vec3, device_vel: Vec3,
                   proxy_pos: Vec3, proxy_vel: Vec3,
                   params: CouplingParams) -> Vec3:
    """Spring-damper force on the proxy; the device gets the exact negation."""
    return (device_pos - proxy_pos) * params.k_c + (device_vel - proxy_vel) * params.b_c


class Arrow(NamedTuple):
    origin: Vec3
    vec: Vec3          # newtons (or N*m for torque arrows); direction + magnitude
    label: str
    magnitude_n: float


@dataclass
class Frame:
    """What a scenario hands back after advancing one tick."""

    feedback: list          # per-device scenario-direct force terms (Vec3)
    bodies: dict
    arrows: list
    hud: dict               # label -> float, same-tick values, never smoothed
    score: Optional[int] = None
    flags: dict = field(default_factory=dict)


@dataclass
class Snapshot:
    t: float
    scenario: str
    bodies: dict
    arrows: list
    hud: dict
    score: Optional[int] = None
    flags: dict = field(default_factory=dict)
    arrow_scale: float = DEFAULT_ARROW_SCALE


@dataclass(frozen=True)
class TickReport:
    index: int
    compute_s: float
    overrun: bool = False

    def __post_init__(self):
        if self.compute_s < 0.0:
            raise ValueError("compute time cannot be negative")


class Scenario:
    """Contract every lab implements; called only from the servo thread."""

    scenario_id: str = "abstract"
    num_devices: int = 1
    workspace_scale: float = 1.0
    error: Optional[str] = None

    def reset(self) -> None:
        raise NotImplementedError

    def project(self, index: int, sample: DeviceSample) -> tuple[Vec3, Vec3]:
        """Map a device-frame sample into scene coordinates."""
        return sample.pos * self.workspace_scale, sample.vel * self.workspace_scale

    def anchors(self, projected: Sequence[tuple[Vec3, Vec3]]):
        """Per-device coupling anchor (pos, vel), or None while disengaged."""
        raise NotImplementedError

    def advance(self, coupling: Sequence[Vec3], projected: Sequence[tuple[Vec3, Vec3]],
                dt: float) -> Frame:
        raise NotImplementedError

    def state_bytes(self) -> bytes:
        """Canonical little-endian serialization of the evolving state."""
        raise NotImplementedError

    def apply_param(self, key: str, value) -> None:
        raise NotImplementedError


def tick(scenario: Scenario, samples: Sequence[DeviceSample], t: float, dt: float,
         params: CouplingParams, clamp_max_n: float) -> tuple[list[Vec3], Snapshot]:
    """One servo tick: project, couple, advance, negate + clamp, snapshot."""
    n = scenario.num_devices
    if scenario.error is not None:
        snap = Snapshot(t=t, scenario=scenario.scenario_id, bodies={}, arrows=[],
                        hud={}, flags={"error": scenario.error})
        return [ZERO] * n, snap

    projected = [scenario.project(i, s) for i, s in enumerate(samples)]
    anchors = scenario.anchors(projected)
    forces = []
    for (pos, vel), anchor in zip(projected, anchors):
        if anchor is None:
            forces.append(ZERO)
        else:
            forces.append(coupling_force(pos, vel, anchor[0], anchor[1], params))

    frame = scenario.advance(forces, projected, dt)

    cmds = []
    for i in range(n):
        cmds.append(clamp_force(frame.feedback[i] - forces[i], clamp_max_n))

    snap = Snapshot(t=t, scenario=scenario.scenario_id, bodies=frame.bodies,
                    arrows=frame.arrows, hud=frame.hud, score=frame.score,
                    flags=frame.flags)
    return cmds, snap


def snapshot_to_dict(snap: Snapshot) -> dict:
    """JSON-ready form; also the wire schema of the snapshot stream."""
    return {
        "v": 1,
        "type": "snapshot",
        "t": snap.t,
        "scenario": snap.scenario,
        "bodies": snap.bodies,
        "arrows": [
            {
                "origin": [a.origin.x, a.origin.y, a.origin.z],
                "vec": [a.vec.x, a.vec.y, a.vec.z],
                "label": a.label,
                "magnitude_n": a.magnitude_n,
            }
            for a in snap.arrows
        ],
        "hud": snap.hud,
        "score": snap.score,
        "flags": snap.flags,
        "arrow_scale": snap.arrow_scale,
    }


@dataclass
class LoopSummary:
    ticks: int
    end_reason: str               # "completed" | "input_exhausted" | "stopped"
    overruns: int = 0
    reports: Optional[list] = None


class ServoLoop:
    """Owns a scenario and its input rig; everything else talks through queues.

    command_source(k) returns the control events to apply at the start of
    tick k (live: drained mailbox; replay: the recorded events for k).
    """

    def __init__(
        self,
        scenario: Scenario,
        rig,
        params: CouplingParams,
        step: StepConfig,
        clamp_max_n: float = 8.0,
        snapshot_rate_hz: float = 60.0,
        recorder=None,
        snapshot_sink: Optional[Callable[[Snapshot], None]] = None,
        command_source: Optional[Callable[[int], list]] = None,
        after_tick: Optional[Callable[[int, Scenario], bool]] = None,
    ):
        self.scenario = scenario
        self.rig = rig
        self.params = params
        self.step = step
        self.clamp_max_n = clamp_max_n
        self.recorder = recorder
        self.snapshot_sink = snapshot_sink
        self.command_source = command_source
        self.after_tick = after_tick
        self._emit_every = max(1.0, (1.0 / step.dt) / snapshot_rate_hz)  # ticks per snapshot
        self._next_emit = 0.0

    def _apply_events(self, k: int) -> list:
        if self.command_source is None:
            return []
        events = self.command_source(k)
        for ev in events:
            if ev.get("op") == "reset":
                self.scenario.reset()
            elif ev.get("op") == "param":
                self.scenario.apply_param(ev["key"], ev["value"])
        return events

    def _do_tick(self, k: int) -> bool:
        t = k * self.step.dt
        events = self._apply_events(k)
        samples = self.rig.sample(t)
        if samples is None:
            return False
        cmds, snap = tick(self.scenario, samples, t, self.step.dt,
                          self.params, self.clamp_max_n)
        self.rig.command(cmds)

        emit = k >= self._next_emit
        if emit:
            self._next_emit += self._emit_every
            if self.snapshot_sink is not None:
                self.snapshot_sink(snap)
        if self.recorder is not None:
            self.recorder.append_tick(
                tick=k, samples=samples, forces=cmds,
                state=self.scenario.state_bytes(),
                snapshot=snapshot_to_dict(snap) if emit else None,
                events=events,
            )
        if self.after_tick is not None and not self.after_tick(k, self.scenario):
            return False
        return True

    def run_simulated(self, ticks: int) -> LoopSummary:
        """Virtual clock t = k*dt; exactly `ticks` ticks unless input runs out."""
        for k in range(ticks):
            if not self._do_tick(k):
                return LoopSummary(ticks=k, end_reason="input_exhausted")
        return LoopSummary(ticks=ticks, end_reason="completed")

    def run_realtime(
        self,
        duration_s: Optional[float] = None,
        stop: Optional[Callable[[], bool]] = None,
        collect_reports: bool = False,
    ) -> LoopSummary:
        """Wall-clock pacing at the servo rate; late ticks keep dt fixed and slip."""
        dt = self.step.dt
        total = None if duration_s is None else int(round(duration_s / dt))
        reports: list[TickReport] = [] if collect_reports else None
        overruns = 0
        k = 0
        deadline = time.perf_counter()
        while total is None or k < total:
            if stop is not None and stop():
                return LoopSummary(ticks=k, end_reason="stopped", overruns=overruns,
                                   reports=reports)
            t0 = time.perf_counter()
            ok = self._do_tick(k)
            t1 = time.perf_counter()
            if not ok:
                return LoopSummary(ticks=k, end_reason="input_exhausted",
                                   overruns=overruns, reports=reports)
            deadline += dt
            now = time.perf_counter()
            late = now > deadline
            if late:
                overruns += 1
                deadline = now  # schedule slips; dt never stretches
            else:
                time.sleep(deadline - now)
            if reports is not None:
                reports.append(TickReport(index=k, compute_s=t1 - t0, overrun=late))
            k += 1
        return LoopSummary(ticks=k, end_reason="completed", overruns=overruns,
                           reports=reports)
