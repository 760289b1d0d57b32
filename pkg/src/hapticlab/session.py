"""Append-only session logs (.lablog), replay, and the determinism verifier.

One header line then one tick record per line, UTF-8 JSON. Floats go
through Python's shortest round-trip repr so every value is recovered
bit-exactly; the 64-bit state hash is taken over a canonical little-endian
byte serialization, never over in-memory layout, so it is platform-stable.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .devices import DeviceDescriptor, DeviceSample, ForceCommand, ReplayDevice, SingleRig
from .kinematics import Vec3

FORMAT_VERSION = 1
FLUSH_EVERY = 256


class SessionFormatError(ValueError):
    """Log file is unreadable: bad header, bad version, or truncated record."""


class SessionIntegrityError(ValueError):
    """Tick indices are not contiguous."""


def state_hash(state: bytes) -> str:
    """64-bit hash of the canonical state bytes, as 16 hex chars."""
    return hashlib.blake2b(state, digest_size=8).hexdigest()


@dataclass(frozen=True)
class SessionHeader:
    scenario: str
    dt: float
    config: dict                 # flat key-path -> value; sufficient to re-create the run
    version: int = FORMAT_VERSION
    created: str = ""            # metadata only, never consumed by physics

    def to_json(self) -> str:
        return json.dumps({
            "format": "lablog", "v": self.version, "scenario": self.scenario,
            "dt": self.dt, "config": self.config, "created": self.created,
        })


@dataclass
class TickRecord:
    tick: int
    samples: list                 # DeviceSample per device
    forces: list                  # commanded Vec3 per device
    state_hash: str
    snapshot: Optional[dict] = None
    events: list = field(default_factory=list)

    def to_json(self) -> str:
        rec = {
            "k": self.tick,
            "s": [[s.t, s.pos.x, s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z,
                   1 if s.button else 0] for s in self.samples],
            "f": [[f.x, f.y, f.z] for f in self.forces],
            "h": self.state_hash,
        }
        if self.events:
            rec["e"] = self.events
        if self.snapshot is not None:
            rec["snap"] = self.snapshot
        return json.dumps(rec)

    @staticmethod
    def from_dict(d: dict) -> "TickRecord":
        samples = [DeviceSample(t=s[0], pos=Vec3(s[1], s[2], s[3]),
                                vel=Vec3(s[4], s[5], s[6]), button=bool(s[7]))
                   for s in d["s"]]
        forces = [Vec3(*f) for f in d["f"]]
        return TickRecord(tick=d["k"], samples=samples, forces=forces,
                          state_hash=d["h"], snapshot=d.get("snap"),
                          events=d.get("e", []))


class SessionWriter:
    """Single-writer append log; flushes at least every FLUSH_EVERY records."""

    def __init__(self, path: str, header: SessionHeader):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8")
        self._fh.write(header.to_json() + "\n")
        self._last_tick = -1
        self._since_flush = 0

    def append(self, record: TickRecord) -> None:
        if record.tick != self._last_tick + 1:
            raise SessionIntegrityError(
                f"tick {record.tick} does not follow {self._last_tick}")
        self._fh.write(record.to_json() + "\n")
        self._last_tick = record.tick
        self._since_flush += 1
        if self._since_flush >= FLUSH_EVERY:
            self._fh.flush()
            self._since_flush = 0

    def append_tick(self, tick: int, samples, forces, state: bytes,
                    snapshot=None, events=None) -> None:
        """Servo-loop recorder hook: hashes the state and appends."""
        self.append(TickRecord(tick=tick, samples=list(samples), forces=list(forces),
                               state_hash=state_hash(state), snapshot=snapshot,
                               events=events or []))

    def close(self) -> None:
        self._fh.flush()
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_header(path: str) -> SessionHeader:
    with open(path, "r", encoding="utf-8") as fh:
        line = fh.readline()
    if not line.strip():
        raise SessionFormatError(f"{path}: empty file, no header")
    try:
        d = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SessionFormatError(f"{path}: unreadable header: {exc}") from exc
    if d.get("format") != "lablog":
        raise SessionFormatError(f"{path}: not a lablog file")
    if d.get("v") != FORMAT_VERSION:
        raise SessionFormatError(
            f"{path}: unsupported format version {d.get('v')} (supported: {FORMAT_VERSION})")
    return SessionHeader(scenario=d["scenario"], dt=d["dt"], config=d["config"],
                         version=d["v"], created=d.get("created", ""))


def iter_ticks(path: str) -> Iterator[TickRecord]:
    """Yield tick records in order; raises naming the last complete tick on truncation."""
    with open(path, "r", encoding="utf-8") as fh:
        fh.readline()  # header, validated by read_header
        last = -1
        for line in fh:
            if not line.strip():
                continue
            try:
                rec = TickRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
                raise SessionFormatError(
                    f"{path}: truncated or corrupt record after tick {last}: {exc}") from exc
            if rec.tick != last + 1:
                raise SessionIntegrityError(
                    f"{path}: tick {rec.tick} does not follow {last}")
            last = rec.tick
            yield rec


def replay(path: str) -> tuple[SessionHeader, list[TickRecord]]:
    """Load a full session: recorded samples in order plus the expected hash stream."""
    header = read_header(path)
    return header, list(iter_ticks(path))


@dataclass(frozen=True)
class VerifyReport:
    match: bool
    first_divergent_tick: Optional[int]
    ticks_checked: int


def verify_replay(path: str) -> VerifyReport:
    """Re-run the scenario from the header config against the recorded samples
    and compare state hashes tick by tick."""
    from .labconfig import LabConfig
    from .scenarios import build_scenario
    from .servo import ServoLoop

    header = read_header(path)
    records = list(iter_ticks(path))
    cfg = LabConfig.from_flat(header.config)
    scenario = build_scenario(cfg)

    n_dev = scenario.num_devices
    descriptor = DeviceDescriptor(workspace_half_extent=cfg["device.workspace_half_extent_m"],
                                  max_force_n=cfg["clamp.max_force_n"])
    streams = [[rec.samples[i] for rec in records] for i in range(n_dev)]
    # recorded samples are already in the rig's shared frame; replay bypasses mounting
    if n_dev == 1:
        rig = SingleRig(ReplayDevice(descriptor, streams[0]))
    else:
        rig = ReplayRig([ReplayDevice(descriptor, s) for s in streams])

    events_by_tick = {rec.tick: rec.events for rec in records if rec.events}
    divergence: list[int] = []

    def compare(k: int, scn) -> bool:
        if state_hash(scn.state_bytes()) != records[k].state_hash:
            divergence.append(k)
            return False
        return True

    loop = ServoLoop(
        scenario, rig,
        params=cfg.coupling_params(),
        step=cfg.step_config(),
        clamp_max_n=cfg["clamp.max_force_n"],
        snapshot_rate_hz=cfg["snapshot.rate_hz"],
        command_source=lambda k: events_by_tick.get(k, []),
        after_tick=compare,
    )
    summary = loop.run_simulated(len(records))
    if divergence:
        return VerifyReport(match=False, first_divergent_tick=divergence[0],
                            ticks_checked=divergence[0] + 1)
    return VerifyReport(match=True, first_divergent_tick=None, ticks_checked=summary.ticks)


class ReplayRig:
    """Replay-side stand-in for DualRig: recorded samples are already world-frame."""

    def __init__(self, devices):
        self._devices = devices

    @property
    def devices(self):
        return self._devices

    def sample(self, t: float):
        out = []
        for d in self._devices:
            s = d.sample(t)
            if s is None:
                return None
            out.append(s)
        return out

    def command(self, forces):
        ok = True
        for d, f in zip(self._devices, forces):
            ok = d.command_force(ForceCommand(f)) and ok
        return ok
