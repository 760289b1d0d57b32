"""Process entry points: the WebSocket snapshot service and the headless runner.

Three roles, three owners: the servo thread owns physics, the asyncio side
owns sockets, an optional writer owns the log. They talk through a
latest-wins pointer mailbox, a bounded snapshot deque (drop-oldest) and an
event queue drained at tick boundaries -- the servo thread never blocks on
network or disk.
"""
from __future__ import annotations

import asyncio
import collections
import contextlib
import datetime
import json
import queue
import threading
from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .devices import (DeviceDescriptor, DualRig, NetworkPointerDevice, ReplayDevice,
                      ScriptedDevice, SingleRig, parse_script)
from .kinematics import Vec3
from .labconfig import LIVE_TUNABLE, REGISTRY, ConfigError, LabConfig
from .scenarios import build_scenario
from .servo import ServoLoop, snapshot_to_dict
from .session import ReplayRig, SessionHeader, SessionWriter, replay as load_session, state_hash


class ProtocolError(ValueError):
    pass


def parse_client_message(text: str) -> dict:
    """Decode and shape-check one client frame; raises ProtocolError on garbage."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(msg, dict) or "type" not in msg:
        raise ProtocolError("frame must be an object with a 'type' field")
    kind = msg["type"]
    if kind == "pointer":
        pos = msg.get("pos")
        if (not isinstance(pos, list) or len(pos) != 3
                or not all(isinstance(c, (int, float)) for c in pos)):
            raise ProtocolError("pointer.pos must be [x, y, z]")
        device = msg.get("device", 0)
        if device not in (0, 1):
            raise ProtocolError("pointer.device must be 0 or 1")
        return {"type": "pointer", "pos": [float(c) for c in pos], "device": device}
    if kind == "param":
        if not isinstance(msg.get("name"), str) or "value" not in msg:
            raise ProtocolError("param needs 'name' and 'value'")
        return {"type": "param", "name": msg["name"], "value": msg["value"]}
    if kind == "scenario":
        if not isinstance(msg.get("name"), str):
            raise ProtocolError("scenario needs 'name'")
        return {"type": "scenario", "name": msg["name"], "variant": msg.get("variant")}
    if kind == "reset":
        return {"type": "reset"}
    raise ProtocolError(f"unknown message type {kind!r}")


def _build_rig(cfg: LabConfig, scenario, make_device):
    descriptor = DeviceDescriptor(
        workspace_half_extent=cfg["device.workspace_half_extent_m"],
        max_force_n=cfg["clamp.max_force_n"],
    )
    if scenario.num_devices == 2:
        return DualRig(make_device(descriptor, 0), make_device(descriptor, 1),
                       handle_half_length=cfg["precession.handle_half_len_m"],
                       scale=cfg.workspace_scale())
    return SingleRig(make_device(descriptor, 0))


class LabRuntime:
    """Owns the servo thread and everything the socket layer shares with it."""

    def __init__(self, config: LabConfig, record_path: Optional[str] = None):
        self.config = config
        self.record_path = record_path
        self.snapshots = collections.deque(maxlen=8)   # drop-oldest on overflow
        self.events: queue.Queue = queue.Queue()
        self.pointers: list[NetworkPointerDevice] = []
        self._thread: Optional[threading.Thread] = None
        self._stop = threading.Event()
        self._writer: Optional[SessionWriter] = None
        self._segment = 0
        self._lock = threading.Lock()

    # -- servo side ---------------------------------------------------------

    def _drain_events(self, _k: int) -> list:
        out = []
        while True:
            try:
                out.append(self.events.get_nowait())
            except queue.Empty:
                return out

    def _make_loop(self) -> ServoLoop:
        scenario = build_scenario(self.config)
        self.pointers = []

        def make_device(descriptor, index):
            dev = NetworkPointerDevice(descriptor)
            self.pointers.append(dev)
            return dev

        rig = _build_rig(self.config, scenario, make_device)
        self._writer = None
        if self.record_path:
            path = self.record_path if self._segment == 0 else (
                f"{self.record_path}.seg{self._segment}")
            self._writer = SessionWriter(path, SessionHeader(
                scenario=self.config.scenario, dt=self.config.dt,
                config=self.config.to_flat(),
                created=datetime.datetime.now(datetime.timezone.utc).isoformat()))
        return ServoLoop(
            scenario, rig,
            params=self.config.coupling_params(),
            step=self.config.step_config(),
            clamp_max_n=self.config["clamp.max_force_n"],
            snapshot_rate_hz=self.config["snapshot.rate_hz"],
            recorder=self._writer,
            snapshot_sink=self._publish_snapshot,
            command_source=self._drain_events,
        )

    def _publish_snapshot(self, snap) -> None:
        d = snapshot_to_dict(snap)
        d["seg"] = self._segment  # lets the broadcaster tell a restart from a stale frame
        self.snapshots.append(d)

    def start(self) -> None:
        loop = self._make_loop()
        self._stop.clear()

        def run():
            try:
                loop.run_realtime(stop=self._stop.is_set)
            finally:
                if self._writer is not None:
                    self._writer.close()

        self._thread = threading.Thread(target=run, name="servo", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    # -- socket side --------------------------------------------------------

    def push_pointer(self, device: int, pos: list[float]) -> None:
        if device < len(self.pointers):
            self.pointers[device].push(Vec3(pos[0], pos[1], pos[2]))

    def apply_param(self, name: str, value) -> None:
        """Validate against the registry, then hand to the servo at a tick boundary."""
        if name not in LIVE_TUNABLE:
            raise ConfigError([f"{name}: not a live-tunable key"])
        coerced = REGISTRY[name].coerce(value)
        new_cfg = self.config.with_value(name, coerced)   # raises ConfigError
        self.config = new_cfg
        self.events.put({"op": "param", "key": name, "value": coerced})

    def request_reset(self) -> None:
        self.events.put({"op": "reset"})

    def switch_scenario(self, name: str, variant: Optional[str]) -> None:
        """Swap labs: restart the servo thread and begin a new log segment."""
        overrides = {"scenario": name}
        if variant is not None:
            overrides["coriolis.variant"] = variant
        new_cfg = self.config
        for k, v in overrides.items():
            new_cfg = new_cfg.with_value(k, v)
        with self._lock:
            self.stop()
            self.config = new_cfg
            self._segment += 1
            self.snapshots.clear()
            self.start()


def create_app(runtime: LabRuntime, ui_dir: Optional[str] = None) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        broadcaster = asyncio.create_task(_broadcast(app))
        yield
        broadcaster.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await broadcaster
        runtime.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.runtime = runtime
    app.state.clients = set()

    async def _broadcast(app: FastAPI):
        last = (-1, -1.0)  # (segment, t); t strictly increases within a segment
        poll = 0.5 / runtime.config["snapshot.rate_hz"]
        while True:
            await asyncio.sleep(poll)
            while runtime.snapshots:
                snap = runtime.snapshots.popleft()
                key = (snap["seg"], snap["t"])
                if key[0] == last[0] and key[1] <= last[1]:
                    continue
                last = key
                dead = []
                for ws in app.state.clients:
                    try:
                        await ws.send_text(json.dumps(snap))
                    except Exception:
                        dead.append(ws)
                for ws in dead:
                    app.state.clients.discard(ws)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        app.state.clients.add(ws)
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = parse_client_message(text)
                except ProtocolError as exc:
                    await ws.send_text(json.dumps(
                        {"v": 1, "type": "error", "reason": str(exc)}))
                    await ws.close(code=1008)
                    return
                await _dispatch(ws, msg)
        except WebSocketDisconnect:
            pass
        finally:
            app.state.clients.discard(ws)

    async def _dispatch(ws: WebSocket, msg: dict):
        kind = msg["type"]
        if kind == "pointer":
            runtime.push_pointer(msg["device"], msg["pos"])
            return
        try:
            if kind == "param":
                runtime.apply_param(msg["name"], msg["value"])
            elif kind == "reset":
                runtime.request_reset()
            elif kind == "scenario":
                runtime.switch_scenario(msg["name"], msg.get("variant"))
        except (ConfigError, ValueError) as exc:
            await ws.send_text(json.dumps(
                {"v": 1, "type": "reject", "of": kind, "reason": str(exc)}))
            return
        await ws.send_text(json.dumps({"v": 1, "type": "ack", "of": kind}))

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve(config: LabConfig, record_path: Optional[str] = None,
          ui_dir: Optional[str] = None) -> None:
    """Run the realtime service until interrupted."""
    import uvicorn

    runtime = LabRuntime(config, record_path=record_path)
    app = create_app(runtime, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")


# -- headless ---------------------------------------------------------------

@dataclass
class HeadlessReport:
    ticks: int
    end_reason: str
    final_hash: str
    record_path: Optional[str] = None


def _scripted_rig(cfg: LabConfig, scenario, script_path: str):
    with open(script_path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    descriptor = DeviceDescriptor(
        workspace_half_extent=cfg["device.workspace_half_extent_m"],
        max_force_n=cfg["clamp.max_force_n"])
    if scenario.num_devices == 2:
        if isinstance(data, dict) and "left" in data and "right" in data:
            left = ScriptedDevice(descriptor, parse_script(data["left"]))
            right = ScriptedDevice(descriptor, parse_script(data["right"]))
        else:
            wp = parse_script(data)
            left = ScriptedDevice(descriptor, wp)
            right = ScriptedDevice(descriptor, wp)
        return DualRig(left, right, handle_half_length=cfg["precession.handle_half_len_m"],
                       scale=cfg.workspace_scale())
    return SingleRig(ScriptedDevice(descriptor, parse_script(data)))


def _replay_rig(cfg: LabConfig, scenario, log_path: str):
    _header, records = load_session(log_path)
    descriptor = DeviceDescriptor(
        workspace_half_extent=cfg["device.workspace_half_extent_m"],
        max_force_n=cfg["clamp.max_force_n"])
    streams = [[rec.samples[i] for rec in records] for i in range(scenario.num_devices)]
    if scenario.num_devices == 2:
        return ReplayRig([ReplayDevice(descriptor, s) for s in streams])
    return SingleRig(ReplayDevice(descriptor, streams[0]))


def run_headless(config: LabConfig, script_path: Optional[str], ticks: int,
                 record_path: Optional[str] = None,
                 replay_path: Optional[str] = None) -> HeadlessReport:
    """Simulated-time run for CI and batch work: exact tick count, no wall clock."""
    scenario = build_scenario(config)
    if replay_path is not None:
        rig = _replay_rig(config, scenario, replay_path)
    elif script_path is not None:
        rig = _scripted_rig(config, scenario, script_path)
    else:
        raise ValueError("headless run needs a script or a replay source")

    writer = None
    if record_path:
        writer = SessionWriter(record_path, SessionHeader(
            scenario=config.scenario, dt=config.dt, config=config.to_flat(),
            created=datetime.datetime.now(datetime.timezone.utc).isoformat()))
    loop = ServoLoop(
        scenario, rig,
        params=config.coupling_params(),
        step=config.step_config(),
        clamp_max_n=config["clamp.max_force_n"],
        snapshot_rate_hz=config["snapshot.rate_hz"],
        recorder=writer,
    )
    try:
        summary = loop.run_simulated(ticks)
    finally:
        if writer is not None:
            writer.close()
    return HeadlessReport(
        ticks=summary.ticks,
        end_reason=summary.end_reason,
        final_hash=state_hash(scenario.state_bytes()),
        record_path=record_path,
    )
