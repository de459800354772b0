"""Live teleoperation service.

One background task owns the simulation and steps it on the wall clock;
websocket clients talk JSON text frames. The first connection gets the
operator role (and with it the only command channel); later connections
observe telemetry. Observer queues are lossy so a slow reader can never
stall the tick loop.
"""
from __future__ import annotations

import asyncio
import contextlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from . import __version__
from .channel import ProtocolError
from .cli import config_to_dict
from .engine import SimConfig, SimEvent, Simulation, TelemetrySnapshot

OBSERVER_QUEUE_LIMIT = 32

COMMAND_TYPES = {"key_down", "key_up", "dial", "hangup", "configure"}


@dataclass
class _Client:
    """Outbound state for one connection.

    Control traffic (hello / error / config) is never dropped. Telemetry
    rides a bounded deque for observers, so a slow reader sheds the oldest
    frames instead of stalling anyone; the operator's deque is unbounded
    (lossless).
    """

    ws: WebSocket
    role: str
    control: deque = field(default_factory=deque)
    telemetry: deque = field(default_factory=deque)
    wake: asyncio.Event = field(default_factory=asyncio.Event)
    seq: int = 0
    last_client_seq: Optional[int] = None

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def push_control(self, payload: dict) -> None:
        self.control.append(payload)
        self.wake.set()

    def push_telemetry(self, payload: dict) -> None:
        if self.role == "observer" and len(self.telemetry) >= OBSERVER_QUEUE_LIMIT:
            self.telemetry.popleft()
        self.telemetry.append(payload)
        self.wake.set()

    def pop(self) -> Optional[dict]:
        # seq is stamped at send time so the wire order stays monotonic
        if self.control:
            return {**self.control.popleft(), "seq": self.next_seq()}
        if self.telemetry:
            return {**self.telemetry.popleft(), "seq": self.next_seq()}
        return None


class Hub:
    """Shared state: the simulation, its command queue, and the clients."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.sim = Simulation(config, start_connected=True)
        self.commands: asyncio.Queue[tuple[_Client, dict]] = asyncio.Queue()
        self.clients: list[_Client] = []
        self.operator: Optional[_Client] = None
        self.tick_count = 0

    def attach(self, ws: WebSocket) -> _Client:
        role = "operator" if self.operator is None else "observer"
        client = _Client(ws, role)
        self.clients.append(client)
        if role == "operator":
            self.operator = client
        return client

    def detach(self, client: _Client) -> None:
        if client in self.clients:
            self.clients.remove(client)
        if self.operator is client:
            self.operator = None
            # Never leave a tone keyed by a vanished operator.
            if self.sim.held_key is not None:
                self.sim.apply_event(SimEvent("up", self.sim.time_s, self.sim.held_key))

    def hello_payload(self, client: _Client) -> dict:
        return {
            "type": "hello",
            "role": client.role,
            "version": __version__,
            "config": config_to_dict(self.config),
        }

    def telemetry_payload(self, snap: TelemetrySnapshot) -> dict:
        return {
            "type": "telemetry",
            "t": snap.t,
            "session": snap.session.value,
            "est": snap.est,
            "std_edge": snap.std_edge,
            "latched": str(snap.latched) if snap.latched is not None else None,
            "left": snap.drive.left.value,
            "right": snap.drive.right.value,
            "motion": snap.motion.value,
            "left_volts": snap.motor_volts[0],
            "right_volts": snap.motor_volts[1],
            "x": snap.pose.x,
            "y": snap.pose.y,
            "theta": snap.pose.theta,
        }

    def broadcast_telemetry(self, payload: dict) -> None:
        for client in self.clients:
            client.push_telemetry(payload)

    def broadcast_control(self, payload: dict) -> None:
        for client in self.clients:
            client.push_control(payload)

    def send_error(self, client: _Client, text: str) -> None:
        client.push_control({"type": "error", "message": text})

    def handle_command(self, client: _Client, msg: dict) -> None:
        kind = msg.get("type")
        if kind == "configure":
            from .cli import merge_config

            try:
                self.config = merge_config(self.config, msg.get("overrides") or {})
                self.sim = Simulation(self.config, start_connected=True)
            except (ValueError, TypeError) as exc:
                self.send_error(client, f"bad configure: {exc}")
                return
            self.broadcast_control(
                {"type": "config", "config": config_to_dict(self.config)}
            )
            return
        event_kind = {"key_down": "down", "key_up": "up"}.get(kind, kind)
        try:
            self.sim.apply_event(SimEvent(event_kind, self.sim.time_s, msg.get("key")))
        except (ValueError, ProtocolError) as exc:
            self.send_error(client, str(exc))

    async def engine_loop(self) -> None:
        loop = asyncio.get_running_loop()
        next_at = loop.time()
        decim = max(self.config.telemetry_decimation, 1)
        while True:
            while not self.commands.empty():
                client, msg = self.commands.get_nowait()
                self.handle_command(client, msg)
            snap = self.sim.step()
            self.tick_count += 1
            # decimate steady-state telemetry but never swallow an edge
            if self.tick_count % decim == 0 or snap.std_edge:
                self.broadcast_telemetry(self.telemetry_payload(snap))
            next_at += self.config.tick_s
            delay = next_at - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_at = loop.time()  # fell behind; resynchronize


def create_app(config: SimConfig, ui_dir: Optional[str | Path] = None) -> FastAPI:
    hub = Hub(config)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(hub.engine_loop())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="dialdrive", version=__version__, lifespan=lifespan)
    app.state.hub = hub

    @app.get("/api/health")
    def health() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "tick_s": hub.config.tick_s,
            "clients": len(hub.clients),
            "config": config_to_dict(hub.config),
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        client = hub.attach(ws)
        client.push_control(hub.hello_payload(client))

        async def writer() -> None:
            while True:
                await client.wake.wait()
                client.wake.clear()
                while (message := client.pop()) is not None:
                    await ws.send_text(json.dumps(message))

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("expected a JSON object")
                except ValueError as exc:
                    hub.send_error(client, f"malformed message: {exc}")
                    continue
                seq = msg.get("seq")
                if isinstance(seq, int):
                    if client.last_client_seq is not None and seq <= client.last_client_seq:
                        hub.send_error(client, "sequence number went backwards")
                        continue
                    client.last_client_seq = seq
                kind = msg.get("type")
                if kind == "hello":
                    client.push_control(hub.hello_payload(client))
                elif kind in COMMAND_TYPES:
                    if client.role != "operator":
                        hub.send_error(client, "observer may not command")
                    else:
                        await hub.commands.put((client, msg))
                else:
                    hub.send_error(client, f"unknown message type: {kind!r}")
        except WebSocketDisconnect:
            pass
        finally:
            writer_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await writer_task
            hub.detach(client)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def default_ui_dir() -> Optional[Path]:
    """The built browser client, when the frontend lives next to this package."""
    for base in itertools.chain(
        [Path.cwd()], Path(__file__).resolve().parents
    ):
        candidate = base / "frontend" / "dist"
        if (candidate / "index.html").is_file():
            return candidate
    return None


def serve(
    config: SimConfig,
    host: str = "127.0.0.1",
    port: int = 8765,
    ui_dir: Optional[str] = None,
) -> None:
    import uvicorn

    ui = Path(ui_dir) if ui_dir else default_ui_dir()
    app = create_app(config, ui)
    uvicorn.run(app, host=host, port=port, log_level="warning")
