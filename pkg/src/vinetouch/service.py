"""Live gateway: one simulation fanned out to WebSocket clients.

A single driver task advances the session in (scaled) real time and pushes
each snapshot record to every connected client. Commands arrive from exactly
one session owner, are validated on receipt (ack or error record goes back
immediately, echoing the client's request id), and are applied by the driver
between ticks. Any number of viewers may watch; a second owner is refused.

Messages are single-line JSON records:
    snapshot  {"t", "state", "body", "pockets", "actuators", "counters"}
    command   {"req", "kind": "touch"|"pause"|"resume"|"reset"|"config", ...}
    ack       {"req", "ok": true}
    error     {"req", "error", "detail"}
"""

from __future__ import annotations

import asyncio
import contextlib
import itertools
import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .scenario import Scenario
from .session import CommandError, SimSession, serialize_snapshot, validate_command

OUTBOX_LIMIT = 4096


def _push_drop_oldest(queue: asyncio.Queue, item: str) -> None:
    while True:
        try:
            queue.put_nowait(item)
            return
        except asyncio.QueueFull:
            with contextlib.suppress(asyncio.QueueEmpty):
                queue.get_nowait()


class Gateway:
    """Session state shared between the driver task and the socket handlers."""

    def __init__(self, scenario: Scenario, seed: int | None = None, speed: float = 1.0):
        if speed <= 0:
            raise ValueError("speed must be > 0")
        self.session = SimSession(scenario, seed)
        self.speed = speed
        self.outboxes: dict[int, asyncio.Queue] = {}
        self.owner_id: int | None = None
        self.pending: list[dict] = []
        self.first_client = asyncio.Event()
        self._ids = itertools.count(1)

    def register(self, role: str) -> tuple[int, asyncio.Queue]:
        conn_id = next(self._ids)
        if role == "owner":
            if self.owner_id is not None:
                raise CommandError("OWNER_EXISTS", "session already has a command owner")
            self.owner_id = conn_id
        queue: asyncio.Queue = asyncio.Queue(maxsize=OUTBOX_LIMIT)
        self.outboxes[conn_id] = queue
        self.first_client.set()
        return conn_id, queue

    def unregister(self, conn_id: int) -> None:
        self.outboxes.pop(conn_id, None)
        if self.owner_id == conn_id:
            self.owner_id = None

    def handle_message(self, conn_id: int, text: str) -> dict:
        """Validate one inbound command; returns the ack or error record."""
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            return {"req": None, "error": "MALFORMED_COMMAND", "detail": f"invalid JSON: {exc}"}
        req = record.get("req") if isinstance(record, dict) else None
        if conn_id != self.owner_id:
            return {"req": req, "error": "NOT_OWNER", "detail": "only the session owner may send commands"}
        try:
            validate_command(record)
        except CommandError as exc:
            return {"req": req, "error": exc.code, "detail": exc.detail}
        self.pending.append(record)
        return {"req": req, "ok": True}

    def broadcast(self, text: str) -> None:
        for queue in self.outboxes.values():
            _push_drop_oldest(queue, text)

    async def drive(self) -> None:
        """Apply queued commands and tick at the configured rate, forever."""
        await self.first_client.wait()
        while True:
            while self.pending:
                record = self.pending.pop(0)
                with contextlib.suppress(CommandError):
                    self.session.apply_command(record)
            snapshot = self.session.tick()
            if snapshot is not None:
                self.broadcast(serialize_snapshot(snapshot))
            await asyncio.sleep(self.session.dt_s / self.speed)


def create_app(scenario: Scenario, seed: int | None = None, speed: float = 1.0) -> FastAPI:
    gateway = Gateway(scenario, seed=seed, speed=speed)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        driver = asyncio.create_task(gateway.drive())
        yield
        driver.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await driver

    app = FastAPI(title="vinetouch gateway", lifespan=lifespan)
    app.state.gateway = gateway

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket):
        role = socket.query_params.get("role", "viewer")
        await socket.accept()
        if role not in ("viewer", "owner"):
            await socket.send_text(
                json.dumps({"req": None, "error": "MALFORMED_COMMAND", "detail": f"unknown role {role!r}"})
            )
            await socket.close()
            return
        try:
            conn_id, queue = gateway.register(role)
        except CommandError as exc:
            await socket.send_text(
                json.dumps({"req": None, "error": exc.code, "detail": exc.detail})
            )
            await socket.close()
            return

        async def pump() -> None:
            while True:
                await socket.send_text(await queue.get())

        sender = asyncio.create_task(pump())
        try:
            while True:
                text = await socket.receive_text()
                _push_drop_oldest(queue, json.dumps(gateway.handle_message(conn_id, text)))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            gateway.unregister(conn_id)

    return app
