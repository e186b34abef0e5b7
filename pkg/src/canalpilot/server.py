"""Streaming endpoint exposing a live session over websockets, plus the
headless scripted driver used by tests and batch reproduction.

Wire protocol v1: every frame is one UTF-8 JSON text message of the
form {"kind": K, "payload": P}. On connect a client receives `hello`
then `canal`, then a `state` broadcast every tick; it may send
`command` frames which are applied at the next tick boundary. A
malformed or unknown frame earns an `error` frame and a close.
"""

import asyncio
import json
import logging
import threading
from collections import deque

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from . import session as session_mod
from .canal import CanalModel
from .errors import BindFailure, MalformedFrame
from .session import Command, SessionState

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

_COMMAND_TYPES = {"correction", "correction_end", "backtrack", "pause",
                  "resume", "set_speed", "grip"}


def wire_hello(tick_hz: float) -> dict:
    return {"kind": "hello", "payload": {"protocol_version": PROTOCOL_VERSION,
                                         "tick_hz": tick_hz}}


def wire_canal(canal: CanalModel) -> dict:
    return {"kind": "canal", "payload": canal.to_json_dict()}


def wire_state(state: SessionState, record: dict) -> dict:
    s = record["s"]
    frame = state.canal.frames[s - 1]
    return {
        "kind": "state",
        "payload": {
            "tick": record["tick"],
            "phase": record["phase"],
            "s": s,
            "d": record["d"],
            "pose": record["pose"],
            "correcting": state.correcting,
            "radius": float(state.canal.radii[s - 1]),
            "frame": {"t": frame.e_t.tolist(), "x": frame.x_axis.tolist(),
                      "y": frame.y_axis.tolist()},
        },
    }


def wire_error(code: str, detail: str) -> dict:
    return {"kind": "error", "payload": {"code": code, "detail": detail}}


def parse_command(payload) -> Command:
    """Validate a v1 command payload into a session Command."""
    if not isinstance(payload, dict):
        raise MalformedFrame("command payload must be an object")
    ctype = payload.get("type")
    if ctype not in _COMMAND_TYPES:
        raise MalformedFrame(f"unknown command type {ctype!r}")
    if ctype == "correction":
        try:
            kx = float(payload["kx"])
            ky = float(payload["ky"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFrame(f"correction needs numeric kx, ky: {exc}") from None
        kx = max(-1.0, min(1.0, kx))
        ky = max(-1.0, min(1.0, ky))
        return Command("correction", k_x=kx, k_y=ky)
    if ctype == "set_speed":
        try:
            v = int(payload["v"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFrame(f"set_speed needs integer v: {exc}") from None
        return Command("set_speed", v=v)
    return Command(ctype)


def parse_frame(raw: str) -> Command:
    """Decode one incoming text frame; only `command` frames are legal."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedFrame(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise MalformedFrame("frame must be an object with a 'kind'")
    if doc["kind"] != "command":
        raise MalformedFrame(f"unexpected frame kind {doc['kind']!r}")
    return parse_command(doc.get("payload"))


def scripted_drive(state: SessionState, script: list[tuple[int, Command]],
                   n_ticks: int) -> list[dict]:
    """Run the session headlessly, injecting commands at given ticks.

    Script tick indices are 0-based and must be non-decreasing. Returns
    the full event log (one record per tick).
    """
    ticks = [t for t, _ in script]
    if any(b < a for a, b in zip(ticks, ticks[1:])):
        raise ValueError("script ticks must be non-decreasing")
    pending = deque(script)
    for t in range(n_ticks):
        batch = []
        while pending and pending[0][0] <= t:
            batch.append(pending.popleft()[1])
        session_mod.tick(state, batch)
    return state.events


def log_to_ndjson(events: list[dict]) -> str:
    """Line-delimited JSON rendering of an event log."""
    return "".join(json.dumps(rec) + "\n" for rec in events)


class CanalServer:
    """Single-session websocket server.

    One asyncio task owns the session and drives ticks; connection
    handlers only enqueue commands and relay broadcast snapshots.
    """

    def __init__(self, state: SessionState, host: str = "127.0.0.1", port: int = 8765):
        self.state = state
        self.host = host
        self.port = port
        self.bound_port: int | None = None
        self._commands: deque[Command] = deque()
        self._clients: set = set()
        self._loop: asyncio.AbstractEventLoop | None = None
        self._stop: asyncio.Event | None = None
        self._ready = threading.Event()
        self._thread: threading.Thread | None = None

    async def _broadcast(self, message: str) -> None:
        stale = []
        for ws in self._clients:
            try:
                await ws.send(message)
            except ConnectionClosed:
                stale.append(ws)
        for ws in stale:
            self._clients.discard(ws)

    async def _tick_loop(self) -> None:
        period = 1.0 / self.state.tick_hz
        loop = asyncio.get_running_loop()
        next_at = loop.time() + period
        while not self._stop.is_set():
            await asyncio.sleep(max(0.0, next_at - loop.time()))
            next_at += period
            batch = []
            while self._commands:
                batch.append(self._commands.popleft())
            session_mod.tick(self.state, batch)
            record = self.state.events[-1]
            await self._broadcast(json.dumps(wire_state(self.state, record)))

    async def _handler(self, ws) -> None:
        await ws.send(json.dumps(wire_hello(self.state.tick_hz)))
        await ws.send(json.dumps(wire_canal(self.state.canal)))
        self._clients.add(ws)
        try:
            async for raw in ws:
                try:
                    cmd = parse_frame(raw)
                except MalformedFrame as exc:
                    logger.warning("closing client after malformed frame: %s", exc)
                    await ws.send(json.dumps(wire_error("malformed_frame", str(exc))))
                    await ws.close()
                    return
                self._commands.append(cmd)
        except ConnectionClosed:
            pass
        finally:
            self._clients.discard(ws)

    async def _run_async(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._stop = asyncio.Event()
        try:
            server = await ws_serve(self._handler, self.host, self.port)
        except OSError as exc:
            self._ready.set()
            raise BindFailure(f"cannot bind {self.host}:{self.port}: {exc}") from exc
        self.bound_port = server.sockets[0].getsockname()[1]
        self._ready.set()
        ticker = asyncio.create_task(self._tick_loop())
        try:
            await self._stop.wait()
        finally:
            ticker.cancel()
            server.close()
            await server.wait_closed()

    def run(self) -> None:
        """Serve until stop(); blocking."""
        asyncio.run(self._run_async())

    def start_background(self) -> None:
        """Serve on a daemon thread; returns once the socket is bound."""
        self._thread = threading.Thread(target=self.run, daemon=True)
        self._thread.start()
        self._ready.wait(timeout=10.0)
        if self.bound_port is None:
            raise BindFailure(f"server failed to start on {self.host}:{self.port}")

    def stop(self) -> None:
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)
        if self._thread is not None:
            self._thread.join(timeout=10.0)


def serve(state: SessionState, bind_address: str = "127.0.0.1:8765",
          tick_hz: float | None = None) -> None:
    """Run a server on host:port until interrupted."""
    if tick_hz is not None:
        state.tick_hz = tick_hz
    host, _, port_text = bind_address.rpartition(":")
    try:
        port = int(port_text)
    except ValueError:
        raise BindFailure(f"bad bind address {bind_address!r}") from None
    CanalServer(state, host or "127.0.0.1", port).run()
