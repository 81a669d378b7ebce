"""Websocket service streaming percept frames to one interactive client.

Protocol (version 1), over a single `/ws` endpoint:

* The client speaks JSON text messages; the first must be
  ``{"type": "hello", "protocol": 1, "mode": "session" | "practice"}``.
* The server answers with a ``config`` message, then walks the session state
  machine: blocks of trials, each trial a stream of binary percept frames
  plus JSON ``hud`` / ``trial_end`` events, a ``rating_request`` after every
  block, and a final ``session_end``.
* Percept frames are little-endian binary: u8 frame type (0x01), u8 protocol
  version, u16 width, u16 height, u32 frame index, then width*height u8
  pixels in row-major order.
* Client ``input`` messages may arrive at any rate; the newest one wins and
  is applied at the next frame boundary, so a command issued after seeing
  frame k is visible in frame k+1 at the earliest.
* Anything malformed (bad JSON, unknown type, wrong protocol version, binary
  payloads, a rating nobody asked for) gets an ``error`` message and closes
  the socket with code 4400.  A second concurrent client is refused the same
  way.

The engine is deterministic; with ``service.realtime`` off frames are
produced as fast as the client consumes them, which is what the tests use.
"""

from __future__ import annotations

import asyncio
import json
import re
import struct
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket
from starlette.websockets import WebSocketDisconnect

from .agents import InputCommand
from .config import SimConfig, config_to_dict, load_config
from .pipeline import PLAZA_LAYOUTS, Engine, TrialRunner, strategy_order
from .townsim import load_scene, trial_metrics

PROTOCOL_VERSION = 1
FRAME_TYPE_PERCEPT = 0x01
CLOSE_VIOLATION = 4400
COLLISION_MESSAGE = "Collision, back up!"

_FRAME_HEADER = struct.Struct("<BBHHI")


def encode_percept_frame(frame_index: int, image_u8: np.ndarray) -> bytes:
    """Pack one percept frame for the wire."""
    if image_u8.dtype != np.uint8 or image_u8.ndim != 2:
        raise ValueError("percept frames must be 2-d uint8")
    h, w = image_u8.shape
    return _FRAME_HEADER.pack(FRAME_TYPE_PERCEPT, PROTOCOL_VERSION,
                              w, h, frame_index & 0xFFFFFFFF) + image_u8.tobytes()


def decode_percept_frame(blob: bytes) -> tuple[int, np.ndarray]:
    """Inverse of encode_percept_frame, for tests and tooling."""
    kind, version, w, h, index = _FRAME_HEADER.unpack_from(blob)
    if kind != FRAME_TYPE_PERCEPT or version != PROTOCOL_VERSION:
        raise ValueError(f"unexpected frame header {kind}/{version}")
    pixels = np.frombuffer(blob, dtype=np.uint8, offset=_FRAME_HEADER.size)
    if pixels.size != w * h:
        raise ValueError("frame payload size mismatch")
    return index, pixels.reshape(h, w).copy()


class ProtocolViolation(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class _Session:
    def __init__(self, ws: WebSocket, engine: Engine, cfg: SimConfig):
        self.ws = ws
        self.engine = engine
        self.cfg = cfg
        self.latest_cmd = InputCommand()
        self.ratings: asyncio.Queue[int] = asyncio.Queue()
        self.expect_rating = False
        self.disconnected = False
        self.violation: ProtocolViolation | None = None
        self.log: list[dict] = []
        self._reader_task: asyncio.Task | None = None

    # -- plumbing ---------------------------------------------------------

    async def _send_json(self, payload: dict) -> None:
        await self.ws.send_text(json.dumps(payload))

    def _record(self, event: str, **fields) -> None:
        self.log.append({"event": event, **fields})

    def _check(self) -> None:
        if self.violation is not None:
            raise self.violation
        if self.disconnected:
            raise WebSocketDisconnect(1001)

    @staticmethod
    def _parse_message(msg: dict) -> dict:
        if msg.get("bytes") is not None:
            raise ProtocolViolation("clients must send JSON text messages")
        try:
            data = json.loads(msg.get("text") or "")
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or "type" not in data:
            raise ProtocolViolation("messages must be objects with a 'type'")
        return data

    async def _expect_hello(self) -> dict:
        msg = await self.ws.receive()
        if msg["type"] == "websocket.disconnect":
            raise WebSocketDisconnect(1001)
        data = self._parse_message(msg)
        if data["type"] != "hello":
            raise ProtocolViolation("the first message must be 'hello'")
        if data.get("protocol") != PROTOCOL_VERSION:
            raise ProtocolViolation(
                f"unsupported protocol {data.get('protocol')!r}; "
                f"this server speaks {PROTOCOL_VERSION}")
        mode = data.get("mode", "session")
        if mode not in ("session", "practice"):
            raise ProtocolViolation(f"unknown mode {mode!r}")
        return data

    async def _reader(self) -> None:
        """Funnel client messages into the mailbox until the socket dies."""
        while True:
            try:
                msg = await self.ws.receive()
            except (WebSocketDisconnect, RuntimeError):
                self.disconnected = True
                return
            if msg["type"] == "websocket.disconnect":
                self.disconnected = True
                return
            try:
                data = self._parse_message(msg)
                kind = data["type"]
                if kind == "input":
                    gaze = data.get("gaze", (0.0, 0.0))
                    self.latest_cmd = InputCommand(
                        move=float(data.get("move", 0.0)),
                        turn=float(data.get("turn", 0.0)),
                        gaze_deg=(float(gaze[0]), float(gaze[1])),
                    ).clipped()
                elif kind == "rating":
                    if not self.expect_rating:
                        raise ProtocolViolation("no rating was requested")
                    value = data.get("value")
                    if not isinstance(value, int) or not 1 <= value <= 10:
                        raise ProtocolViolation("rating value must be 1..10")
                    self.ratings.put_nowait(value)
                elif kind == "bye":
                    self.disconnected = True
                    return
                else:
                    raise ProtocolViolation(f"unknown message type {kind!r}")
            except (ProtocolViolation, TypeError, ValueError, IndexError) as exc:
                if isinstance(exc, ProtocolViolation):
                    self.violation = exc
                else:
                    self.violation = ProtocolViolation(f"bad message: {exc}")
                return

    # -- session flow -------------------------------------------------------

    async def run(self) -> None:
        hello = await self._expect_hello()
        mode = hello.get("mode", "session")
        seed = int(hello.get("seed", self.cfg.batch.seed))
        self._record("hello", mode=mode, protocol=PROTOCOL_VERSION, seed=seed)

        cfg = self.cfg
        order = (strategy_order(seed, cfg.batch.strategies)
                 if mode == "session" else [cfg.strategy.kind])
        trials_per = cfg.batch.trials_per_strategy if mode == "session" else 1
        await self._send_json({
            "type": "config",
            "protocol": PROTOCOL_VERSION,
            "mode": mode,
            "percept": {"width": cfg.percept.width,
                        "height": cfg.percept.height,
                        "display_scale": cfg.percept.display_scale},
            "trial": {"duration_s": cfg.trial.duration_s,
                      "countdown_s": cfg.trial.countdown_s,
                      "fps": cfg.trial.fps},
            "blocks": [{"strategy": k, "trials": trials_per} for k in order],
        })

        self._reader_task = asyncio.create_task(self._reader())
        children = iter(np.random.SeedSequence(seed).spawn(len(order) * trials_per))
        rows = []
        for block, kind in enumerate(order):
            for trial_i in range(trials_per):
                rng = np.random.default_rng(next(children))
                layout = hello.get("layout") or (
                    "empty" if mode == "practice" else cfg.scene.layout)
                if layout == "random":
                    layout = PLAZA_LAYOUTS[int(rng.integers(len(PLAZA_LAYOUTS)))]
                goal_side = cfg.scene.goal_side
                if goal_side == "random":
                    goal_side = ("left", "right")[int(rng.integers(2))]
                row = await self._trial(block, trial_i, kind, layout,
                                        goal_side, rng)
                rows.append(row)
            if mode == "session":
                await self._rating(block, kind)

        summary = {"trials": len(rows),
                   "successes": sum(r["outcome"] == "success" for r in rows)}
        await self._send_json({"type": "session_end", "summary": summary})
        self._record("session_end", **summary)
        await self.ws.close(1000)

    async def _trial(self, block: int, trial_i: int, kind: str, layout: str,
                     goal_side: str, rng: np.random.Generator) -> dict:
        scene, states = load_scene(layout, rng)
        runner = TrialRunner(self.engine, scene, states, goal_side,
                             strategy_kind=kind)
        self.latest_cmd = InputCommand()
        await self._send_json({
            "type": "trial_start", "block": block, "trial": trial_i,
            "strategy": kind, "layout": scene.id, "goal_side": goal_side,
            "duration_s": runner.trial.duration_s,
        })
        self._record("trial_start", block=block, trial=trial_i, strategy=kind,
                     layout=scene.id, goal_side=goal_side)

        period = 1.0 / self.cfg.trial.fps
        deadline = time.perf_counter()
        last_tick: int | None = None
        while not runner.trial.done:
            self._check()
            out = runner.step(self.latest_cmd)
            frame_u8 = self.engine.percept_u8(out.percept)
            await self.ws.send_bytes(encode_percept_frame(out.frame, frame_u8))
            for ev in out.events:
                await self._send_json({
                    "type": "hud",
                    "collision": {"name": ev.name, "class": ev.class_name,
                                  "moving": ev.moving,
                                  "message": COLLISION_MESSAGE,
                                  "direction": list(ev.backup_dir)},
                })
                self._record("collision", block=block, trial=trial_i,
                             name=ev.name, object_class=ev.class_name,
                             t=round(ev.t, 4))
            if runner.trial.countdown_on and not runner.trial.done:
                tick = int(np.ceil(runner.trial.remaining))
                if tick != last_tick:
                    last_tick = tick
                    await self._send_json({"type": "hud", "countdown": tick})
            if self.cfg.service.realtime:
                deadline += period
                delay = deadline - time.perf_counter()
                if delay > 0:
                    await asyncio.sleep(delay)
            else:
                await asyncio.sleep(0)  # let the reader task drain input

        metrics = trial_metrics(runner.trial).as_dict()
        await self._send_json({"type": "trial_end", "block": block,
                               "trial": trial_i, "outcome": runner.trial.status,
                               "metrics": metrics})
        self._record("trial_end", block=block, trial=trial_i,
                     strategy=kind, frames=runner.frame, **metrics)
        return {"block": block, "trial": trial_i, "strategy": kind, **metrics}

    async def _rating(self, block: int, kind: str) -> None:
        self.expect_rating = True
        await self._send_json({"type": "rating_request", "block": block,
                               "strategy": kind, "scale": [1, 10]})
        get_rating = asyncio.ensure_future(self.ratings.get())
        try:
            while True:
                self._check()
                done, _ = await asyncio.wait({get_rating}, timeout=0.05)
                if done:
                    value = get_rating.result()
                    break
        except BaseException:
            get_rating.cancel()
            raise
        self.expect_rating = False
        self._record("rating", block=block, strategy=kind, value=value)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", text).strip("_") or "session"


def create_app(cfg: SimConfig | None = None, engine: Engine | None = None) -> FastAPI:
    """Build the service; the engine is constructed once and shared."""
    if cfg is None:
        cfg = load_config()
    if engine is None:
        engine = Engine(cfg)
    app = FastAPI(title="spvsim service")
    app.state.cfg = cfg
    app.state.engine = engine
    app.state.client_connected = False

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "protocol": PROTOCOL_VERSION}

    @app.get("/config")
    def get_config() -> dict:
        return config_to_dict(app.state.cfg)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        if app.state.client_connected:
            await ws.send_text(json.dumps({
                "type": "error", "code": "busy",
                "message": "another client is already connected"}))
            await ws.close(CLOSE_VIOLATION)
            return
        app.state.client_connected = True
        session = _Session(ws, app.state.engine, app.state.cfg)
        try:
            await session.run()
        except ProtocolViolation as exc:
            try:
                await session._send_json({"type": "error", "code": "protocol",
                                          "message": exc.message})
                await ws.close(CLOSE_VIOLATION)
            except (WebSocketDisconnect, RuntimeError):
                pass
        except (WebSocketDisconnect, RuntimeError):
            session._record("session_abort")
        finally:
            if session._reader_task is not None:
                session._reader_task.cancel()
            app.state.client_connected = False
            _write_session_log(app.state.cfg, session.log)

    static_dir = cfg.service.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def _write_session_log(cfg: SimConfig, events: list[dict]) -> None:
    if not events:
        return
    out_dir = Path(cfg.io.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = next((e.get("seed") for e in events if e["event"] == "hello"), "x")
    path = out_dir / f"session_{_slug(str(seed))}.jsonl"
    with path.open("w") as fh:
        for event in events:
            fh.write(json.dumps(event) + "\n")
