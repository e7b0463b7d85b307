"""Service endpoint hosting remote UIs.

One WebSocket, one JSON object per text frame, every object carrying a
``type`` field:

    outbound:  frame | hand_state | feedback | controller | error
    inbound:   grasp_button | text_command | stop | power_down | retrain

Frames travel as base64 of the raw 80x60x3 bytes.  Inbound commands are
queued and applied between scheduler ticks, so the wire path and the bus
path produce identical controller behavior.  On connect a client receives
a snapshot (latest frame, hand state, recent feedback) so reconnects
resume cleanly.  The full schema lives in docs/wire_protocol.md.
"""
from __future__ import annotations

import asyncio
import base64
import json
import queue
import threading
import time
from collections import deque
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .actions import GraspType, HandAction, grasp_action
from .orchestrator import OverrideCommand
from .system import GraspSystem
from .vision import image_to_bytes

OUT_POLL_S = 0.05


def encode_frame(tick: int, image: np.ndarray) -> dict:
    return {"type": "frame", "tick": tick,
            "data": base64.b64encode(image_to_bytes(image)).decode()}


def encode_hand_state(tick: int, hs) -> dict:
    return {
        "type": "hand_state", "tick": tick,
        "angles": [round(a, 4) for a in hs.motor_angles],
        "setpoints": [round(a, 4) for a in hs.setpoints],
        "duties": [round(d, 3) for d in hs.duties],
        "joints": {k: [round(a, 4) for a in v]
                   for k, v in hs.joint_angles.items()},
        "contacts": hs.contacts,
    }


class SystemRunner:
    """Owns the pump thread and the inbound command queue."""

    def __init__(self, system: GraspSystem, pace: bool = True):
        self.system = system
        self.pace = pace
        self._commands: queue.Queue = queue.Queue()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        # connection snapshot state
        self._sub_frame = system.bus.subscribe("image")
        self._sub_state = system.bus.subscribe("hand_state")
        self._sub_feedback = system.bus.subscribe("feedback")
        self._last_frame = None
        self._last_state = None
        self._feedback_ring: deque = deque(maxlen=200)
        self._lock = threading.Lock()

    # ------------------------------------------------------------ pump --
    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread:
            self._thread.join(timeout=2.0)

    def _run(self) -> None:
        chunk = 20  # ticks per chunk, 20 ms of sim time
        while not self._stop.is_set():
            t0 = time.perf_counter()
            self._drain_commands()
            self.system.run_ms(chunk)
            self._capture_snapshots()
            if self.pace:
                budget = chunk / 1000.0 - (time.perf_counter() - t0)
                if budget > 0:
                    time.sleep(budget)

    def _drain_commands(self) -> None:
        while True:
            try:
                fn = self._commands.get_nowait()
            except queue.Empty:
                return
            fn()

    def _capture_snapshots(self) -> None:
        with self._lock:
            env = self._sub_frame.latest()
            if env:
                self._last_frame = (env.timestamp, env.payload)
            env = self._sub_state.latest()
            if env:
                self._last_state = (env.timestamp, env.payload)
            for env in self._sub_feedback.drain():
                self._feedback_ring.append((env.timestamp, env.payload))

    # ------------------------------------------------------- websockets --
    def attach(self):
        bus = self.system.bus
        return {
            "frame": bus.subscribe("image"),
            "hand_state": bus.subscribe("hand_state"),
            "feedback": bus.subscribe("feedback"),
        }

    def detach(self, subs) -> None:
        for sub in subs.values():
            self.system.bus.unsubscribe(sub)

    def snapshot_messages(self) -> list[dict]:
        with self._lock:
            msgs = [{"type": "controller",
                     "state": self.system.orchestrator.state.value}]
            if self._last_frame:
                msgs.append(encode_frame(*self._last_frame))
            if self._last_state:
                msgs.append(encode_hand_state(*self._last_state))
            msgs.extend({"type": "feedback", "tick": t, "text": line}
                        for t, line in self._feedback_ring)
        return msgs

    def collect(self, subs) -> list[dict]:
        msgs = []
        env = subs["frame"].latest()
        if env:
            msgs.append(encode_frame(env.timestamp, env.payload))
        env = subs["hand_state"].latest()
        if env:
            msgs.append(encode_hand_state(env.timestamp, env.payload))
        for env in subs["feedback"].drain():
            msgs.append({"type": "feedback", "tick": env.timestamp,
                         "text": env.payload})
        return msgs

    def submit(self, raw: str) -> str | None:
        """Queue one inbound message; returns an error string if malformed."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as err:
            return f"bad json: {err}"
        if not isinstance(msg, dict) or "type" not in msg:
            return "message must be an object with a 'type' field"
        kind = msg["type"]
        orch = self.system.orchestrator
        bus = self.system.bus
        if kind == "grasp_button":
            try:
                grasp = GraspType.from_name(str(msg.get("grasp", "")))
            except ValueError as err:
                return str(err)
            cmd = OverrideCommand(grasp_action(grasp), source="gui")
            self._commands.put(lambda: bus.publish("override", cmd))
        elif kind == "text_command":
            text = str(msg.get("text", "")).strip()
            if not text:
                return "empty text command"
            self._commands.put(lambda: orch.handle_text(text))
        elif kind == "stop":
            cmd = OverrideCommand(HandAction.parse("stop_hand"), source="gui")
            self._commands.put(lambda: bus.publish("override", cmd))
        elif kind == "power_down":
            self._commands.put(orch.power_down)
        elif kind == "retrain":
            self._commands.put(lambda: orch.retrain_job(wait=False))
        else:
            return f"unknown message type {kind!r}"
        return None


def create_app(system: GraspSystem, ui_dir: str | Path | None = None,
               pace: bool = True) -> FastAPI:
    from contextlib import asynccontextmanager

    runner = SystemRunner(system, pace=pace)

    @asynccontextmanager
    async def lifespan(app):
        runner.start()
        yield
        runner.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.runner = runner

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        subs = runner.attach()
        outbox: asyncio.Queue = asyncio.Queue()
        for msg in runner.snapshot_messages():
            await websocket.send_text(json.dumps(msg))

        async def receiver():
            while True:
                raw = await websocket.receive_text()
                err = runner.submit(raw)
                if err:
                    await outbox.put({"type": "error", "text": err})

        async def sender():
            while True:
                try:
                    msg = outbox.get_nowait()
                except asyncio.QueueEmpty:
                    msg = None
                if msg is None:
                    for m in runner.collect(subs):
                        await websocket.send_text(json.dumps(m))
                    await asyncio.sleep(OUT_POLL_S)
                else:
                    await websocket.send_text(json.dumps(msg))

        try:
            recv_task = asyncio.create_task(receiver())
            send_task = asyncio.create_task(sender())
            done, pending = await asyncio.wait(
                {recv_task, send_task}, return_when=asyncio.FIRST_COMPLETED)
            for task in pending:
                task.cancel()
            for task in done:
                exc = task.exception()
                if exc and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            runner.detach(subs)

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(system: GraspSystem, port: int = 8765,
          ui_dir: str | Path | None = None) -> None:
    import uvicorn
    app = create_app(system, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
