"""The hand controller: a state machine fusing pose events, classifier
predictions, and GUI/NLU overrides, plus labeled-example capture and
offline retraining with an atomic model swap.

Channel wiring (all registered by the system assembler):

    image            camera frames (latest one is the capture snapshot)
    pose             debounced open/close events from the armband stand-in
    override         grasp buttons and grounded text commands
    predicted_grasp  classifier output on a close-hand event
    setpoints        motor targets for the hand simulator
    updated_model    announcement after a successful retrain swap
    feedback         human-readable status lines (mirrored to the UI)
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .actions import ActionKind, GraspType, HandAction
from .bus import MessageBus
from .classifier import MlpModel, load_model, train_scg
from .config import GraspLabConfig
from .emg import PoseEvent, Pose
from .vision import DatasetStore


class ControllerState(Enum):
    IDLE = "idle"
    EXECUTING = "executing"
    HOLDING = "holding"
    STOPPED = "stopped"
    POWERED_DOWN = "powered_down"


@dataclass(frozen=True)
class OverrideCommand:
    action: HandAction
    source: str                  # gui | nlu
    capture: bool | None = None  # None: grasps capture, other actions do not

    def wants_capture(self) -> bool:
        if self.capture is not None:
            return self.capture
        return self.action.kind is ActionKind.GRASP


@dataclass(frozen=True)
class SetpointCommand:
    kind: str                    # grasp | open | stop
    grasp: GraspType | None = None
    angles: tuple[float, ...] = ()


class ModelHolder:
    """Live classifier with linearizable swap: every forward call runs
    against exactly one model version."""

    def __init__(self, model: MlpModel | None = None, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._model = model
        self.path = Path(path) if path else None
        self.version = 0 if model is None else 1

    def model(self) -> MlpModel | None:
        with self._lock:
            return self._model

    def posterior(self, image) -> np.ndarray:
        model = self.model()
        if model is None:
            raise RuntimeError("no classifier model loaded")
        return model.posterior(image)

    def swap(self, model: MlpModel) -> int:
        with self._lock:
            self._model = model
            self.version += 1
            return self.version

    def load_from(self, path) -> None:
        self.path = Path(path)
        self.swap(load_model(path))


class Orchestrator:
    def __init__(self, bus: MessageBus, store: DatasetStore,
                 holder: ModelHolder, grounder=None,
                 config: GraspLabConfig | None = None):
        self.bus = bus
        self.store = store
        self.holder = holder
        self.grounder = grounder
        self.config = config or GraspLabConfig()
        self.state = ControllerState.IDLE
        self.active_grasp: GraspType | None = None
        self.pending_retrain = False
        self.captures_since_retrain = 0
        self._retrain_running = threading.Event()

        self._sub_image = bus.subscribe("image")
        self._sub_pose = bus.subscribe("pose")
        self._sub_override = bus.subscribe("override")
        self._latest_frame = None
        self._latest_frame_tick = -10**9
        self._last_override_tick = -10**9
        self.tick = 0

    # ------------------------------------------------------------- pump --
    def step(self, tick: int) -> None:
        """One scheduler poll: pick up frames, then act on queued events."""
        self.tick = tick
        env = self._sub_image.latest()
        if env is not None:
            self._latest_frame = env.payload
            self._latest_frame_tick = tick  # arrival time on this pump
        for env in self._sub_pose.drain():
            self.on_pose(env.payload)
        for env in self._sub_override.drain():
            self.on_override(env.payload)

    def feedback(self, text: str) -> None:
        self.bus.publish("feedback", f"[{self.tick}] {text}")

    # ---------------------------------------------------------- helpers --
    def _frame_snapshot(self):
        if self._latest_frame is None:
            return None
        age = self.tick - self._latest_frame_tick
        if age > self.config.orchestrator.frame_staleness_ms:
            return None
        return self._latest_frame

    def _publish_setpoints(self, cmd: SetpointCommand) -> None:
        # Safety: a stopped or powered-down controller never moves motors.
        if self.state in (ControllerState.STOPPED, ControllerState.POWERED_DOWN):
            raise RuntimeError(f"setpoint publish attempted in {self.state}")
        self.bus.publish("setpoints", cmd)

    def _execute_grasp(self, grasp: GraspType) -> None:
        self._publish_setpoints(SetpointCommand(
            "grasp", grasp, tuple(self.config.setpoints[grasp])))
        self.state = ControllerState.EXECUTING
        self.active_grasp = grasp

    def _open_hand(self) -> None:
        self._publish_setpoints(SetpointCommand("open", None, (0.0,) * 6))
        self.active_grasp = None

    def notify_settled(self) -> None:
        """Hand task reports the last commanded motion finished."""
        if self.state is ControllerState.EXECUTING:
            self.state = ControllerState.HOLDING

    # ------------------------------------------------------------ poses --
    def on_pose(self, event: PoseEvent) -> None:
        if self.state is ControllerState.POWERED_DOWN:
            return
        if self.state is ControllerState.STOPPED:
            self.feedback(f"pose {event.pose.value} ignored: controller stopped")
            return
        if event.pose is Pose.CLOSE_HAND:
            if self.state is not ControllerState.IDLE:
                return  # already closed or closing
            self._classify_and_execute()
        elif event.pose is Pose.OPEN_HAND:
            if self.state in (ControllerState.HOLDING, ControllerState.EXECUTING):
                self._open_hand()
                self.state = ControllerState.IDLE
                self.feedback("open hand")

    def _classify_and_execute(self) -> None:
        frame = self._frame_snapshot()
        if frame is None:
            self.feedback("no camera frame available; close ignored")
            return
        posterior = self.holder.posterior(frame)
        grasp = list(GraspType)[int(np.argmax(posterior))]
        self.bus.publish("predicted_grasp", grasp)
        self.feedback(f"predicted {grasp.value} (p={posterior.max():.2f})")
        self._execute_grasp(grasp)

    # -------------------------------------------------------- overrides --
    def on_override(self, cmd: OverrideCommand) -> None:
        if self.state is ControllerState.POWERED_DOWN:
            return
        action = cmd.action
        if action.kind is ActionKind.STOP_HAND:
            self.bus.publish("setpoints", SetpointCommand("stop"))
            self.state = ControllerState.STOPPED
            self.active_grasp = None
            self.feedback("stopped: motors holding zero duty")
            return
        if self.state is ControllerState.STOPPED:
            if action.kind is ActionKind.OPEN_HAND:
                self.state = ControllerState.IDLE
                self._open_hand()
                self.feedback("open hand (leaving stop)")
            else:
                self.feedback(f"override {action.name} rejected: controller stopped")
            return
        if action.kind is ActionKind.GRASP:
            if self.tick - self._last_override_tick < \
                    self.config.orchestrator.override_debounce_ms:
                self.feedback(f"override {action.name} debounced")
                return
            self._last_override_tick = self.tick
            if cmd.wants_capture():
                self._capture(action.grasp, cmd.source)
            self._execute_grasp(action.grasp)
            self.feedback(f"override: executing {action.grasp.value} "
                          f"({cmd.source})")
        elif action.kind is ActionKind.OPEN_HAND:
            self._open_hand()
            self.state = ControllerState.IDLE
            self.feedback("open hand")
        elif action.kind is ActionKind.CLOSE_HAND:
            if self.state is ControllerState.IDLE:
                self._classify_and_execute()

    def _capture(self, grasp: GraspType, source: str) -> None:
        frame = self._frame_snapshot()
        if frame is None:
            self.feedback("capture skipped: no fresh camera frame")
            return
        eid = self.store.add_example(frame, grasp, source, timestamp=self.tick)
        self.pending_retrain = True
        self.captures_since_retrain += 1
        self.feedback(f"saved example {eid} as {grasp.value}")
        every = self.config.orchestrator.auto_retrain_every
        if every and self.captures_since_retrain >= every:
            self.retrain_job()

    # ------------------------------------------------------------- text --
    def handle_text(self, text: str) -> None:
        """Ground a typed command and route it as an NLU override."""
        if self.grounder is None:
            self.feedback("text ignored: no language model loaded")
            return
        from .nlu import (AmbiguousGroundingError, NoGroundingError,
                          ParseFailure)
        try:
            result = self.grounder.ground(text)
        except ParseFailure as err:
            self.feedback(f"parse error: {err.detail} ({err.kind})")
            return
        except NoGroundingError:
            self.feedback(f"understanding error: cannot ground {text!r}")
            return
        except AmbiguousGroundingError as err:
            names = ", ".join(a.name for a, _ in err.actions)
            self.feedback(f"ambiguous command {text!r}: {names}")
            return
        self.feedback(f"grounded {text!r} -> {result.action.name} "
                      f"in {result.latency_ms} ms")
        self.on_override(OverrideCommand(result.action, source="nlu"))

    def power_down(self) -> None:
        """Return to the open pose, then refuse all further commands."""
        if self.state is ControllerState.POWERED_DOWN:
            return
        self.state = ControllerState.IDLE
        self._open_hand()
        self.state = ControllerState.POWERED_DOWN
        self.feedback("powered down: hand returned to open pose")

    # ---------------------------------------------------------- retrain --
    def retrain_job(self, wait: bool = True):
        """Retrain on the full store and atomically swap the live model.

        Runs inline by default (deterministic for tests/headless); with
        wait=False it runs in a background thread while the old model keeps
        serving forward requests.
        """
        if self._retrain_running.is_set():
            self.feedback("retrain already running")
            return None
        if not self.pending_retrain and self.captures_since_retrain == 0:
            self.feedback("retrain: store unchanged, training anyway")
        self._retrain_running.set()
        if wait:
            return self._retrain_body()
        t = threading.Thread(target=self._retrain_body, daemon=True)
        t.start()
        return t

    def _retrain_body(self):
        tc = self.config.train
        try:
            model, report = train_scg(
                self.store, restarts=tc.restarts, max_epochs=tc.max_epochs,
                patience=tc.patience, min_epochs=tc.min_epochs,
                seed=len(self.store), model_path=self.holder.path)
        except Exception as err:
            self.feedback(f"retrain failed: {err}; previous model kept")
            self._retrain_running.clear()
            return None
        version = self.holder.swap(model)
        self.pending_retrain = False
        self.captures_since_retrain = 0
        stats = report.runs[report.chosen]
        self.bus.publish("updated_model", {
            "version": version, "val_accuracy": stats.val_accuracy,
            "examples": len(self.store)})
        self.feedback(f"model v{version} live "
                      f"(val_accuracy={stats.val_accuracy:.3f}, "
                      f"examples={len(self.store)})")
        self._retrain_running.clear()
        return report
