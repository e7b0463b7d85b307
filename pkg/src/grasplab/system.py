"""Whole-system assembly on the deterministic tick scheduler.

Builds every channel of the architecture, wires the camera stand-in, the
armband pump, the controller, and the hand simulator onto one fixed-tick
pump, and runs scripted headless scenarios with a byte-stable event log.
"""
from __future__ import annotations

import shlex
from dataclasses import replace

import numpy as np

from .actions import GraspType, HandAction
from .bus import MessageBus
from .config import GraspLabConfig
from .emg import CalibrationProfile, Gesture, PoseEvent, PosePump
from .handsim.hand import (HandConfig, HandSim, HandState, SimObject,
                           _predicate, object_for_class)
from .orchestrator import (ModelHolder, Orchestrator, OverrideCommand,
                           SetpointCommand)
from .scheduler import TickScheduler
from .vision import DatasetStore, ObjectClass, ObjectSpec, render

CHANNELS = (
    # name, capacity, payload schema id
    ("image", 4, "Image:80x60xRGB"),
    ("pose", 64, "PoseEvent"),
    ("override", 64, "OverrideCommand"),
    ("predicted_grasp", 64, "GraspType"),
    ("setpoints", 64, "SetpointCommand"),
    ("updated_model", 8, "ModelInfo"),
    ("feedback", 256, "str"),
    ("hand_state", 4, "HandState"),
    ("grasp_outcome", 16, "GraspOutcome"),
)


def build_bus() -> MessageBus:
    bus = MessageBus()
    for name, capacity, schema in CHANNELS:
        bus.register(name, capacity=capacity, schema=schema)
    return bus


class CameraTask:
    """Publishes a jittered render of the current scene at 10 Hz."""

    def __init__(self, bus: MessageBus, config: GraspLabConfig, seed: int = 0):
        self.bus = bus
        self.config = config
        self.seed = seed
        self.scene: ObjectClass | None = None
        self._frame_index = 0

    def set_scene(self, cls: ObjectClass | None) -> None:
        self.scene = cls

    def step(self, tick: int) -> None:
        if self.scene is None:
            return
        rc = self.config.render
        rng = np.random.default_rng((self.seed, self._frame_index))
        spec = ObjectSpec(
            self.scene,
            scale=float(np.clip(rng.uniform(rc.scale_lo, rc.scale_hi), 0.5, 1.5)),
            jitter_px=rc.jitter_px,
            hue_jitter_deg=rc.hue_jitter_deg,
            rotation=float(rng.normal(0.0, rc.rotation_sigma)),
            seed=int(rng.integers(2**31)),
        )
        self._frame_index += 1
        self.bus.publish("image", render(spec))


class HandTask:
    """Runs the simulator against the setpoints channel and reports back."""

    def __init__(self, bus: MessageBus, config: GraspLabConfig,
                 orchestrator: Orchestrator | None = None):
        self.bus = bus
        self.orchestrator = orchestrator
        self.sim = HandSim(HandConfig(gains=list(config.gains)))
        self._sub = bus.subscribe("setpoints")
        self._stopped = False
        self._grasp: GraspType | None = None
        self._outcome_sent = True
        self._quiet = 0

    def set_object(self, obj: SimObject | None) -> None:
        self.sim.set_object(obj)

    def step(self, tick: int) -> None:
        for env in self._sub.drain():
            self._apply(env.payload)
        if not self._stopped:
            self.sim.step(tick)
        if not self._outcome_sent and self.sim.settled():
            self._quiet += 1
            if self._quiet >= 100:
                self._report_outcome(tick)
        else:
            self._quiet = 0
        if tick % 100 == 0:
            self.bus.publish("hand_state", self.sim.snapshot())

    def _apply(self, cmd: SetpointCommand) -> None:
        if cmd.kind == "stop":
            # brake mode: zero duty, shaft held where it is
            self._stopped = True
            self._grasp = None
            self._outcome_sent = True
            for i in range(6):
                self.sim.motors[i] = replace(self.sim.motors[i],
                                             duty=0.0, velocity=0.0)
            return
        self._stopped = False
        self._quiet = 0
        if cmd.kind == "grasp":
            self._grasp = cmd.grasp
            self.sim.set_setpoints(cmd.angles)
            self._outcome_sent = False
        else:  # open
            self._grasp = None
            self.sim.set_setpoints((0.0,) * 6)
            self._outcome_sent = True

    def _report_outcome(self, tick: int) -> None:
        self._outcome_sent = True
        contacts = self.sim.contacts()
        n = sum(contacts.values())
        if self._grasp is not None:
            success = (self.sim.object is not None
                       and _predicate(self._grasp, contacts, self.sim))
            self.bus.publish("grasp_outcome", {
                "grasp": self._grasp.value, "success": success,
                "contacts": n, "tick": tick})
            self.bus.publish(
                "feedback",
                f"[{tick}] grasp {self._grasp.value} settled: "
                f"{'success' if success else 'no grip'} ({n} contacts)")
        if self.orchestrator is not None:
            self.orchestrator.notify_settled()


def summarize(payload) -> str:
    """Stable one-line rendering of a channel payload for the event log."""
    if isinstance(payload, np.ndarray):
        return f"ndarray{payload.shape} sum={float(payload.sum()):.3f}"
    if isinstance(payload, HandState):
        angles = ",".join(f"{a:.3f}" for a in payload.motor_angles)
        contacts = "".join("1" if payload.contacts[d] else "0"
                           for d in ("index", "middle", "ring", "pinky", "thumb"))
        return f"angles=[{angles}] contacts={contacts}"
    if isinstance(payload, PoseEvent):
        return f"pose={payload.pose.value} window={payload.window_index}"
    if isinstance(payload, SetpointCommand):
        angles = ",".join(f"{a:.2f}" for a in payload.angles)
        return f"{payload.kind} {payload.grasp.value if payload.grasp else '-'} [{angles}]"
    if isinstance(payload, OverrideCommand):
        return f"{payload.action.name} from {payload.source}"
    if isinstance(payload, GraspType):
        return payload.value
    if isinstance(payload, dict):
        return " ".join(f"{k}={payload[k]}" for k in sorted(payload))
    return str(payload)


class EventLogger:
    def __init__(self, bus: MessageBus, channels=None):
        names = channels or [c[0] for c in CHANNELS]
        self._subs = [(n, bus.subscribe(n)) for n in names]
        self.lines: list[str] = []

    def step(self, tick: int) -> None:
        for name, sub in self._subs:
            for env in sub.drain():
                self.lines.append(
                    f"{env.timestamp}\t{name}\t{env.seq}\t{summarize(env.payload)}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


class GraspSystem:
    """Camera + armband + controller + hand on one deterministic pump."""

    def __init__(self, config: GraspLabConfig | None = None,
                 store: DatasetStore | None = None,
                 holder: ModelHolder | None = None,
                 grounder=None, emg_script=None, emg_seed: int = 0,
                 log_events: bool = True):
        self.config = config or GraspLabConfig()
        self.bus = build_bus()
        self.scheduler = TickScheduler(self.bus)
        self.store = store if store is not None else DatasetStore(seed=0)
        self.holder = holder or ModelHolder()
        self.orchestrator = Orchestrator(self.bus, self.store, self.holder,
                                         grounder=grounder, config=self.config)
        self.camera = CameraTask(self.bus, self.config)
        self.hand = HandTask(self.bus, self.config, self.orchestrator)
        self.logger = EventLogger(self.bus) if log_events else None
        profile = CalibrationProfile.default(self.config.emg.noise_sigma)
        self.emg = (PosePump(self.bus, emg_script, profile, emg_seed)
                    if emg_script else None)

        frame_period = 1000 // self.config.orchestrator.frame_rate_hz
        self.scheduler.every(frame_period, self.camera.step)
        if self.emg is not None:
            self.scheduler.every(self.emg.period_ticks, self.emg.step,
                                 phase=self.emg.period_ticks)
        self.scheduler.every(1, self.orchestrator.step)
        self.scheduler.every(1, self.hand.step)
        if self.logger is not None:
            self.scheduler.every(1, self.logger.step)

    def set_scene(self, cls: ObjectClass | None) -> None:
        self.camera.set_scene(cls)
        self.hand.set_object(object_for_class(cls.value) if cls else None)

    def run_ms(self, ms: int) -> None:
        self.scheduler.run(ms)

    # ------------------------------------------------------ headless run --
    def run_script(self, text: str) -> None:
        """Scripted scenario: one command per line.

        scene <class>|none; gesture <name> <ms>; wait <ms>; text "<cmd>";
        button <grasp>; open; stop; power_down; retrain.
        """
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = shlex.split(line)
            cmd, args = parts[0], parts[1:]
            if cmd == "scene":
                self.set_scene(None if args[0] == "none"
                               else ObjectClass(args[0]))
            elif cmd == "gesture":
                script = [(Gesture(args[0]), int(args[1]))]
                profile = CalibrationProfile.default(self.config.emg.noise_sigma)
                pump = PosePump(self.bus, script, profile,
                                seed=self.scheduler.tick)
                self.scheduler.every(pump.period_ticks, pump.step,
                                     phase=self.scheduler.tick + pump.period_ticks)
                self.run_ms(int(args[1]))
            elif cmd == "wait":
                self.run_ms(int(args[0]))
            elif cmd == "text":
                self.orchestrator.handle_text(" ".join(args))
                self.run_ms(1)
            elif cmd == "button":
                self.bus.publish("override", OverrideCommand(
                    HandAction.parse(f"grasp:{args[0]}"), source="gui"))
                self.run_ms(1)
            elif cmd == "open":
                self.bus.publish("override",
                                 OverrideCommand(HandAction.parse("open_hand"),
                                                 source="gui"))
                self.run_ms(1)
            elif cmd == "stop":
                self.bus.publish("override",
                                 OverrideCommand(HandAction.parse("stop_hand"),
                                                 source="gui"))
                self.run_ms(1)
            elif cmd == "power_down":
                self.orchestrator.power_down()
                self.run_ms(1)
            elif cmd == "retrain":
                self.orchestrator.retrain_job(wait=True)
                self.run_ms(1)
            else:
                raise ValueError(f"unknown script command {cmd!r}")
