import base64
import json
import time

from fastapi.testclient import TestClient

from grasplab.actions import GraspType, HandAction, grasp_action
from grasplab.orchestrator import ControllerState, ModelHolder, OverrideCommand
from grasplab.service import create_app
from grasplab.system import GraspSystem
from grasplab.vision import N_FEATURES, DatasetStore, ObjectClass


def make_system(tiny_model, scene=ObjectClass.BANANA):
    system = GraspSystem(store=DatasetStore(seed=0),
                         holder=ModelHolder(tiny_model), log_events=False)
    system.set_scene(scene)
    return system


def wait_for(predicate, timeout=5.0, interval=0.01):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(interval)
    return predicate()


def recv_until(ws, kind, tries=200):
    for _ in range(tries):
        msg = json.loads(ws.receive_text())
        if msg["type"] == kind:
            return msg
    raise AssertionError(f"no {kind} message seen")


def test_grasp_button_equals_override(tiny_model):
    system = make_system(tiny_model)
    app = create_app(system, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "grasp_button", "grasp": "tripod"}))
            assert wait_for(lambda: len(system.store) == 1)
            assert system.store.examples[0].label is GraspType.TRIPOD
            assert system.store.examples[0].source == "gui"
            assert wait_for(lambda: system.orchestrator.state in
                            (ControllerState.EXECUTING, ControllerState.HOLDING))
            fb = recv_until(ws, "feedback", 400)
            assert fb["text"]


def test_text_command_routes_through_grounding(tiny_model):
    system = make_system(tiny_model, scene=ObjectClass.PITCHER)
    from grasplab.nlu.ground import Grounder
    system.orchestrator.grounder = Grounder.default("extended")
    app = create_app(system, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "text_command",
                                     "text": "perform a hook grasp"}))
            assert wait_for(lambda: system.orchestrator.active_grasp
                            is GraspType.HOOK)
            assert len(system.store) == 1
            assert system.store.examples[0].source == "nlu"


def test_malformed_messages_keep_connection(tiny_model):
    system = make_system(tiny_model)
    app = create_app(system, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text("this is not json")
            msg = recv_until(ws, "error")
            assert "bad json" in msg["text"]
            ws.send_text(json.dumps({"no_type": 1}))
            msg = recv_until(ws, "error")
            assert "type" in msg["text"]
            ws.send_text(json.dumps({"type": "grasp_button",
                                     "grasp": "sideways"}))
            msg = recv_until(ws, "error")
            assert "unknown grasp" in msg["text"]
            # still alive: a valid command works
            ws.send_text(json.dumps({"type": "grasp_button", "grasp": "pinch"}))
            assert wait_for(lambda: len(system.store) == 1)


def test_stop_and_power_down_types(tiny_model):
    system = make_system(tiny_model)
    app = create_app(system, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "stop"}))
            assert wait_for(lambda: system.orchestrator.state
                            is ControllerState.STOPPED)
            ws.send_text(json.dumps({"type": "power_down"}))
            assert wait_for(lambda: system.orchestrator.state
                            is ControllerState.POWERED_DOWN)


def test_reconnect_replays_snapshot(tiny_model):
    system = make_system(tiny_model)
    app = create_app(system, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "grasp_button", "grasp": "hook"}))
            assert wait_for(lambda: len(system.store) == 1)
        # wait until the runner has snapshotted a frame and feedback
        runner = app.state.runner
        assert wait_for(lambda: runner._last_frame is not None
                        and len(runner._feedback_ring) > 0)
        with client.websocket_connect("/ws") as ws:
            kinds = []
            texts = []
            for _ in range(12):
                msg = json.loads(ws.receive_text())
                kinds.append(msg["type"])
                if msg["type"] == "feedback":
                    texts.append(msg["text"])
                if msg["type"] == "frame":
                    assert len(base64.b64decode(msg["data"])) == N_FEATURES
                if {"controller", "frame", "feedback"} <= set(kinds) and texts:
                    break
            assert "controller" in kinds
            assert "frame" in kinds
            assert any("hook" in t for t in texts)


def test_transport_equivalence(tiny_model):
    """The same command sequence through the bus and through the wire must
    produce the same controller effects."""
    # path A: deterministic pump, bus publishes
    sys_a = make_system(tiny_model)
    sub_a = sys_a.bus.subscribe("setpoints")
    sys_a.run_ms(300)
    sys_a.bus.publish("override", OverrideCommand(
        grasp_action(GraspType.TRIPOD), source="gui"))
    sys_a.run_ms(1000)
    sys_a.bus.publish("override", OverrideCommand(
        HandAction.parse("stop_hand"), source="gui"))
    sys_a.run_ms(100)
    effects_a = [(c.payload.kind, getattr(c.payload.grasp, "value", None))
                 for c in sub_a.drain()]
    labels_a = [e.label.value for e in sys_a.store.examples]

    # path B: the same two commands over the websocket
    sys_b = make_system(tiny_model)
    sub_b = sys_b.bus.subscribe("setpoints")
    app = create_app(sys_b, pace=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "grasp_button", "grasp": "tripod"}))
            assert wait_for(lambda: len(sys_b.store) == 1)
            assert wait_for(lambda: sys_b.orchestrator.state
                            is not ControllerState.IDLE)
            ws.send_text(json.dumps({"type": "stop"}))
            assert wait_for(lambda: sys_b.orchestrator.state
                            is ControllerState.STOPPED)
    effects_b = [(c.payload.kind, getattr(c.payload.grasp, "value", None))
                 for c in sub_b.drain()]
    labels_b = [e.label.value for e in sys_b.store.examples]

    assert effects_a == effects_b
    assert labels_a == labels_b
    assert sys_a.orchestrator.state == sys_b.orchestrator.state
