#!/usr/bin/env python3
"""The whole loop, headless: muscle signal in, grasped object out.

Builds the full system on the deterministic pump, trains a quick model,
then scripts an armband fist over an apple: pose event, classification,
setpoints, contact, and the success report, all on one event log.
"""
from grasplab.classifier import train_scg
from grasplab.orchestrator import ModelHolder
from grasplab.system import GraspSystem
from grasplab.vision import ObjectClass, generate_corpus

print("training a quick model (12 examples per class)...")
store = generate_corpus(list(ObjectClass)[:6], 12, seed=5)
model, _ = train_scg(store, restarts=1, max_epochs=25, patience=6, seed=0)

system = GraspSystem(store=store, holder=ModelHolder(model))
system.run_script("""
scene apple
wait 300
gesture fist 800
wait 1500
""")

print(f"\ncontroller state: {system.orchestrator.state.value}")
print("interesting events:")
for line in system.logger.lines:
    if any(key in line for key in ("pose", "predicted", "setpoints",
                                   "grasp_outcome")):
        print(" ", line)

print("\nchannel registry:")
print(system.bus.manifest())
