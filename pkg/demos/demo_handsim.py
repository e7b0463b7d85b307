#!/usr/bin/env python3
"""Drive the tendon hand: step responses, grasps on objects, spring return.

The simulator runs physics at 1 kHz with PID duty control at 100 Hz;
contact with an object freezes the finger chain and stalls its motor.
"""
from grasplab.actions import GraspType
from grasplab.handsim import (GRASP_SETPOINTS, HandSim, SimObject,
                              execute_grasp, object_for_class)

print("step response, motor 0, 0 -> 1 rad:")
sim = HandSim()
sim.set_setpoints((1.0, 0, 0, 0, 0, 0))
peak = 0.0
for t in range(1500):
    sim.step(t)
    peak = max(peak, sim.motors[0].angle)
print(f"  final={sim.motors[0].angle:.4f} rad, overshoot="
      f"{(peak - 1.0) * 100:.1f}%, encoder={sim.motors[0].encoder_count}")

print("\ngrasps on their natural objects:")
for grasp, obj in [
    (GraspType.CYLINDRICAL, object_for_class("cup")),
    (GraspType.SPHERICAL, object_for_class("apple")),
    (GraspType.HOOK, object_for_class("pitcher")),
    (GraspType.LATERAL, object_for_class("box")),
    (GraspType.PINCH, object_for_class("dice")),
    (GraspType.TRIPOD, object_for_class("banana")),
]:
    out = execute_grasp(grasp, obj)
    touching = ",".join(d for d, c in out.contacts.items() if c)
    print(f"  {grasp.value:12s} on {obj.shape:8s} r={obj.radius:.3f}: "
          f"success={out.success} settle={out.settle_ticks} ms "
          f"contacts=[{touching}]")

print("\nno object means nothing to hold:")
out = execute_grasp(GraspType.HOOK, None)
print(f"  hook in free air: success={out.success}, "
      f"contacts={out.contact_count}")

print("\nsprings reopen an unpowered hand:")
sim = HandSim()
sim.set_setpoints(GRASP_SETPOINTS[GraspType.CYLINDRICAL])
for t in range(1500):
    sim.step(t)
closed = max(m.angle for m in sim.motors)
sim.set_setpoints((0.0,) * 6)
for t in range(1500, 4500):
    sim.step(t)
opened = max(m.angle for m in sim.motors)
print(f"  closed to {closed:.2f} rad, spring return leaves {opened:.4f} rad")
