#!/usr/bin/env python3
"""Channels and the armband stand-in.

Publish/subscribe basics (fan-out, bounded queues, drop counters), then a
scripted gesture stream classified into debounced pose events.
"""
import numpy as np

from grasplab.bus import MessageBus
from grasplab.emg import (CalibrationProfile, Gesture, classify_windows,
                          iter_pose_events, synth_stream, WINDOW_FRAMES)

bus = MessageBus()
bus.register("pose", capacity=4, schema="PoseEvent")

a, b = bus.subscribe("pose"), bus.subscribe("pose")
bus.publish("pose", "close_hand")
print("fan-out:", a.recv().payload, "/", b.recv().payload)

for k in range(6):
    bus.publish("pose", k)
print(f"capacity 4, published 6: kept={[e.payload for e in a.drain()]} "
      f"dropped={a.dropped}")

print()
profile = CalibrationProfile.default()
script = [(Gesture.FIST, 600), (Gesture.REST, 400),
          (Gesture.WAVE_IN, 600), (Gesture.SPREAD_FINGERS, 800)]
frames = synth_stream(script, profile, seed=2)
n = len(frames) // WINDOW_FRAMES
windows = frames[: n * WINDOW_FRAMES].reshape(n, WINDOW_FRAMES, 8)
gestures = classify_windows(windows, profile)
print("per-window calls:", " ".join(g.value for g in gestures))
events = iter_pose_events(gestures)
print("debounced pose events:", [(i, p.value) for i, p in events])
print("(wave-in never drives the hand; rest interrupts without publishing)")
