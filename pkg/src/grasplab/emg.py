"""Synthetic 8-channel muscle-signal source with RMS pose classification.

The armband stand-in generates per-channel activation for scripted
gestures, classifies 200 ms windows by nearest RMS centroid, and a
debounced pump turns stable fist / spread-fingers calls into close / open
pose events on the bus.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

N_CHANNELS = 8
SAMPLE_RATE_HZ = 200
TICKS_PER_FRAME = 1000 // SAMPLE_RATE_HZ      # 5 ms
WINDOW_FRAMES = 40                            # 200 ms windows
DEBOUNCE_WINDOWS = 3


class Gesture(enum.Enum):
    FIST = "fist"
    SPREAD_FINGERS = "spread_fingers"
    WAVE_IN = "wave_in"
    WAVE_OUT = "wave_out"
    FINGER_TAP = "finger_tap"
    REST = "rest"


class Pose(enum.Enum):
    CLOSE_HAND = "close_hand"
    OPEN_HAND = "open_hand"


#: Only two gestures drive the hand.
POSE_OF_GESTURE = {
    Gesture.FIST: Pose.CLOSE_HAND,
    Gesture.SPREAD_FINGERS: Pose.OPEN_HAND,
}

_DEFAULT_CENTROIDS = {
    Gesture.FIST:           (0.85, 0.80, 0.55, 0.30, 0.25, 0.45, 0.70, 0.80),
    Gesture.SPREAD_FINGERS: (0.25, 0.35, 0.75, 0.85, 0.80, 0.70, 0.30, 0.20),
    Gesture.WAVE_IN:        (0.80, 0.30, 0.20, 0.30, 0.70, 0.85, 0.35, 0.25),
    Gesture.WAVE_OUT:       (0.25, 0.65, 0.85, 0.35, 0.25, 0.30, 0.80, 0.55),
    Gesture.FINGER_TAP:     (0.45, 0.25, 0.40, 0.65, 0.30, 0.25, 0.45, 0.35),
    Gesture.REST:           (0.0,) * N_CHANNELS,
}


@dataclass
class CalibrationProfile:
    """Per-gesture RMS centroids plus the noise and rejection levels."""

    centroids: dict[Gesture, np.ndarray]
    noise_sigma: float = 0.05
    rejection_radius: float = 0.45

    def __post_init__(self):
        self.centroids = {g: np.asarray(c, dtype=np.float64)
                          for g, c in self.centroids.items()}
        for g, c in self.centroids.items():
            if c.shape != (N_CHANNELS,):
                raise ValueError(f"centroid for {g} must have {N_CHANNELS} channels")
        gs = [g for g in self.centroids if g is not Gesture.REST]
        for i, a in enumerate(gs):
            for b in gs[i + 1:]:
                d = float(np.linalg.norm(self.centroids[a] - self.centroids[b]))
                if d <= 2.0 * self.noise_sigma:
                    raise ValueError(f"centroids {a}/{b} closer than 2 sigma")

    @classmethod
    def default(cls, noise_sigma: float = 0.05) -> "CalibrationProfile":
        return cls({g: np.array(c) for g, c in _DEFAULT_CENTROIDS.items()},
                   noise_sigma=noise_sigma)

    def save(self, path: str | Path) -> None:
        lines = [f"noise_sigma={self.noise_sigma!r}",
                 f"rejection_radius={self.rejection_radius!r}"]
        for g, c in self.centroids.items():
            lines.append(f"centroid.{g.value}=" + ",".join(repr(float(v)) for v in c))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "CalibrationProfile":
        centroids = {}
        kv = {}
        for line in Path(path).read_text().splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            key, val = line.split("=", 1)
            if key.startswith("centroid."):
                centroids[Gesture(key[9:])] = np.array(
                    [float(v) for v in val.split(",")])
            else:
                kv[key] = float(val)
        return cls(centroids, kv.get("noise_sigma", 0.05),
                   kv.get("rejection_radius", 0.45))


def load_gesture_script(path: str | Path) -> list[tuple[Gesture, int]]:
    """Script file: one `gesture duration_ms` pair per line."""
    script = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, dur = line.split()
        script.append((Gesture(name), int(dur)))
    return script


def synth_stream(script, profile: CalibrationProfile, seed: int = 0) -> np.ndarray:
    """Frames (n, 8) for a [(gesture, duration_ticks)] script.

    Channel signal is the gesture template shaped by a 25 ms raised-cosine
    onset/offset envelope, plus Gaussian noise; deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    chunks = []
    for gesture, duration_ticks in script:
        if duration_ticks <= 0:
            raise ValueError("gesture durations must be positive")
        n = duration_ticks // TICKS_PER_FRAME
        env = np.ones(n)
        ramp = min(5, n // 2)  # 25 ms at 200 Hz
        if ramp > 0:
            shape = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, ramp)))
            env[:ramp] = shape
            env[n - ramp:] = shape[::-1]
        base = env[:, None] * profile.centroids[gesture][None, :]
        noise = rng.normal(0.0, profile.noise_sigma, size=(n, N_CHANNELS))
        chunks.append(np.clip(base + noise, -1.0, 1.0))
    return np.concatenate(chunks, axis=0)


def window_rms(frames: np.ndarray) -> np.ndarray:
    return np.sqrt(np.mean(np.square(frames), axis=-2))


def classify_window(frames: np.ndarray, profile: CalibrationProfile) -> Gesture:
    """Nearest centroid in 8-dim RMS space; Rest outside the rejection radius.

    Ties break in Gesture declaration order.
    """
    if frames.shape != (WINDOW_FRAMES, N_CHANNELS):
        raise ValueError(f"expected ({WINDOW_FRAMES}, {N_CHANNELS}) window")
    return classify_windows(frames[None, :, :], profile)[0]


def classify_windows(windows: np.ndarray, profile: CalibrationProfile):
    """Vectorized nearest-centroid over (k, 40, 8) windows."""
    rms = window_rms(windows)
    gestures = [g for g in Gesture if g is not Gesture.REST]
    cents = np.stack([profile.centroids[g] for g in gestures])
    d = np.linalg.norm(rms[:, None, :] - cents[None, :, :], axis=-1)
    best = d.argmin(axis=1)  # argmin takes the first of equals: enum order
    out = []
    for k in range(len(windows)):
        if d[k, best[k]] > profile.rejection_radius:
            out.append(Gesture.REST)
        else:
            out.append(gestures[best[k]])
    return out


def iter_pose_events(window_gestures) -> list[tuple[int, Pose]]:
    """Debounced pose events from a sequence of per-window gestures.

    A pose fires only once a gesture has held for three consecutive
    windows, and not again until a different gesture stabilizes.
    Returns (window_index, pose) pairs.
    """
    events = []
    candidate = None
    run = 0
    stable = Gesture.REST
    for i, g in enumerate(window_gestures):
        if g == candidate:
            run += 1
        else:
            candidate = g
            run = 1
        if run >= DEBOUNCE_WINDOWS and g is not stable:
            stable = g
            pose = POSE_OF_GESTURE.get(g)
            if pose is not None:
                events.append((i, pose))
    return events


@dataclass(frozen=True)
class PoseEvent:
    pose: Pose
    window_index: int


class PosePump:
    """Scheduler task: streams a script and publishes debounced pose events."""

    def __init__(self, bus, script, profile: CalibrationProfile | None = None,
                 seed: int = 0, channel: str = "pose"):
        self.bus = bus
        self.profile = profile or CalibrationProfile.default()
        self.frames = synth_stream(script, self.profile, seed)
        self.channel = channel
        self._next_window = 0
        self._candidate = None
        self._run = 0
        self._stable = Gesture.REST
        self.published: list[PoseEvent] = []

    @property
    def period_ticks(self) -> int:
        return WINDOW_FRAMES * TICKS_PER_FRAME  # one window, 200 ms

    def step(self, tick: int) -> None:
        lo = self._next_window * WINDOW_FRAMES
        hi = lo + WINDOW_FRAMES
        if hi > len(self.frames):
            return
        gesture = classify_window(self.frames[lo:hi], self.profile)
        self._next_window += 1
        if gesture == self._candidate:
            self._run += 1
        else:
            self._candidate = gesture
            self._run = 1
        if self._run >= DEBOUNCE_WINDOWS and gesture is not self._stable:
            self._stable = gesture
            pose = POSE_OF_GESTURE.get(gesture)
            if pose is not None:
                event = PoseEvent(pose, self._next_window - 1)
                self.published.append(event)
                self.bus.publish(self.channel, event)
