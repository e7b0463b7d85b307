"""Tendon-coupled finger chains, disc contact, and grasp execution.

Geometry is 2.5-D: each digit is a planar three-link chain in its own
lateral plane, and an object presents the disc its cross-section cuts in
that plane.  One motor draws each finger's tendon; joint angles follow the
draw through fixed coupling ratios until the chain meets the object
surface, which freezes the chain and stalls the motor.  Torsion springs
give the return: hand the motor zero duty and the spring load backs the
tendon off until the joints are straight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..actions import GraspType
from .motor import (CONTACT_TORQUE, COUNT_RADIANS, DEFAULT_GAINS, TRAVEL_MAX,
                    MotorState, PidGains, PidState, encoder_angle, motor_step,
                    pid_step)

#: Joint spring: 0.42 in-lb of torque at each joint.
JOINT_SPRING_TORQUE = 0.04746  # N*m

#: Spring load reflected to the motor shaft, per radian of draw, plus the
#: assembly preload that keeps pulling until the joints are straight.
SPRING_RATE = 0.05   # N*m/rad
SPRING_PRELOAD = 0.02  # N*m

#: Fraction of motor draw converted to summed joint flexion.
TENDON_GAIN = 0.5

#: Thumb direction motor: abduction/opposition angle per radian of travel.
DIRECTION_GAIN = 0.25

DIGITS = ("index", "middle", "ring", "pinky", "thumb")
N_MOTORS = 6  # five tendon motors + the thumb direction motor


@dataclass(frozen=True)
class FingerGeometry:
    name: str
    base: tuple[float, float]
    links: tuple[float, float, float]       # proximal, intermediate, distal (m)
    coupling: tuple[float, float, float]    # tendon share per joint, sums to 1
    plane_z: float                          # lateral offset of the digit plane
    curl: float                             # +1 curls toward +y, -1 toward -y

    def __post_init__(self):
        if abs(sum(self.coupling) - 1.0) > 1e-9:
            raise ValueError("coupling ratios must sum to 1")

    def joint_angles(self, draw: float) -> tuple[float, float, float]:
        total = max(draw, 0.0) * TENDON_GAIN
        return tuple(total * c for c in self.coupling)

    def chain_points(self, draw: float, tilt: float = 0.0):
        """Joint positions (4 points) for a given tendon draw."""
        x, y = self.base
        pts = [(x, y)]
        heading = tilt
        for length, j in zip(self.links, self.joint_angles(draw)):
            heading += self.curl * j
            x += length * math.cos(heading)
            y += length * math.sin(heading)
            pts.append((x, y))
        return pts


def _default_fingers() -> list[FingerGeometry]:
    spread = {"index": -0.008, "middle": -0.020, "ring": -0.032, "pinky": -0.044}
    links = {
        "index": (0.045, 0.028, 0.022),
        "middle": (0.048, 0.030, 0.023),
        "ring": (0.044, 0.028, 0.021),
        "pinky": (0.036, 0.024, 0.018),
    }
    return [FingerGeometry(name, (0.0, 0.040), links[name], (0.5, 0.3, 0.2),
                           spread[name], curl=-1.0)
            for name in ("index", "middle", "ring", "pinky")]


def _default_thumb() -> FingerGeometry:
    return FingerGeometry("thumb", (0.015, -0.042), (0.035, 0.030, 0.024),
                          (0.5, 0.3, 0.2), 0.0, curl=+1.0)


@dataclass
class HandConfig:
    fingers: list[FingerGeometry] = field(default_factory=_default_fingers)
    thumb: FingerGeometry = field(default_factory=_default_thumb)
    gains: list[PidGains] = field(default_factory=lambda: [DEFAULT_GAINS] * N_MOTORS)
    spring_rate: float = SPRING_RATE

    def digit(self, name: str) -> FingerGeometry:
        if name == "thumb":
            return self.thumb
        for f in self.fingers:
            if f.name == name:
                return f
        raise KeyError(name)


@dataclass(frozen=True)
class SimObject:
    shape: str                      # sphere | cylinder | block
    radius: float                   # characteristic in-plane radius (m)
    position: tuple[float, float] = (0.065, 0.0)
    half_span_z: float | None = None  # lateral half extent; defaults by shape

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("object radius must be positive")
        if self.shape not in ("sphere", "cylinder", "block"):
            raise ValueError(f"unknown shape {self.shape!r}")

    def plane_radius(self, plane_z: float) -> float:
        """Cross-section radius in a digit plane; 0 when the plane misses."""
        if self.shape == "sphere":
            if abs(plane_z) >= self.radius:
                return 0.0
            return math.sqrt(self.radius**2 - plane_z**2)
        span = self.half_span_z
        if span is None:
            span = 1.0 if self.shape == "cylinder" else self.radius
        return self.radius if abs(plane_z) <= span else 0.0


#: Motor target angles per grasp: index, middle, ring, pinky, thumb flex,
#: thumb direction.  Derived from simulated grasp poses; config-overridable.
GRASP_SETPOINTS: dict[GraspType, tuple[float, ...]] = {
    GraspType.CYLINDRICAL: (3.6, 3.6, 3.6, 3.6, 2.6, 2.4),
    GraspType.SPHERICAL:   (3.2, 3.2, 3.2, 3.2, 2.8, 3.2),
    GraspType.HOOK:        (4.4, 4.4, 4.4, 4.4, 2.2, 0.8),
    GraspType.LATERAL:     (2.6, 0.3, 0.3, 0.3, 2.4, 0.8),
    GraspType.PINCH:       (3.0, 0.2, 0.2, 0.2, 2.4, 1.0),
    GraspType.TRIPOD:      (3.0, 3.0, 0.2, 0.2, 3.0, 3.4),
}

OPEN_SETPOINTS = (0.0,) * N_MOTORS

#: Contact predicate per grasp: digits that must touch; for precision
#: grasps the remaining fingers must stay nearly unflexed.
_REQUIRED_CONTACTS = {
    GraspType.CYLINDRICAL: ("any3", "thumb"),
    GraspType.SPHERICAL: ("any3", "thumb"),
    GraspType.HOOK: ("any3", "thumb"),
    GraspType.LATERAL: ("index", "thumb"),
    GraspType.PINCH: ("index", "thumb"),
    GraspType.TRIPOD: ("index", "middle", "thumb"),
}
_PRECISION_IDLE_LIMIT = 0.6  # rad of summed flexion that still counts as idle


def _seg_point_dist(a, b, p) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = 0.0 if den == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / den))
    cx, cy = ax + t * dx, ay + t * dy
    return math.hypot(px - cx, py - cy)


def chain_touches(geom: FingerGeometry, draw: float, obj: SimObject,
                  tilt: float = 0.0) -> bool:
    r = obj.plane_radius(geom.plane_z)
    if r <= 0.0:
        return False
    pts = geom.chain_points(draw, tilt)
    return any(_seg_point_dist(pts[i], pts[i + 1], obj.position) <= r
               for i in range(len(pts) - 1))


def contact_draw(geom: FingerGeometry, obj: SimObject, tilt: float = 0.0,
                 coarse: float = 0.05) -> float:
    """Smallest tendon draw at which the chain touches the object.

    Returns TRAVEL_MAX when the chain never reaches it (free travel).
    Bisection after a coarse scan; flexion vs penetration is monotone over
    the travel range used by the setpoint table.
    """
    if chain_touches(geom, 0.0, obj, tilt):
        return 0.0
    lo, hi = 0.0, None
    d = coarse
    while d <= TRAVEL_MAX:
        if chain_touches(geom, d, obj, tilt):
            hi = d
            break
        lo = d
        d += coarse
    if hi is None:
        return TRAVEL_MAX
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        if chain_touches(geom, mid, obj, tilt):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class HandState:
    tick: int
    motor_angles: tuple[float, ...]
    motor_velocities: tuple[float, ...]
    duties: tuple[float, ...]
    encoder_counts: tuple[int, ...]
    stalled: tuple[bool, ...]
    joint_angles: dict[str, tuple[float, float, float]]
    contacts: dict[str, bool]
    setpoints: tuple[float, ...]

    def contact_count(self) -> int:
        return sum(self.contacts.values())


class HandSim:
    """Six motors plus finger chains; step physics at 1 kHz, control at 100 Hz."""

    PHYSICS_DT = 1e-3
    CONTROL_PERIOD_TICKS = 10

    def __init__(self, config: HandConfig | None = None,
                 obj: SimObject | None = None):
        self.config = config or HandConfig()
        self.object = obj
        self.motors = [MotorState() for _ in range(N_MOTORS)]
        self.pids = [PidState() for _ in range(N_MOTORS)]
        self.setpoints = list(OPEN_SETPOINTS)
        self.tick = 0
        self._contact_cache: dict = {}

    # digit index i uses motor i; motor 4 flexes the thumb, motor 5 aims it
    def _digits(self):
        return list(self.config.fingers) + [self.config.thumb]

    def set_object(self, obj: SimObject | None) -> None:
        self.object = obj
        self._contact_cache.clear()

    def set_setpoints(self, setpoints) -> None:
        if len(setpoints) != N_MOTORS:
            raise ValueError(f"need {N_MOTORS} setpoints")
        lo, hi = 0.0, TRAVEL_MAX
        if not all(lo <= s <= hi for s in setpoints):
            raise ValueError("setpoints outside motor travel")
        self.setpoints = list(setpoints)

    def thumb_tilt(self) -> float:
        return self.motors[5].angle * DIRECTION_GAIN

    def _contact_limit(self, digit_index: int) -> float:
        if self.object is None:
            return TRAVEL_MAX
        geom = self._digits()[digit_index]
        tilt = 0.0
        if geom.name == "thumb":
            # quantize the tilt so the cache stays effective while it moves
            tilt = round(self.thumb_tilt() / 0.02) * 0.02
        key = (digit_index, tilt)
        if key not in self._contact_cache:
            self._contact_cache[key] = contact_draw(geom, self.object, tilt)
        return self._contact_cache[key]

    def control_step(self) -> None:
        for i in range(N_MOTORS):
            duty = pid_step(self.config.gains[i], self.pids[i],
                            encoder_angle(self.motors[i]), self.setpoints[i],
                            self.CONTROL_PERIOD_TICKS * self.PHYSICS_DT)
            self.motors[i] = replace(self.motors[i], duty=duty)

    def physics_step(self) -> None:
        for i in range(N_MOTORS):
            m = self.motors[i]
            load = self.config.spring_rate * m.angle
            if m.angle > 1e-6:
                load += SPRING_PRELOAD
            limit = self._contact_limit(i) if i < 5 else TRAVEL_MAX
            if m.angle >= limit and m.duty >= 0.0:
                load = CONTACT_TORQUE
            stepped = motor_step(m, m.duty, load, self.PHYSICS_DT)
            if stepped.angle > limit:
                stepped = replace(stepped, angle=limit, velocity=0.0,
                                  encoder_count=int(round(limit / COUNT_RADIANS)))
            self.motors[i] = stepped
        self.tick += 1

    def step(self, tick: int | None = None) -> None:
        """One 1 ms step; runs the control law every 10th step."""
        t = self.tick if tick is None else tick
        if t % self.CONTROL_PERIOD_TICKS == 0:
            self.control_step()
        self.physics_step()

    def contacts(self) -> dict[str, bool]:
        out = {}
        for i, geom in enumerate(self._digits()):
            limit = self._contact_limit(i)
            out[geom.name] = bool(limit < TRAVEL_MAX
                                  and self.motors[i].angle >= limit - 1e-6)
        return out

    def snapshot(self) -> HandState:
        digits = self._digits()
        tilt = self.thumb_tilt()
        joints = {}
        for i, geom in enumerate(digits):
            limit = self._contact_limit(i)
            joints[geom.name] = geom.joint_angles(min(self.motors[i].angle, limit))
        return HandState(
            tick=self.tick,
            motor_angles=tuple(m.angle for m in self.motors),
            motor_velocities=tuple(m.velocity for m in self.motors),
            duties=tuple(m.duty for m in self.motors),
            encoder_counts=tuple(m.encoder_count for m in self.motors),
            stalled=tuple(m.stalled for m in self.motors),
            joint_angles=joints,
            contacts=self.contacts(),
            setpoints=tuple(self.setpoints),
        )

    def settled(self, band: float = 0.02) -> bool:
        """All motors at setpoint (within band or stalled) and quiet."""
        for i, m in enumerate(self.motors):
            tol = max(band * abs(self.setpoints[i]), 0.015)
            if abs(m.velocity) > 0.05:
                return False
            if abs(self.setpoints[i] - m.angle) > tol and not m.stalled:
                return False
        return True


def hand_step(sim: HandSim, setpoints, obj: SimObject | None, dt: float = 1e-3) -> HandState:
    """Single-op form: apply setpoints/object, advance one step, snapshot."""
    if obj is not sim.object:
        sim.set_object(obj)
    sim.set_setpoints(setpoints)
    sim.step()
    return sim.snapshot()


@dataclass(frozen=True)
class GraspOutcome:
    success: bool
    contact_count: int
    settle_ticks: int
    contacts: dict[str, bool]


def _predicate(grasp: GraspType, contacts: dict[str, bool], sim: HandSim) -> bool:
    required = _REQUIRED_CONTACTS[grasp]
    fingers_touching = sum(contacts[f] for f in ("index", "middle", "ring", "pinky"))
    for term in required:
        if term == "any3":
            if fingers_touching < 3:
                return False
        elif not contacts[term]:
            return False
    if grasp in (GraspType.PINCH, GraspType.TRIPOD):
        required_names = set(required) - {"any3"}
        for i, geom in enumerate(sim.config.fingers):
            if geom.name not in required_names:
                total = sum(geom.joint_angles(sim.motors[i].angle))
                if total > _PRECISION_IDLE_LIMIT:
                    return False
    return True


def execute_grasp(grasp: GraspType, obj: SimObject | None,
                  config: HandConfig | None = None,
                  timeout_s: float = 3.0) -> GraspOutcome:
    """Close from an open hand onto the object and report the outcome.

    Runs the 100 Hz control / 1 kHz physics loop until the hand settles or
    the timeout ends it; a timeout is a failure outcome, not an error.
    """
    sim = HandSim(config, obj)
    sim.set_setpoints(GRASP_SETPOINTS[grasp])
    max_ticks = int(timeout_s / HandSim.PHYSICS_DT)
    settle_tick = None
    quiet = 0
    for t in range(max_ticks):
        sim.step(t)
        if sim.settled():
            quiet += 1
            if quiet >= 100:  # hold the settled state for 100 ms
                settle_tick = t
                break
        else:
            quiet = 0
    contacts = sim.contacts()
    if settle_tick is None:
        return GraspOutcome(False, sum(contacts.values()), max_ticks, contacts)
    success = obj is not None and _predicate(grasp, contacts, sim)
    return GraspOutcome(success, sum(contacts.values()), settle_tick, contacts)


#: Canonical simulated objects for the seven vision classes.
_OBJECT_TABLE = {
    "apple": ("sphere", 0.038),
    "cup": ("cylinder", 0.030),
    "pitcher": ("cylinder", 0.030),   # the grasped handle bar
    "box": ("block", 0.020),
    "spoon": ("cylinder", 0.008),
    "dice": ("block", 0.010),
    "banana": ("cylinder", 0.015),
}


def object_for_class(name: str) -> SimObject:
    shape, radius = _OBJECT_TABLE[name]
    half = 0.012 if shape == "block" else None
    return SimObject(shape, radius, half_span_z=half)
