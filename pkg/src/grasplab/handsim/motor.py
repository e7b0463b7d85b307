"""Gear-motor surrogate: first-order speed dynamics bounded by the 130 RPM
no-load rating, quadrature encoder counts, and PID duty-cycle control.

Sign convention: positive rotation draws the tendon (flexion).
load_torque opposes flexion; small positive loads (the return springs)
back-drive an unpowered motor toward open, while a contact-scale load
stalls it outright.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

NO_LOAD_SPEED = 13.61        # rad/s, 130 RPM
COUNTS_PER_REV = 1200        # quadrature counts per output revolution
STALL_TORQUE = 0.8           # N*m at the output shaft
TRAVEL_MAX = 5.5             # rad of usable tendon travel
VEL_TAU = 0.05               # s, velocity relaxation constant
CONTACT_TORQUE = 5.0         # N*m, reactive torque of a blocked chain
_STALL_FLOOR = 0.5 * STALL_TORQUE  # spring loads never reach this

COUNT_RADIANS = 2.0 * math.pi / COUNTS_PER_REV


@dataclass(frozen=True)
class MotorState:
    angle: float = 0.0
    velocity: float = 0.0
    duty: float = 0.0
    encoder_count: int = 0
    stalled: bool = False


def encoder_angle(state: MotorState) -> float:
    """Angle as the controller sees it, quantized to encoder counts."""
    return state.encoder_count * COUNT_RADIANS


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float = 0.0
    kd: float = 0.0
    integral_clamp: float = 0.5
    out_lo: float = -1.0
    out_hi: float = 1.0

    def __post_init__(self):
        if min(self.kp, self.ki, self.kd) < 0:
            raise ValueError("PID gains must be non-negative")


DEFAULT_GAINS = PidGains(kp=1.3, ki=1.0, kd=0.04, integral_clamp=0.25)


@dataclass
class PidState:
    integral: float = 0.0
    prev_error: float | None = None


def pid_step(gains: PidGains, pid: PidState, measured: float,
             setpoint: float, dt: float) -> float:
    """One PID update; returns the duty cycle in [out_lo, out_hi].

    Anti-windup by clamping the integral term.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    error = setpoint - measured
    pid.integral = _clamp(pid.integral + error * dt,
                          -gains.integral_clamp, gains.integral_clamp)
    derivative = 0.0 if pid.prev_error is None else (error - pid.prev_error) / dt
    pid.prev_error = error
    duty = gains.kp * error + gains.ki * pid.integral + gains.kd * derivative
    return _clamp(duty, gains.out_lo, gains.out_hi)


def _clamp(v, lo, hi):
    return lo if v < lo else hi if v > hi else v


def motor_step(state: MotorState, duty: float, load_torque: float = 0.0,
               dt: float = 1e-3) -> MotorState:
    """Advance the motor one physics step (dt nominally 1 ms).

    The motor stalls (velocity zero, angle frozen) when an opposing load of
    contact magnitude meets or exceeds the available torque; lighter loads
    shift the equilibrium speed, which is how springs re-open an unpowered
    hand.
    """
    duty = _clamp(duty, -1.0, 1.0)
    available = duty * STALL_TORQUE
    stalled = (load_torque >= abs(available)
               and load_torque > _STALL_FLOOR
               and duty >= 0.0)
    if stalled:
        velocity = 0.0
        angle = state.angle
    else:
        v_target = _clamp((available - load_torque) / STALL_TORQUE,
                          -1.0, 1.0) * NO_LOAD_SPEED
        velocity = state.velocity + (v_target - state.velocity) * (dt / VEL_TAU)
        angle = state.angle + velocity * dt
        if angle <= 0.0:
            angle, velocity = 0.0, 0.0
        elif angle >= TRAVEL_MAX:
            angle, velocity = TRAVEL_MAX, 0.0
    return MotorState(
        angle=angle,
        velocity=velocity,
        duty=duty,
        encoder_count=int(round(angle / COUNT_RADIANS)),
        stalled=stalled,
    )
