"""Physics-lite tendon hand: motors, PID duty control, finger chains,
object contact, and grasp execution."""
from .motor import (
    MotorState, PidGains, PidState, pid_step, motor_step,
    NO_LOAD_SPEED, COUNTS_PER_REV, STALL_TORQUE, TRAVEL_MAX,
    encoder_angle, DEFAULT_GAINS,
)
from .hand import (
    FingerGeometry, HandConfig, HandState, SimObject, HandSim,
    GraspOutcome, execute_grasp, hand_step, GRASP_SETPOINTS, OPEN_SETPOINTS,
    object_for_class,
)

__all__ = [
    "MotorState", "PidGains", "PidState", "pid_step", "motor_step",
    "NO_LOAD_SPEED", "COUNTS_PER_REV", "STALL_TORQUE", "TRAVEL_MAX",
    "encoder_angle", "DEFAULT_GAINS",
    "FingerGeometry", "HandConfig", "HandState", "SimObject", "HandSim",
    "GraspOutcome", "execute_grasp", "hand_step", "GRASP_SETPOINTS",
    "OPEN_SETPOINTS", "object_for_class",
]
