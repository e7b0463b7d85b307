"""grasplab: a desk-scale adaptive grasping sandbox.

Synthetic camera and muscle-signal sources feed a retrainable grasp
classifier; typed text commands are grounded through a chart parser and a
correspondence graph; a PID-controlled tendon hand executes the grasps;
and a pub/sub bus ties the loop together, operable from a browser UI.
"""
from .actions import (ActionKind, GraspType, HandAction, GROUNDINGS,
                      OPEN_HAND, CLOSE_HAND, STOP_HAND, grasp_action)

__version__ = "0.1.0"

__all__ = [
    "ActionKind", "GraspType", "HandAction", "GROUNDINGS",
    "OPEN_HAND", "CLOSE_HAND", "STOP_HAND", "grasp_action",
    "__version__",
]
