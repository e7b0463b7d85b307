"""Shared action vocabulary: the six-grasp taxonomy and hand commands."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class GraspType(enum.Enum):
    """The six grasp shapes the hand can execute.

    Order matters: it is the classifier's output order and the index used
    everywhere a grasp is referred to by position.
    """

    CYLINDRICAL = "cylindrical"
    SPHERICAL = "spherical"
    HOOK = "hook"
    LATERAL = "lateral"
    PINCH = "pinch"
    TRIPOD = "tripod"

    @property
    def index(self) -> int:
        return list(GraspType).index(self)

    @classmethod
    def from_name(cls, name: str) -> "GraspType":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown grasp type: {name!r}") from None


POWER_GRASPS = (GraspType.CYLINDRICAL, GraspType.SPHERICAL, GraspType.HOOK)
PRECISION_GRASPS = (GraspType.LATERAL, GraspType.PINCH, GraspType.TRIPOD)


class ActionKind(enum.Enum):
    GRASP = "grasp"
    OPEN_HAND = "open_hand"
    CLOSE_HAND = "close_hand"
    STOP_HAND = "stop_hand"


@dataclass(frozen=True)
class HandAction:
    """A command the hand controller can act on.

    GRASP actions carry the grasp shape; the other kinds stand alone.
    """

    kind: ActionKind
    grasp: GraspType | None = None

    def __post_init__(self):
        if self.kind is ActionKind.GRASP and self.grasp is None:
            raise ValueError("grasp action requires a grasp type")
        if self.kind is not ActionKind.GRASP and self.grasp is not None:
            raise ValueError(f"{self.kind.value} action takes no grasp type")

    @property
    def name(self) -> str:
        if self.kind is ActionKind.GRASP:
            return f"grasp:{self.grasp.value}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "HandAction":
        text = text.strip().lower()
        if text.startswith("grasp:"):
            return cls(ActionKind.GRASP, GraspType.from_name(text[6:]))
        try:
            return cls(ActionKind(text))
        except ValueError:
            raise ValueError(f"unknown hand action: {text!r}") from None

    def __str__(self) -> str:
        return self.name


def grasp_action(grasp: GraspType) -> HandAction:
    return HandAction(ActionKind.GRASP, grasp)


OPEN_HAND = HandAction(ActionKind.OPEN_HAND)
CLOSE_HAND = HandAction(ActionKind.CLOSE_HAND)
STOP_HAND = HandAction(ActionKind.STOP_HAND)

#: The grounding space for language understanding: six grasps plus the
#: three bare hand commands.
GROUNDINGS: tuple[HandAction, ...] = tuple(
    [grasp_action(g) for g in GraspType] + [OPEN_HAND, CLOSE_HAND, STOP_HAND]
)
