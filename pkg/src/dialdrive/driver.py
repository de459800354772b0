"""L293D-style quad half-H driver: truth table and motor semantics.

The decoder's latched nibble wires straight into IN1..IN4 (Q1->IN1 and so
on, both enables tied high, no controller in between). Each motor hangs
across one driver pair; equal terminals mean no potential difference and
a stopped motor. The two motors are wired with mirrored polarity, the
unique assignment under identity wiring that reproduces the observed
left/right/forward/reverse behavior.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .tones import Nibble


class MotorAction(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    STOP = "stop"


class Motion(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    LEFT = "left"
    RIGHT = "right"
    STOP = "stop"
    SPIN_LEFT = "spin_left"    # tracks opposed: left back, right ahead
    SPIN_RIGHT = "spin_right"  # tracks opposed: left ahead, right back
    MIXED = "mixed"            # one track reversing alone


@dataclass(frozen=True)
class DriverInputs:
    in1: int
    in2: int
    in3: int
    in4: int
    en1: int = 1
    en2: int = 1

    def __post_init__(self) -> None:
        for name in ("in1", "in2", "in3", "in4", "en1", "en2"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be a logic level 0 or 1")


@dataclass(frozen=True)
class DriveState:
    left: MotorAction
    right: MotorAction


@dataclass(frozen=True)
class ElectricalConstants:
    """Logic and motor rail voltages as measured at the output pins."""

    v_high_decoder: float = 4.80
    v_low_decoder: float = 0.09
    v_motor_moving: float = 4.80
    v_motor_rest: float = 0.09

    def __post_init__(self) -> None:
        if self.v_low_decoder >= self.v_high_decoder:
            raise ValueError("decoder low level must sit below high level")
        if min(self.v_low_decoder, self.v_motor_rest, self.v_motor_moving) < 0:
            raise ValueError("voltages must be non-negative")


# The controller-path variant of the same receiver measures softer rails.
MICROCONTROLLER_CONSTANTS = ElectricalConstants(
    v_high_decoder=4.80, v_low_decoder=0.09, v_motor_moving=4.20, v_motor_rest=0.01
)


def wire(nibble: Nibble, en1: int = 1, en2: int = 1) -> DriverInputs:
    """Identity wiring from decoder outputs to driver inputs (Q1->IN1 ... Q4->IN4)."""
    return DriverInputs(nibble.q1, nibble.q2, nibble.q3, nibble.q4, en1, en2)


def motor_action(in_a: int, in_b: int, en: int, forward_polarity: str) -> MotorAction:
    """One motor across a driver pair: direction from the asserted terminal.

    forward_polarity is "AB" (forward when in_a=1, in_b=0) or "BA" (the
    mirrored motor). A disabled driver or equal terminals mean Stop.
    """
    if forward_polarity not in ("AB", "BA"):
        raise ValueError("forward_polarity must be 'AB' or 'BA'")
    if en == 0 or in_a == in_b:
        return MotorAction.STOP
    asserted = "AB" if (in_a, in_b) == (1, 0) else "BA"
    return MotorAction.FORWARD if asserted == forward_polarity else MotorAction.REVERSE


def drive_state(nibble: Nibble, en1: int = 1, en2: int = 1) -> DriveState:
    """Left motor from (IN1, IN2) mirrored, right motor from (IN3, IN4)."""
    inputs = wire(nibble, en1, en2)
    left = motor_action(inputs.in1, inputs.in2, inputs.en1, "BA")
    right = motor_action(inputs.in3, inputs.in4, inputs.en2, "AB")
    return DriveState(left, right)


_MOTION_TABLE = {
    (MotorAction.FORWARD, MotorAction.FORWARD): Motion.FORWARD,
    (MotorAction.REVERSE, MotorAction.REVERSE): Motion.REVERSE,
    (MotorAction.STOP, MotorAction.FORWARD): Motion.LEFT,
    (MotorAction.FORWARD, MotorAction.STOP): Motion.RIGHT,
    (MotorAction.STOP, MotorAction.STOP): Motion.STOP,
    (MotorAction.FORWARD, MotorAction.REVERSE): Motion.SPIN_RIGHT,
    (MotorAction.REVERSE, MotorAction.FORWARD): Motion.SPIN_LEFT,
    (MotorAction.REVERSE, MotorAction.STOP): Motion.MIXED,
    (MotorAction.STOP, MotorAction.REVERSE): Motion.MIXED,
}


def resultant_motion(state: DriveState) -> Motion:
    """Vehicle-level label for a (left, right) action pair."""
    return _MOTION_TABLE[(state.left, state.right)]


def motor_voltage(action: MotorAction, constants: ElectricalConstants) -> float:
    """Terminal voltage across one motor; sign follows direction."""
    if action is MotorAction.FORWARD:
        return constants.v_motor_moving
    if action is MotorAction.REVERSE:
        return -constants.v_motor_moving
    return constants.v_motor_rest
