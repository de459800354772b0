"""Differential-drive pose integration with exact circular arcs.

The four-wheel skid-steer platform is approximated as two tracks at a
fixed speed magnitude; each tick moves the pose along the exact arc for
the current track speeds, so step size is a resolution choice rather
than an accuracy knob.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .driver import DriveState, MotorAction


@dataclass(frozen=True)
class VehicleParams:
    v0: float = 0.5           # track speed magnitude, m/s
    track_width: float = 0.15  # distance between track centerlines, m

    def __post_init__(self) -> None:
        if self.v0 <= 0 or self.track_width <= 0:
            raise ValueError("v0 and track_width must be positive")


@dataclass(frozen=True)
class VehiclePose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0  # heading, radians CCW from +x, normalized to (-pi, pi]


def _normalize_angle(theta: float) -> float:
    wrapped = math.fmod(theta + math.pi, 2 * math.pi)
    if wrapped <= 0:
        wrapped += 2 * math.pi
    return wrapped - math.pi


_SPEED = {MotorAction.FORWARD: 1.0, MotorAction.REVERSE: -1.0, MotorAction.STOP: 0.0}


def track_speeds(state: DriveState, params: VehicleParams) -> tuple[float, float]:
    """(v_left, v_right) in m/s for the current motor actions."""
    return _SPEED[state.left] * params.v0, _SPEED[state.right] * params.v0


def step_pose(
    pose: VehiclePose, state: DriveState, params: VehicleParams, dt: float
) -> VehiclePose:
    """Advance the pose by dt along the exact arc for the current speeds."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v_left, v_right = track_speeds(state, params)
    v = (v_left + v_right) / 2
    omega = (v_right - v_left) / params.track_width
    if omega == 0.0:
        return VehiclePose(
            pose.x + v * dt * math.cos(pose.theta),
            pose.y + v * dt * math.sin(pose.theta),
            pose.theta,
        )
    # Rotate about the instantaneous center at radius v/omega.
    radius = v / omega
    icc_x = pose.x - radius * math.sin(pose.theta)
    icc_y = pose.y + radius * math.cos(pose.theta)
    theta = pose.theta + omega * dt
    return VehiclePose(
        icc_x + radius * math.sin(theta),
        icc_y - radius * math.cos(theta),
        _normalize_angle(theta),
    )
