"""Fixed-tick simulation of the whole control chain.

Each tick carries one detector frame through the pipeline: keypad state
-> tone synthesis -> channel impairments -> transport delay -> detector
-> steering latch -> motor bridge -> pose integration, emitting one
telemetry snapshot. Everything is deterministic for a given config and
seed.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .channel import (
    ChannelConfig,
    Phase,
    SessionState,
    StreamingChannel,
    session_step,
)
from .detector import DetectorConfig, StreamDetector
from .driver import (
    DriveState,
    ElectricalConstants,
    Motion,
    MotorAction,
    drive_state,
    motor_voltage,
    resultant_motion,
)
from .kinematics import VehicleParams, VehiclePose, step_pose
from .steering import SteeringConfig, SteeringMachine
from .tones import (
    DEFAULT_AMPLITUDE,
    AudioFrame,
    CodeMode,
    Nibble,
    key_to_pair,
    normalize_key,
)

EVENT_KINDS = ("down", "up", "dial", "hangup")


@dataclass(frozen=True)
class SimEvent:
    """One scenario event: a key edge or a session action."""

    kind: str
    at: float
    key: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.at < 0:
            raise ValueError("event time must be non-negative")
        if self.kind in ("down", "up"):
            if self.key is None:
                raise ValueError(f"{self.kind} event needs a key")
            object.__setattr__(self, "key", normalize_key(self.key))
        elif self.key is not None:
            raise ValueError(f"{self.kind} event takes no key")


@dataclass(frozen=True)
class SimConfig:
    sample_rate_hz: int = 8000
    code_mode: CodeMode = CodeMode.PAPER
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    steering: SteeringConfig = field(default_factory=SteeringConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    electrical: ElectricalConstants = field(default_factory=ElectricalConstants)
    duration_limit_s: float = 600.0
    telemetry_decimation: int = 3  # live mode: emit every Nth snapshot

    @property
    def tick_s(self) -> float:
        """One detector frame per tick, by construction."""
        return self.detector.frame_len / self.sample_rate_hz


@dataclass(frozen=True)
class TelemetrySnapshot:
    t: float
    session: Phase
    est: bool
    std_edge: bool
    latched: Optional[Nibble]
    drive: DriveState
    motion: Motion
    motor_volts: tuple[float, float]
    pose: VehiclePose


_STOPPED = DriveState(MotorAction.STOP, MotorAction.STOP)


class Simulation:
    """Single-owner simulation state; commands arrive in order, one tick at a time."""

    def __init__(self, config: SimConfig, start_connected: bool = False):
        self.config = config
        self.session = SessionState()
        if start_connected:
            self.session = SessionState(Phase.CONNECTED, 1)
        self.detector = StreamDetector(config.detector)
        self.steering = SteeringMachine(
            config.steering,
            config.code_mode,
            detect_delay_s=config.detector.confirm_frames * config.tick_s,
        )
        self.channel = StreamingChannel(config.channel)
        delay_ticks = round(config.channel.latency_s / config.tick_s)
        self._delay: deque[AudioFrame] = deque(
            [self._silence_frame()] * delay_ticks
        )
        self.pose = VehiclePose()
        self.held_key: Optional[str] = None
        self._tone_offset = 0  # samples since key-down, keeps tone phase continuous
        self._ring_at_tick: Optional[int] = None
        self._tick_index = 0

    @property
    def time_s(self) -> float:
        return self._tick_index * self.config.tick_s

    def _silence_frame(self) -> AudioFrame:
        return AudioFrame(
            np.zeros(self.config.detector.frame_len), self.config.sample_rate_hz
        )

    def apply_event(self, event: SimEvent) -> None:
        """Apply a command at the current tick boundary; bad commands raise."""
        if event.kind == "down":
            if self.held_key is not None:
                raise ValueError(
                    f"key {event.key!r} pressed while {self.held_key!r} is held"
                )
            self.held_key = event.key
            self._tone_offset = 0
        elif event.kind == "up":
            if self.held_key != event.key:
                raise ValueError(f"key {event.key!r} released but not held")
            self.held_key = None
        elif event.kind == "dial":
            if self.session.phase is Phase.ENDED:
                self.session = SessionState()  # a hangup ends the call; dial anew
            self.session = session_step(self.session, "dial")
            self._ring_at_tick = self._tick_index + 1  # ring spans one tick
        else:  # hangup
            self.session = session_step(self.session, "hangup")
            self._ring_at_tick = None

    def _keypad_audio(self) -> AudioFrame:
        n = self.config.detector.frame_len
        fs = self.config.sample_rate_hz
        if self.held_key is None or not self.session.audio_flows:
            return self._silence_frame()
        pair = key_to_pair(self.held_key)
        idx = self._tone_offset + np.arange(n)
        self._tone_offset += n
        samples = DEFAULT_AMPLITUDE * (
            np.sin(2 * math.pi * pair.low_hz * idx / fs)
            + np.sin(2 * math.pi * pair.high_hz * idx / fs)
        )
        return AudioFrame(samples, fs)

    def step(self) -> TelemetrySnapshot:
        """Advance one tick and report the resulting state."""
        if (
            self._ring_at_tick is not None
            and self._tick_index >= self._ring_at_tick
            and self.session.phase in (Phase.DIALING, Phase.RINGING)
        ):
            self.session = session_step(self.session, "ring_tick")
            if self.session.phase is Phase.CONNECTED:
                self._ring_at_tick = None

        sent = self.channel.push(self._keypad_audio())
        self._delay.append(sent)
        received = self._delay.popleft()

        cond = self.detector.push(received)
        out = self.steering.push(cond, self.config.tick_s)

        latched = self.steering.state.latched
        drive = drive_state(latched) if latched is not None else _STOPPED
        volts = (
            motor_voltage(drive.left, self.config.electrical),
            motor_voltage(drive.right, self.config.electrical),
        )
        self.pose = step_pose(self.pose, drive, self.config.vehicle, self.config.tick_s)
        self._tick_index += 1
        return TelemetrySnapshot(
            t=self.time_s,
            session=self.session.phase,
            est=cond.est_active,
            std_edge=out.std_rising_edge,
            latched=latched,
            drive=drive,
            motion=resultant_motion(drive),
            motor_volts=volts,
            pose=self.pose,
        )


def validate_events(events: list[SimEvent]) -> None:
    """Reject unsorted sequences and overlapping or unmatched key presses."""
    held: Optional[str] = None
    last_at = -math.inf
    for i, ev in enumerate(events):
        if ev.at < last_at:
            raise ValueError(f"event {i}: events must be time-sorted")
        last_at = ev.at
        if ev.kind == "down":
            if held is not None:
                raise ValueError(
                    f"event {i}: key {ev.key!r} pressed while {held!r} is held"
                )
            held = ev.key
        elif ev.kind == "up":
            if held != ev.key:
                raise ValueError(f"event {i}: key {ev.key!r} released but not held")
            held = None


def run_scenario(
    events: Iterable[SimEvent],
    config: SimConfig,
    duration_s: Optional[float] = None,
) -> list[TelemetrySnapshot]:
    """Run a scripted scenario and collect one snapshot per tick.

    Scenarios without an explicit dial are auto-connected from t=0 (the
    receiver answers on the first ring, so an operator script can assume
    the call is up).
    """
    events = list(events)
    validate_events(events)
    auto_connect = not any(e.kind == "dial" for e in events)
    sim = Simulation(config, start_connected=auto_connect)

    if duration_s is None:
        last = max((e.at for e in events), default=0.0)
        duration_s = last + 1.0
    duration_s = min(duration_s, config.duration_limit_s)

    pending = deque(events)
    snapshots = []
    n_ticks = round(duration_s / config.tick_s)
    for tick in range(n_ticks):
        now = tick * config.tick_s
        while pending and pending[0].at <= now + 1e-12:
            sim.apply_event(pending.popleft())
        snapshots.append(sim.step())
    return snapshots


def live_session(
    command_batches: Iterable[list[SimEvent]],
    config: SimConfig,
    start_connected: bool = True,
) -> Iterator[TelemetrySnapshot]:
    """Interactive variant: one command batch per tick, decimated telemetry.

    Wall-clock pacing belongs to the caller (the gateway service sleeps
    between ticks); this generator owns only the per-tick semantics.
    """
    sim = Simulation(config, start_connected=start_connected)
    for i, batch in enumerate(command_batches):
        for event in batch:
            sim.apply_event(event)
        snapshot = sim.step()
        if i % max(config.telemetry_decimation, 1) == 0:
            yield snapshot


def to_csv_rows(snapshots: Iterable[TelemetrySnapshot]) -> Iterator[str]:
    """Render telemetry as CSV lines, header first.

    Floats use repr (shortest round-trip), so identical runs give
    byte-identical files.
    """
    yield (
        "t,session,est,std_edge,latched,left_action,right_action,"
        "motion,left_volts,right_volts,x,y,theta"
    )
    for s in snapshots:
        yield ",".join(
            (
                repr(s.t),
                s.session.value,
                "1" if s.est else "0",
                "1" if s.std_edge else "0",
                str(s.latched) if s.latched is not None else "",
                s.drive.left.value,
                s.drive.right.value,
                s.motion.value,
                repr(s.motor_volts[0]),
                repr(s.motor_volts[1]),
                repr(s.pose.x),
                repr(s.pose.y),
                repr(s.pose.theta),
            )
        )


def write_csv(snapshots: Iterable[TelemetrySnapshot], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in to_csv_rows(snapshots):
            fh.write(line + "\n")
