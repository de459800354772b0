"""Guard-time steering circuit: RC integrator, code latch, and StD pulse.

While the detector's early-steering flag (ESt) holds, an RC node charges
toward the supply; if it crosses the comparator threshold the candidate
key's 4-bit code is latched and StD pulses for one step. Tone dropouts
discharge the node, so only tones that persist for the full guard time
ever register. The latch keeps its last code between digits, which is
what lets the vehicle hold its last command after a tone ends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .detector import DetectorConfig, SignalCondition
from .tones import CodeMode, Nibble, key_to_code


@dataclass(frozen=True)
class SteeringConfig:
    r_ohms: float = 330e3
    c_farads: float = 0.1e-6
    vdd: float = 5.0
    v_threshold: float = 2.5
    # Tone-absent time before the latch re-arms for the next digit.
    # None means "same as the guard time" (symmetric charge/discharge).
    t_gta: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("r_ohms", "c_farads", "vdd", "v_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.v_threshold >= self.vdd:
            raise ValueError("v_threshold must be below vdd")
        if self.t_gta is not None and self.t_gta <= 0:
            raise ValueError("t_gta must be positive")

    @property
    def time_constant_s(self) -> float:
        return self.r_ohms * self.c_farads

    def rearm_time_s(self) -> float:
        return self.t_gta if self.t_gta is not None else guard_time(self)


def guard_time(config: SteeringConfig) -> float:
    """Seconds of continuous tone needed to charge from 0 V to the threshold.

    RC * ln(vdd / (vdd - v_threshold)); RC * ln 2 at the vdd/2 default.
    """
    tau = config.time_constant_s
    return tau * math.log(config.vdd / (config.vdd - config.v_threshold))


def t_rec(
    detector_config: DetectorConfig,
    steering_config: SteeringConfig,
    frame_len_seconds: float,
) -> float:
    """Predicted tone onset -> latch time: detect time plus guard time."""
    t_dp = detector_config.confirm_frames * frame_len_seconds
    return t_dp + guard_time(steering_config)


@dataclass(frozen=True)
class SteeringState:
    vc: float = 0.0                      # capacitor voltage
    latched: Optional[Nibble] = None     # output register, persists between digits
    std_high: bool = False
    current_candidate: Optional[str] = None
    armed: bool = True                   # ready to fire the next StD edge
    inactive_s: float = 0.0              # accumulated tone-absent time
    clock_s: float = 0.0
    run_started_s: float = 0.0           # when the current candidate's run began


@dataclass(frozen=True)
class ReceiverOutput:
    latched_code: Optional[Nibble]
    std_rising_edge: bool
    # Tone onset -> latch, only on an edge. Includes the caller-supplied
    # detect delay (tDP); the steering itself only sees post-detection time.
    t_rec_measured: Optional[float] = None


def step(
    state: SteeringState,
    cond: SignalCondition,
    code_mode: CodeMode,
    dt: float,
    config: SteeringConfig,
    detect_delay_s: float = 0.0,
) -> tuple[SteeringState, ReceiverOutput]:
    """Advance the RC machine by dt given one frame's signal condition.

    dt must not exceed a quarter of the guard time, or the integration is
    too coarse to honor the timing contract.
    """
    guard = guard_time(config)
    if not 0 < dt <= guard / 4 + 1e-12:
        raise ValueError(f"dt must be in (0, guard_time/4 = {guard / 4:.6g}] s")

    tau = config.time_constant_s
    decay = math.exp(-dt / tau)
    vc = state.vc
    candidate = state.current_candidate
    armed = state.armed
    inactive_s = state.inactive_s
    run_started = state.run_started_s
    clock = state.clock_s + dt

    if cond.est_active:
        if candidate != cond.candidate:
            if candidate is not None:
                vc = 0.0  # candidate switched mid-charge: start the check over
            candidate = cond.candidate
            run_started = state.clock_s
        vc = config.vdd + (vc - config.vdd) * decay
        inactive_s = 0.0
    else:
        candidate = None
        vc = vc * decay
        inactive_s += dt
        if inactive_s >= config.rearm_time_s():
            armed = True

    latched = state.latched
    edge = False
    t_rec_measured = None
    crossed_up = state.vc < config.v_threshold <= vc
    if crossed_up and armed and candidate is not None:
        latched = key_to_code(candidate, code_mode)
        edge = True
        armed = False
        t_rec_measured = (clock - run_started) + detect_delay_s

    new_state = replace(
        state,
        vc=vc,
        latched=latched,
        std_high=vc >= config.v_threshold and latched is not None,
        current_candidate=candidate,
        armed=armed,
        inactive_s=inactive_s,
        clock_s=clock,
        run_started_s=run_started,
    )
    return new_state, ReceiverOutput(latched, edge, t_rec_measured)


class SteeringMachine:
    """Stateful convenience wrapper used by the engine and the decoder CLI."""

    def __init__(
        self,
        config: SteeringConfig,
        code_mode: CodeMode = CodeMode.PAPER,
        detect_delay_s: float = 0.0,
    ):
        self.config = config
        self.code_mode = code_mode
        self.detect_delay_s = detect_delay_s
        self.state = SteeringState()

    def push(self, cond: SignalCondition, dt: float) -> ReceiverOutput:
        """Advance by dt, sub-stepping so each internal step obeys the dt bound."""
        n_sub = max(1, math.ceil(4 * dt / guard_time(self.config)))
        out = ReceiverOutput(self.state.latched, False)
        edge = False
        t_rec_measured = None
        for _ in range(n_sub):
            self.state, out = step(
                self.state, cond, self.code_mode, dt / n_sub, self.config,
                self.detect_delay_s,
            )
            if out.std_rising_edge:
                edge = True
                t_rec_measured = out.t_rec_measured
        return ReceiverOutput(self.state.latched, edge, t_rec_measured)
