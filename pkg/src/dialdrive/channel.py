"""Lossy voice-channel model and the call-session state machine.

The radio link is treated as an opaque mono audio path with a few
impairment knobs: level change, playback-rate (frequency) offset,
additive white noise pinned to the frame's own power, and whole-frame
dropouts. The session machine models dial, single-ring auto-answer, and
hangup; audio is only carried while the call is connected.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .tones import AudioFrame


class ProtocolError(Exception):
    """Raised for call-session transitions that make no sense."""


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float = math.inf        # additive noise relative to frame power
    freq_offset_ratio: float = 1.0  # multiplicative frequency scaling
    gain_db: float = 0.0
    latency_s: float = 0.080        # applied by the engine's delay queue
    dropout_rate: float = 0.0       # probability a frame arrives silenced
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.dropout_rate <= 1:
            raise ValueError("dropout_rate must be in [0, 1]")
        if self.latency_s < 0:
            raise ValueError("latency must be non-negative")
        if self.freq_offset_ratio <= 0:
            raise ValueError("freq_offset_ratio must be positive")

    @property
    def is_clean(self) -> bool:
        return (
            math.isinf(self.snr_db)
            and self.freq_offset_ratio == 1.0
            and self.gain_db == 0.0
            and self.dropout_rate == 0.0
        )


def _resample(samples: np.ndarray, ratio: float, start_pos: float = 0.0) -> np.ndarray:
    """Read len(samples) points at stride `ratio`, scaling frequencies by it."""
    positions = start_pos + np.arange(len(samples)) * ratio
    return np.interp(positions, np.arange(len(samples)), samples)


def transmit(
    frame: AudioFrame, config: ChannelConfig, rng: np.random.Generator
) -> AudioFrame:
    """Impair one frame: gain, frequency scaling, noise, dropout, in that order.

    The RNG consumes the same draws for every frame regardless of
    content, so a stream stays deterministic for a given seed. A clean
    config returns the frame unchanged, bit for bit. Output is clipped
    to [-1, 1].
    """
    if config.is_clean:
        return frame
    y = frame.samples * 10 ** (config.gain_db / 20)
    if config.freq_offset_ratio != 1.0:
        y = _resample(y, config.freq_offset_ratio)
    noise = rng.normal(size=len(y))
    power = float(np.mean(y**2))
    noise_power = power * 10 ** (-config.snr_db / 10)
    y = y + noise * math.sqrt(noise_power)
    if rng.uniform() < config.dropout_rate:
        y = np.zeros_like(y)
    return AudioFrame(np.clip(y, -1.0, 1.0), frame.sample_rate_hz)


class StreamingChannel:
    """Frame-stream impairment path keeping resample phase across frames.

    transmit() restarts its read position every call, which is fine for
    one-shot audio but would put a click at every frame joint of a held
    tone. This wrapper carries the fractional read position and unread
    source tail forward. A rate mismatch makes source and sink drift; the
    backlog is resynced (oldest samples dropped) past two frames.
    """

    def __init__(self, config: ChannelConfig):
        self.config = config
        self.rng = np.random.default_rng(config.rng_seed)
        self._tail = np.zeros(0)
        self._pos = 0.0

    def push(self, frame: AudioFrame) -> AudioFrame:
        cfg = self.config
        if cfg.is_clean:
            return frame
        y = frame.samples * 10 ** (cfg.gain_db / 20)
        if cfg.freq_offset_ratio != 1.0:
            y = self._resample_continuous(y)
        noise = self.rng.normal(size=len(y))
        power = float(np.mean(y**2))
        y = y + noise * math.sqrt(power * 10 ** (-cfg.snr_db / 10))
        if self.rng.uniform() < cfg.dropout_rate:
            y = np.zeros_like(y)
        return AudioFrame(np.clip(y, -1.0, 1.0), frame.sample_rate_hz)

    def _resample_continuous(self, samples: np.ndarray) -> np.ndarray:
        n = len(samples)
        source = np.concatenate([self._tail, samples])
        positions = self._pos + np.arange(n) * self.config.freq_offset_ratio
        out = np.interp(positions, np.arange(len(source)), source)
        consumed = min(int(positions[-1] + self.config.freq_offset_ratio), len(source))
        self._tail = source[consumed:]
        self._pos = positions[-1] + self.config.freq_offset_ratio - consumed
        if len(self._tail) > 2 * n:  # rate-mismatch backlog: resync
            self._tail = self._tail[-n:]
        return out


class Phase(enum.Enum):
    IDLE = "idle"
    DIALING = "dialing"
    RINGING = "ringing"
    CONNECTED = "connected"
    ENDED = "ended"


AUTO_ANSWER_RINGS = 1  # callee answers after a single ring, unattended


@dataclass(frozen=True)
class SessionState:
    phase: Phase = Phase.IDLE
    ring_count: int = 0

    @property
    def audio_flows(self) -> bool:
        return self.phase is Phase.CONNECTED


def session_step(state: SessionState, event: str) -> SessionState:
    """Apply dial / ring_tick / hangup; invalid transitions raise ProtocolError."""
    if event == "hangup":
        return replace(state, phase=Phase.ENDED)
    if event == "dial":
        if state.phase is not Phase.IDLE:
            raise ProtocolError(f"cannot dial while {state.phase.value}")
        return SessionState(Phase.DIALING, 0)
    if event == "ring_tick":
        if state.phase not in (Phase.DIALING, Phase.RINGING):
            raise ProtocolError(f"unexpected ring while {state.phase.value}")
        rings = state.ring_count + 1
        phase = Phase.CONNECTED if rings >= AUTO_ANSWER_RINGS else Phase.RINGING
        return SessionState(phase, rings)
    raise ProtocolError(f"unknown session event: {event!r}")
