"""MT8870-style tone detection: Goertzel filter bank plus validity checks.

The chip's switched-capacitor band-split filters and comparators are
emulated per analysis frame: each grid frequency gets a small bank of
single-bin Goertzel evaluations covering its acceptance band, and a key
is reported only when one row tone and one column tone clearly dominate
their groups with a sane level twist. A short confirmation run of
agreeing frames plays the comparator-hysteresis role before the early
steering flag (ESt) asserts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional

import numpy as np

from .tones import COL_FREQS_HZ, KEYPAD_GRID, ROW_FREQS_HZ, AudioFrame

GRID_FREQS_HZ = ROW_FREQS_HZ + COL_FREQS_HZ

MIN_FRAME_DURATION_S = 0.010


@dataclass(frozen=True)
class DetectorConfig:
    frame_len: int = 160             # 20 ms at 8 kHz
    energy_floor: float = 1e-4       # per-tone presence threshold, about -40 dBFS
    twist_limit_db: float = 8.0      # max |column - row| level difference
    accept_bandwidth_hz: float = 50.0  # half-width of each grid filter's passband
    confirm_frames: int = 2          # agreeing frames before ESt asserts
    dominance_ratio: float = 1.8     # winner vs sum of its group's other three

    def __post_init__(self) -> None:
        if self.frame_len < 2:
            raise ValueError("frame_len too small")
        if self.energy_floor <= 0:
            raise ValueError("energy_floor must be positive")
        if self.twist_limit_db <= 0:
            raise ValueError("twist_limit_db must be positive")
        if self.accept_bandwidth_hz <= 0:
            raise ValueError("accept_bandwidth_hz must be positive")
        if self.confirm_frames < 1:
            raise ValueError("confirm_frames must be at least 1")
        if self.dominance_ratio <= 0:
            raise ValueError("dominance_ratio must be positive")

    @classmethod
    def for_sample_rate(cls, sample_rate_hz: int, **overrides) -> "DetectorConfig":
        """Defaults with the frame length rescaled to keep a 20 ms frame."""
        overrides.setdefault("frame_len", max(2, round(0.020 * sample_rate_hz)))
        return cls(**overrides)


@dataclass(frozen=True)
class ToneMetrics:
    """Per-frame energies of the eight grid filters and the group winners."""

    row_energies: tuple[float, float, float, float]
    col_energies: tuple[float, float, float, float]
    best_row: int
    best_col: int
    twist_db: float


@dataclass(frozen=True)
class SignalCondition:
    """One frame's decoder verdict: ESt state plus the candidate key."""

    est_active: bool
    candidate: Optional[str]
    metrics: ToneMetrics

    def __post_init__(self) -> None:
        if self.est_active != (self.candidate is not None):
            raise ValueError("candidate must be present exactly when ESt is active")


def goertzel_energy(frame: AudioFrame, target_hz: float) -> float:
    """Squared magnitude of the single-bin transform at target_hz.

    Normalized by frame_len**2, so a full-scale sinusoid sitting exactly on
    target_hz yields 0.25 regardless of frame length. Accepts arbitrary
    (non-bin-aligned) frequencies.
    """
    n = len(frame)
    if n < 2:
        raise ValueError("frame too short for spectral analysis")
    if not 0 < target_hz < frame.sample_rate_hz / 2:
        raise ValueError(
            f"target {target_hz} Hz outside (0, {frame.sample_rate_hz / 2}) Hz"
        )
    omega = 2 * math.pi * target_hz / frame.sample_rate_hz
    coeff = 2 * math.cos(omega)
    s1 = 0.0
    s2 = 0.0
    for x in frame.samples:
        s1, s2 = x + coeff * s1 - s2, s1
    power = s1 * s1 + s2 * s2 - coeff * s1 * s2
    return power / (n * n)


@lru_cache(maxsize=16)
def _filter_bank(sample_rate_hz: int, frame_len: int, bandwidth_hz: float):
    """Evaluation grid for the eight tone filters.

    Each grid frequency is probed at its nominal value plus every DFT bin
    of the frame whose center lies inside the acceptance band; the filter's
    output is the max energy over those points. Bin quantization matters:
    it is what lets a tone a few percent low still ring the correct filter
    hardest, the way the deviation-tolerant chip behaves.
    """
    if frame_len / sample_rate_hz < MIN_FRAME_DURATION_S:
        raise ValueError(
            f"frame of {frame_len} samples at {sample_rate_hz} Hz is shorter "
            f"than {MIN_FRAME_DURATION_S * 1000:.0f} ms"
        )
    bin_hz = sample_rate_hz / frame_len
    slices = []
    points: list[float] = []
    for g in GRID_FREQS_HZ:
        start = len(points)
        freqs = {g}
        k_lo = math.ceil((g - bandwidth_hz) / bin_hz)
        k_hi = math.floor((g + bandwidth_hz) / bin_hz)
        for k in range(max(k_lo, 1), k_hi + 1):
            f = k * bin_hz
            if f < sample_rate_hz / 2:
                freqs.add(f)
        points.extend(sorted(freqs))
        slices.append((start, len(points)))
    n = np.arange(frame_len)
    angles = 2 * math.pi * np.outer(points, n) / sample_rate_hz
    kernel = np.exp(-1j * angles)
    return kernel, tuple(slices)


def analyze_frame(frame: AudioFrame, config: DetectorConfig) -> ToneMetrics:
    """Run the eight-filter bank over one frame and pick the group winners."""
    if len(frame) != config.frame_len:
        raise ValueError(f"expected {config.frame_len} samples, got {len(frame)}")
    kernel, slices = _filter_bank(
        frame.sample_rate_hz, config.frame_len, config.accept_bandwidth_hz
    )
    spectrum = kernel @ frame.samples
    energies = (spectrum.real**2 + spectrum.imag**2) / (config.frame_len**2)
    filt = [float(energies[a:b].max()) for a, b in slices]
    rows = tuple(filt[:4])
    cols = tuple(filt[4:])
    best_row = int(np.argmax(rows))
    best_col = int(np.argmax(cols))
    # Guard the log for the all-silence frame.
    tiny = 1e-300
    twist_db = 10 * math.log10((cols[best_col] + tiny) / (rows[best_row] + tiny))
    return ToneMetrics(rows, cols, best_row, best_col, twist_db)


def validate(metrics: ToneMetrics, config: DetectorConfig) -> Optional[str]:
    """Return the key for this frame if it holds a believable tone pair.

    Requires both group winners above the energy floor, twist inside the
    limit, and each winner dominating the sum of its group's other three
    filters (the talk-off guard).
    """
    row_e = metrics.row_energies[metrics.best_row]
    col_e = metrics.col_energies[metrics.best_col]
    if row_e < config.energy_floor or col_e < config.energy_floor:
        return None
    if abs(metrics.twist_db) > config.twist_limit_db:
        return None
    row_rest = sum(metrics.row_energies) - row_e
    col_rest = sum(metrics.col_energies) - col_e
    if row_e < config.dominance_ratio * row_rest:
        return None
    if col_e < config.dominance_ratio * col_rest:
        return None
    return KEYPAD_GRID[metrics.best_row][metrics.best_col]


class StreamDetector:
    """Frame-stream wrapper holding the ESt confirmation state.

    One instance per audio stream; instances are independent. ESt asserts
    only after config.confirm_frames consecutive frames validate to the
    same key, and drops on the first frame that disagrees.
    """

    def __init__(self, config: DetectorConfig):
        self.config = config
        self._run_key: Optional[str] = None
        self._run_length = 0

    def push(self, frame: AudioFrame) -> SignalCondition:
        metrics = analyze_frame(frame, self.config)
        key = validate(metrics, self.config)
        if key is None:
            self._run_key = None
            self._run_length = 0
        elif key == self._run_key:
            self._run_length += 1
        else:
            self._run_key = key
            self._run_length = 1
        est = self._run_length >= self.config.confirm_frames
        return SignalCondition(est, self._run_key if est else None, metrics)


def process_stream(
    frames: Iterable[AudioFrame], config: DetectorConfig
) -> Iterator[SignalCondition]:
    """Run the confirmation state machine over a frame sequence."""
    stream = StreamDetector(config)
    for frame in frames:
        yield stream.push(frame)


def frames_from_audio(audio: AudioFrame, frame_len: int) -> Iterator[AudioFrame]:
    """Split audio into consecutive analysis frames; the tail remainder is dropped."""
    for start in range(0, len(audio) - frame_len + 1, frame_len):
        yield AudioFrame(audio.samples[start : start + frame_len], audio.sample_rate_hz)
