"""DTMF keypad alphabet, tone synthesis, and decoder output codes.

A keypress is the sum of one low-group (row) and one high-group (column)
sinusoid from the standard 4x4 telephone grid. The decoder side reports
each key as a 4-bit code; two code tables are supported (see CodeMode).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

ROW_FREQS_HZ = (697.0, 770.0, 852.0, 941.0)
COL_FREQS_HZ = (1209.0, 1336.0, 1477.0, 1633.0)

# Keypad layout, row-major: grid[row][col].
KEYPAD_GRID = (
    ("1", "2", "3", "A"),
    ("4", "5", "6", "B"),
    ("7", "8", "9", "C"),
    ("*", "0", "#", "D"),
)

KEYS = tuple(k for row in KEYPAD_GRID for k in row)

# Highest grid tone sets the global Nyquist floor for every audio path.
MIN_SAMPLE_RATE_HZ = 2 * 1633

DEFAULT_SAMPLE_RATE_HZ = 8000
DEFAULT_AMPLITUDE = 0.35  # per component; leaves headroom for channel noise


def _grid_position(key: str) -> tuple[int, int]:
    for r, row in enumerate(KEYPAD_GRID):
        for c, k in enumerate(row):
            if k == key:
                return r, c
    raise ValueError(f"not a DTMF key: {key!r}")


def normalize_key(key: str) -> str:
    """Return the canonical key symbol, accepting lowercase a-d."""
    k = key.upper() if key in "abcd" else key
    if k not in KEYS:
        raise ValueError(f"not a DTMF key: {key!r}")
    return k


@dataclass(frozen=True)
class FrequencyPair:
    """One key's (row, column) tone pair in Hz."""

    low_hz: float
    high_hz: float

    def __post_init__(self) -> None:
        if self.low_hz >= self.high_hz:
            raise ValueError("low tone must be below high tone")


def key_to_pair(key: str) -> FrequencyPair:
    """Map a key symbol to its nominal tone pair."""
    r, c = _grid_position(normalize_key(key))
    return FrequencyPair(ROW_FREQS_HZ[r], COL_FREQS_HZ[c])


def pair_to_key(pair: FrequencyPair) -> str:
    """Inverse of key_to_pair; raises for off-grid pairs."""
    try:
        r = ROW_FREQS_HZ.index(pair.low_hz)
        c = COL_FREQS_HZ.index(pair.high_hz)
    except ValueError:
        raise ValueError(f"not a DTMF grid point: ({pair.low_hz}, {pair.high_hz})") from None
    return KEYPAD_GRID[r][c]


class CodeMode(enum.Enum):
    """Which 4-bit output table the decoder model reproduces.

    PAPER: the as-built table observed on the original breadboard receiver,
    where key 0 latches 0000 (and so halts the motor bridge). DATASHEET:
    the standard MT8870 table (0 -> 1010, D -> 0000). The two tables agree
    on keys 1-9.
    """

    PAPER = "paper"
    DATASHEET = "datasheet"


@dataclass(frozen=True)
class Nibble:
    """A 4-bit decoder output word, rendered MSB-first (q4 q3 q2 q1)."""

    q4: int
    q3: int
    q2: int
    q1: int

    def __post_init__(self) -> None:
        for bit in (self.q4, self.q3, self.q2, self.q1):
            if bit not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {bit!r}")

    @classmethod
    def from_int(cls, value: int) -> "Nibble":
        if not 0 <= value <= 15:
            raise ValueError(f"nibble value out of range: {value}")
        return cls((value >> 3) & 1, (value >> 2) & 1, (value >> 1) & 1, value & 1)

    @classmethod
    def from_bits(cls, text: str) -> "Nibble":
        if len(text) != 4 or any(ch not in "01" for ch in text):
            raise ValueError(f"expected 4 binary digits, got {text!r}")
        return cls(int(text[0]), int(text[1]), int(text[2]), int(text[3]))

    def to_int(self) -> int:
        return (self.q4 << 3) | (self.q3 << 2) | (self.q2 << 1) | self.q1

    def __str__(self) -> str:
        return f"{self.q4}{self.q3}{self.q2}{self.q1}"


# Standard MT8870 output codes.
_DATASHEET_CODES = {
    "1": 1, "2": 2, "3": 3, "4": 4, "5": 5, "6": 6, "7": 7, "8": 8, "9": 9,
    "0": 10, "*": 11, "#": 12, "A": 13, "B": 14, "C": 15, "D": 0,
}


def key_to_code(key: str, mode: CodeMode = CodeMode.PAPER) -> Nibble:
    """Return the 4-bit code the decoder latches for a key.

    The modes differ only outside keys 1-9: PAPER reads key 0 as 0000,
    matching the bench measurements of the original receiver build.
    """
    k = normalize_key(key)
    if mode is CodeMode.PAPER and k == "0":
        return Nibble.from_int(0)
    return Nibble.from_int(_DATASHEET_CODES[k])


@dataclass(frozen=True)
class AudioFrame:
    """A block of mono samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= MIN_SAMPLE_RATE_HZ:
            raise ValueError(
                f"sample rate {self.sample_rate_hz} below Nyquist bound for "
                f"the {max(COL_FREQS_HZ):.0f} Hz tone"
            )
        if len(self.samples) == 0:
            raise ValueError("empty frame")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def synthesize(
    key: str,
    duration_s: float,
    amplitude: float = DEFAULT_AMPLITUDE,
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ,
) -> AudioFrame:
    """Generate a keypress tone: amplitude * (sin(2*pi*f_low*t) + sin(2*pi*f_high*t)).

    amplitude is per component and capped at 0.5 so the sum can never clip.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    if not 0 < amplitude <= 0.5:
        raise ValueError("per-component amplitude must be in (0, 0.5]")
    pair = key_to_pair(key)
    n = round(duration_s * sample_rate_hz)
    t = np.arange(n) / sample_rate_hz
    samples = amplitude * (
        np.sin(2 * math.pi * pair.low_hz * t) + np.sin(2 * math.pi * pair.high_hz * t)
    )
    return AudioFrame(samples, sample_rate_hz)


def silence(duration_s: float, sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> AudioFrame:
    """A frame of zeros."""
    n = round(duration_s * sample_rate_hz)
    return AudioFrame(np.zeros(max(n, 1)), sample_rate_hz)
