"""Mono 16-bit PCM WAV read/write.

Unit amplitude maps to sample value 32767; reads clamp back into [-1, 1].
"""
from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .tones import AudioFrame

_FULL_SCALE = 32767
MIN_DECODE_RATE_HZ = 4000


def write_wav(path: str | Path, frame: AudioFrame) -> None:
    """Write one frame as mono 16-bit little-endian PCM."""
    pcm = np.round(np.clip(frame.samples, -1.0, 1.0) * _FULL_SCALE).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(frame.sample_rate_hz)
        w.writeframes(pcm.tobytes())


def read_wav(path: str | Path) -> AudioFrame:
    """Read a mono 16-bit PCM WAV; rejects other layouts and slow rates."""
    try:
        with wave.open(str(path), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            raw = w.readframes(w.getnframes())
    except (wave.Error, EOFError) as exc:
        raise ValueError(f"not a readable WAV file: {path} ({exc})") from exc
    if channels != 1:
        raise ValueError(f"unsupported channel count {channels}; expected mono")
    if width != 2:
        raise ValueError(f"unsupported sample width {8 * width} bits; expected 16")
    if rate < MIN_DECODE_RATE_HZ:
        raise ValueError(f"sample rate {rate} Hz below the {MIN_DECODE_RATE_HZ} Hz floor")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / _FULL_SCALE
    return AudioFrame(np.clip(samples, -1.0, 1.0), rate)
