"""Command-line surface: encode, decode, simulate, tables, serve."""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .audio_io import read_wav, write_wav
from .channel import ChannelConfig
from .detector import DetectorConfig, StreamDetector, frames_from_audio, validate
from .driver import ElectricalConstants, Motion, drive_state, resultant_motion, wire
from .engine import SimConfig, SimEvent, run_scenario, write_csv
from .kinematics import VehicleParams
from .steering import SteeringConfig, SteeringMachine
from .tones import (
    COL_FREQS_HZ,
    KEYPAD_GRID,
    KEYS,
    ROW_FREQS_HZ,
    AudioFrame,
    CodeMode,
    Nibble,
    key_to_code,
    normalize_key,
    synthesize,
)

MOTION_LABELS = {
    Motion.FORWARD: "Forward",
    Motion.REVERSE: "Reverse",
    Motion.LEFT: "Left",
    Motion.RIGHT: "Right",
    Motion.STOP: "Stop",
    Motion.SPIN_LEFT: "Spin left",
    Motion.SPIN_RIGHT: "Spin right",
    Motion.MIXED: "Mixed",
}


class ScenarioError(ValueError):
    """Scenario file problem, message carries line numbers."""


def encode_keys(
    keys: str,
    tone_s: float = 0.1,
    gap_s: float = 0.1,
    amplitude: float = 0.35,
    sample_rate_hz: int = 8000,
) -> AudioFrame:
    """Render a key sequence as audio: tone, gap, tone ... (no trailing gap)."""
    if not keys:
        raise ValueError("empty key sequence")
    parts = []
    gap = np.zeros(round(gap_s * sample_rate_hz))
    for i, key in enumerate(keys):
        if i:
            parts.append(gap)
        parts.append(synthesize(normalize_key(key), tone_s, amplitude, sample_rate_hz).samples)
    return AudioFrame(np.concatenate(parts), sample_rate_hz)


def decode_audio(
    audio: AudioFrame, code_mode: CodeMode = CodeMode.PAPER
) -> list[tuple[str, float, float]]:
    """Latched digits in an audio stream: (key, latch time, tone duration)."""
    det_cfg = DetectorConfig.for_sample_rate(audio.sample_rate_hz)
    frame_s = det_cfg.frame_len / audio.sample_rate_hz
    stream = StreamDetector(det_cfg)
    machine = SteeringMachine(
        SteeringConfig(), code_mode, detect_delay_s=det_cfg.confirm_frames * frame_s
    )
    entries: list[tuple[str, float, float]] = []
    run_key: Optional[str] = None
    run_frames = 0
    latch_at: Optional[float] = None

    def close_run() -> None:
        nonlocal latch_at
        if latch_at is not None:
            entries.append((run_key, latch_at, run_frames * frame_s))
            latch_at = None

    for i, frame in enumerate(frames_from_audio(audio, det_cfg.frame_len)):
        cond = stream.push(frame)
        out = machine.push(cond, frame_s)
        raw = validate(cond.metrics, det_cfg)
        if raw != run_key:
            close_run()
            run_key = raw
            run_frames = 1 if raw is not None else 0
        elif raw is not None:
            run_frames += 1
        if out.std_rising_edge:
            latch_at = (i + 1) * frame_s
    close_run()
    return entries


def decode_wav_file(path: str | Path, code_mode: CodeMode = CodeMode.PAPER):
    return decode_audio(read_wav(path), code_mode)


def load_scenario(path: str | Path) -> list[SimEvent]:
    """Parse a JSON-lines scenario; schema problems report their line number."""
    events: list[tuple[int, SimEvent]] = []
    errors: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as exc:
                errors.append(f"line {lineno}: invalid JSON ({exc.msg})")
                continue
            if not isinstance(obj, dict):
                errors.append(f"line {lineno}: expected an object")
                continue
            unknown_ok = {"t", "kind", "key"}
            try:
                events.append(
                    (lineno, SimEvent(obj.get("kind"), obj.get("t"), obj.get("key")))
                )
            except (ValueError, TypeError) as exc:
                errors.append(f"line {lineno}: {exc}")
                continue
            extra = set(obj) - unknown_ok
            if extra:
                errors.append(f"line {lineno}: unknown fields {sorted(extra)}")
    # re-run the ordering/pairing rules so errors carry line numbers
    held: Optional[tuple[str, int]] = None
    last_at = None
    for lineno, ev in events:
        if last_at is not None and ev.at < last_at:
            errors.append(f"line {lineno}: events not time-sorted")
        last_at = ev.at
        if ev.kind == "down":
            if held is not None:
                errors.append(
                    f"line {lineno}: key {ev.key!r} pressed while key from line "
                    f"{held[1]} is still held"
                )
            held = (ev.key, lineno)
        elif ev.kind == "up":
            if held is None or held[0] != ev.key:
                errors.append(f"line {lineno}: key {ev.key!r} released but not held")
            held = None
    if errors:
        raise ScenarioError("\n".join(errors))
    return [ev for _, ev in events]


def _config_from_dict(data: dict) -> SimConfig:
    """Build a SimConfig from a nested plain dict (the --config file shape)."""
    sections = {
        "detector": DetectorConfig,
        "steering": SteeringConfig,
        "channel": ChannelConfig,
        "vehicle": VehicleParams,
        "electrical": ElectricalConstants,
    }
    kwargs = {}
    for name, cls in sections.items():
        if name in data:
            section = dict(data[name])
            if name == "channel" and section.get("snr_db") is None:
                section["snr_db"] = float("inf")  # JSON has no Infinity
            kwargs[name] = cls(**section)
    if "sample_rate_hz" in data:
        kwargs["sample_rate_hz"] = int(data["sample_rate_hz"])
    if "code_mode" in data:
        kwargs["code_mode"] = CodeMode(data["code_mode"])
    if "duration_limit_s" in data:
        kwargs["duration_limit_s"] = float(data["duration_limit_s"])
    if "telemetry_decimation" in data:
        kwargs["telemetry_decimation"] = int(data["telemetry_decimation"])
    return SimConfig(**kwargs)


def config_to_dict(config: SimConfig) -> dict:
    out = dataclasses.asdict(config)
    out["code_mode"] = config.code_mode.value
    out["tick_s"] = config.tick_s
    # json has no Infinity; report clean SNR as null
    if out["channel"]["snr_db"] == float("inf"):
        out["channel"]["snr_db"] = None
    return out


def build_sim_config(args: argparse.Namespace) -> SimConfig:
    """Config file first, then individual flags on top."""
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            config = _config_from_dict(json.load(fh))
    else:
        config = SimConfig()
    channel_kw = {}
    if getattr(args, "snr_db", None) is not None:
        channel_kw["snr_db"] = args.snr_db
    if getattr(args, "freq_offset", None) is not None:
        channel_kw["freq_offset_ratio"] = args.freq_offset
    if getattr(args, "latency_ms", None) is not None:
        channel_kw["latency_s"] = args.latency_ms / 1000
    if getattr(args, "seed", None) is not None:
        channel_kw["rng_seed"] = args.seed
    if channel_kw:
        config = dataclasses.replace(
            config, channel=dataclasses.replace(config.channel, **channel_kw)
        )
    if getattr(args, "code_mode", None):
        config = dataclasses.replace(config, code_mode=CodeMode(args.code_mode))
    if getattr(args, "sample_rate", None):
        # keep 20 ms analysis frames (and so 20 ms ticks) at the new rate
        config = dataclasses.replace(
            config,
            sample_rate_hz=args.sample_rate,
            detector=dataclasses.replace(
                config.detector, frame_len=max(2, round(0.020 * args.sample_rate))
            ),
        )
    return config


def merge_config(current: SimConfig, overrides: dict) -> SimConfig:
    """Overlay a partial nested dict onto an existing config."""
    base = dataclasses.asdict(current)
    base["code_mode"] = current.code_mode.value
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            base[key].update(value)
        else:
            base[key] = value
    return _config_from_dict(base)


def format_tables(code_mode: CodeMode = CodeMode.PAPER) -> str:
    """Human-readable dump of the keypad grid and the decoder/driver tables.

    Everything is computed from the live modules so the printout can be
    eyeballed against bench notes.
    """
    lines = []
    lines.append("DTMF keypad grid (rows: low group, columns: high group)")
    header = "        " + "  ".join(f"{int(c):>4}" for c in COL_FREQS_HZ)
    lines.append(header)
    for r, row_hz in enumerate(ROW_FREQS_HZ):
        cells = "  ".join(f"{KEYPAD_GRID[r][c]:>4}" for c in range(4))
        lines.append(f"  {int(row_hz):>4} | {cells}")
    lines.append("")

    for mode in (CodeMode.PAPER, CodeMode.DATASHEET):
        lines.append(f"Key codes and latched motion ({mode.value} mode): key | code | motion")
        for key in KEYS:
            code = key_to_code(key, mode)
            motion = MOTION_LABELS[resultant_motion(drive_state(code))]
            lines.append(f"  {key} | {code} | {motion}")
        lines.append("")

    lines.append("Motor bridge truth table: nibble | left | right | resultant")
    for value in range(16):
        nib = Nibble.from_int(value)
        state = drive_state(nib)
        lines.append(
            f"  {nib} | {state.left.value.title()} | {state.right.value.title()}"
            f" | {MOTION_LABELS[resultant_motion(state)]}"
        )
    lines.append("")

    lines.append("Identity wiring check: code | IN1 IN2 IN3 IN4 | EN1 EN2")
    for key in ("6", "9", "4", "2", "0"):
        code = key_to_code(key, code_mode)
        inp = wire(code)
        lines.append(
            f"  {code} | {inp.in1}   {inp.in2}   {inp.in3}   {inp.in4}"
            f"   | {inp.en1}   {inp.en2}"
        )
    return "\n".join(lines)


def _add_channel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snr-db", type=float, help="channel noise level (dB)")
    parser.add_argument("--freq-offset", type=float, help="frequency scaling ratio")
    parser.add_argument("--latency-ms", type=float, help="transport delay (ms)")
    parser.add_argument("--seed", type=int, help="channel noise seed")
    parser.add_argument("--config", help="JSON config file with nested overrides")
    parser.add_argument(
        "--code-mode", choices=["paper", "datasheet"], help="decoder output table"
    )
    parser.add_argument("--sample-rate", type=int, help="audio sample rate (Hz)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialdrive",
        description="Keypad-tone vehicle control simulator",
    )
    parser.add_argument("--version", action="version", version=f"dialdrive {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="render a key sequence to a WAV file")
    p.add_argument("keys", help="sequence from 0-9 * # A-D")
    p.add_argument("-o", "--out", required=True, help="output WAV path")
    p.add_argument("--tone-ms", type=float, default=100.0)
    p.add_argument("--gap-ms", type=float, default=100.0)
    p.add_argument("--amplitude", type=float, default=0.35)
    p.add_argument("--sample-rate", type=int, default=8000)

    p = sub.add_parser("decode", help="report latched digits in a WAV file")
    p.add_argument("wav", help="input WAV path (mono 16-bit PCM)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument(
        "--code-mode", choices=["paper", "datasheet"], default="paper"
    )

    p = sub.add_parser("simulate", help="run a scenario file, write telemetry CSV")
    p.add_argument("scenario", help="JSON-lines scenario file")
    p.add_argument("--csv", help="telemetry CSV output path (default: stdout)")
    p.add_argument("--duration", type=float, help="simulated seconds")
    _add_channel_flags(p)

    p = sub.add_parser("tables", help="print the keypad grid and logic tables")
    p.add_argument(
        "--code-mode", choices=["paper", "datasheet"], default="paper"
    )

    p = sub.add_parser("serve", help="run the live teleoperation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui-dir", help="static UI assets directory")
    _add_channel_flags(p)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "encode":
            audio = encode_keys(
                args.keys,
                tone_s=args.tone_ms / 1000,
                gap_s=args.gap_ms / 1000,
                amplitude=args.amplitude,
                sample_rate_hz=args.sample_rate,
            )
            write_wav(args.out, audio)
            print(f"wrote {args.out}: {audio.duration_s:.3f} s at {audio.sample_rate_hz} Hz")
        elif args.command == "decode":
            entries = decode_wav_file(args.wav, CodeMode(args.code_mode))
            if args.json:
                print(json.dumps(
                    [{"key": k, "onset_s": round(t, 4), "duration_s": round(d, 4)}
                     for k, t, d in entries]
                ))
            else:
                for key, onset, duration in entries:
                    print(f"{key}\t{onset:.3f}\t{duration:.3f}")
        elif args.command == "simulate":
            events = load_scenario(args.scenario)
            config = build_sim_config(args)
            snapshots = run_scenario(events, config, duration_s=args.duration)
            if args.csv:
                write_csv(snapshots, args.csv)
                print(f"wrote {args.csv}: {len(snapshots)} ticks")
            else:
                from .engine import to_csv_rows

                for line in to_csv_rows(snapshots):
                    print(line)
        elif args.command == "tables":
            print(format_tables(CodeMode(args.code_mode)))
        elif args.command == "serve":
            from .service import serve

            serve(build_sim_config(args), args.host, args.port, args.ui_dir)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
