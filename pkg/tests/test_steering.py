import math

import numpy as np
import pytest

from dialdrive.detector import DetectorConfig, SignalCondition, ToneMetrics
from dialdrive.steering import (
    ReceiverOutput,
    SteeringConfig,
    SteeringMachine,
    SteeringState,
    guard_time,
    step,
    t_rec,
)
from dialdrive.tones import CodeMode, Nibble

QUIET_METRICS = ToneMetrics((0.0,) * 4, (0.0,) * 4, 0, 0, 0.0)
LOUD = 0.02


def cond_for(key):
    m = ToneMetrics((LOUD,) * 4, (LOUD,) * 4, 0, 0, 0.0)
    return SignalCondition(True, key, m)


SILENT = SignalCondition(False, None, QUIET_METRICS)


def run_schedule(schedule, config=SteeringConfig(), dt=0.001, mode=CodeMode.PAPER):
    """Step through (condition, duration) pairs; return state and edge times."""
    state = SteeringState()
    edges = []
    t = 0.0
    for cond, duration in schedule:
        steps = round(duration / dt)
        for _ in range(steps):
            state, out = step(state, cond, mode, dt, config)
            t += dt
            if out.std_rising_edge:
                edges.append((t, out.latched_code, out.t_rec_measured))
    return state, edges


def test_guard_time_default_rc():
    cfg = SteeringConfig(r_ohms=330e3, c_farads=0.1e-6)
    assert guard_time(cfg) == pytest.approx(0.0229, abs=1e-4)


def test_guard_time_alternate_rc():
    cfg = SteeringConfig(r_ohms=100e3, c_farads=0.1e-6)
    assert guard_time(cfg) == pytest.approx(0.00693, abs=5e-5)


def test_guard_time_vanishes_with_threshold():
    cfg = SteeringConfig(v_threshold=1e-9)
    assert guard_time(cfg) < 1e-9


def test_config_rejects_threshold_at_or_above_vdd():
    with pytest.raises(ValueError):
        SteeringConfig(v_threshold=5.0)
    with pytest.raises(ValueError):
        SteeringConfig(v_threshold=6.0)
    with pytest.raises(ValueError):
        SteeringConfig(r_ohms=0)


def test_t_rec_prediction():
    got = t_rec(DetectorConfig(confirm_frames=2), SteeringConfig(), 0.020)
    assert got == pytest.approx(0.0629, abs=2e-4)


def test_t_rec_degenerate_guard():
    cfg = SteeringConfig(v_threshold=1e-9)
    got = t_rec(DetectorConfig(confirm_frames=1), cfg, 0.020)
    assert got == pytest.approx(0.020, abs=1e-6)


def test_held_tone_latches_once():
    state, edges = run_schedule([(cond_for("6"), 0.2)])
    assert len(edges) == 1
    assert str(edges[0][1]) == "0110"
    assert state.latched == Nibble.from_bits("0110")
    # crossing happens one guard time into the tone (dt quantization aside)
    assert edges[0][0] == pytest.approx(guard_time(SteeringConfig()), abs=0.002)


def test_short_blip_never_latches():
    blip = guard_time(SteeringConfig()) / 2
    state, edges = run_schedule([(cond_for("6"), blip), (SILENT, 0.1)])
    assert edges == []
    assert state.latched is None


def test_two_presses_two_edges():
    g = guard_time(SteeringConfig())
    schedule = [
        (cond_for("6"), 0.04), (SILENT, 2 * g),
        (cond_for("6"), 0.04), (SILENT, 2 * g),
    ]
    _, edges = run_schedule(schedule)
    assert len(edges) == 2
    assert all(str(code) == "0110" for _, code, _ in edges)


def test_pause_shorter_than_rearm_time_suppresses_second_edge():
    schedule = [
        (cond_for("6"), 0.04), (SILENT, 0.005),
        (cond_for("6"), 0.04),
    ]
    _, edges = run_schedule(schedule)
    assert len(edges) == 1


def test_latch_persists_after_tone_ends():
    state, edges = run_schedule([(cond_for("9"), 0.05), (SILENT, 0.3)])
    assert len(edges) == 1
    assert state.latched == Nibble.from_bits("1001")
    assert not state.std_high


def test_candidate_change_restarts_guard_check():
    g = guard_time(SteeringConfig())
    # Each segment is shorter than the guard; switching keys must not latch.
    schedule = [(cond_for("6"), 0.6 * g), (cond_for("9"), 0.6 * g)]
    state, edges = run_schedule(schedule)
    assert edges == []
    # Held long enough after the switch, the new key lands alone.
    schedule = [(cond_for("6"), 0.6 * g), (cond_for("9"), 0.1)]
    state, edges = run_schedule(schedule)
    assert [str(code) for _, code, _ in edges] == ["1001"]


def test_code_mode_reaches_the_latch():
    _, edges = run_schedule([(cond_for("0"), 0.1)], mode=CodeMode.PAPER)
    assert str(edges[0][1]) == "0000"
    _, edges = run_schedule([(cond_for("0"), 0.1)], mode=CodeMode.DATASHEET)
    assert str(edges[0][1]) == "1010"


def test_lengthening_a_tone_never_unlatches():
    for hold in (0.05, 0.1, 0.4):
        state, edges = run_schedule([(cond_for("4"), hold)])
        assert len(edges) == 1
        assert state.latched == Nibble.from_bits("0100")


def test_t_rec_measured_includes_detect_delay():
    machine = SteeringMachine(SteeringConfig(), detect_delay_s=0.040)
    out = None
    for _ in range(10):
        result = machine.push(cond_for("6"), 0.020)
        if result.std_rising_edge:
            out = result
            break
    assert out is not None
    assert out.t_rec_measured == pytest.approx(0.040 + 0.0229, abs=0.006)


def test_step_rejects_coarse_dt():
    g = guard_time(SteeringConfig())
    with pytest.raises(ValueError):
        step(SteeringState(), SILENT, CodeMode.PAPER, g, SteeringConfig())
    with pytest.raises(ValueError):
        step(SteeringState(), SILENT, CodeMode.PAPER, 0.0, SteeringConfig())


def test_machine_substeps_coarse_dt():
    machine = SteeringMachine(SteeringConfig())
    machine.push(SILENT, 0.020)  # would violate the step() bound directly


def test_vc_stays_within_rails_under_random_input():
    rng = np.random.default_rng(11)
    cfg = SteeringConfig()
    conds = [SILENT, cond_for("6"), cond_for("9"), cond_for("0")]
    state = SteeringState()
    lo, hi = math.inf, -math.inf
    for choice in rng.integers(0, 4, size=1_000_000):
        state, _ = step(state, conds[choice], CodeMode.PAPER, 0.001, cfg)
        lo = min(lo, state.vc)
        hi = max(hi, state.vc)
    assert lo >= 0.0
    assert hi <= cfg.vdd


def test_output_invariant_edge_implies_code():
    state = SteeringState()
    for _ in range(200):
        state, out = step(state, cond_for("2"), CodeMode.PAPER, 0.002, SteeringConfig())
        if out.std_rising_edge:
            assert isinstance(out.latched_code, Nibble)
    assert isinstance(out, ReceiverOutput)
