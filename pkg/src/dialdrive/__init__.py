"""Phone-keypad vehicle teleoperation simulator.

Keypad tones travel over a lossy voice channel into an MT8870-style tone
decoder whose latched 4-bit output feeds an L293D-style motor bridge on a
differential-drive vehicle. The package exposes the full chain as a
library, a CLI (encode / decode / simulate / tables / serve), and a
telemetry service for the browser keypad client.
"""

__version__ = "0.1.0"

from .tones import (
    AudioFrame,
    CodeMode,
    FrequencyPair,
    Nibble,
    key_to_code,
    key_to_pair,
    pair_to_key,
    synthesize,
)
from .detector import (
    DetectorConfig,
    SignalCondition,
    StreamDetector,
    ToneMetrics,
    analyze_frame,
    goertzel_energy,
    process_stream,
    validate,
)
from .steering import (
    ReceiverOutput,
    SteeringConfig,
    SteeringMachine,
    SteeringState,
    guard_time,
    t_rec,
)
from .driver import (
    DriveState,
    DriverInputs,
    ElectricalConstants,
    Motion,
    MotorAction,
    drive_state,
    motor_action,
    motor_voltage,
    resultant_motion,
    wire,
)
from .kinematics import VehicleParams, VehiclePose, step_pose, track_speeds
from .channel import (
    ChannelConfig,
    Phase,
    ProtocolError,
    SessionState,
    StreamingChannel,
    session_step,
    transmit,
)
from .engine import (
    SimConfig,
    SimEvent,
    Simulation,
    TelemetrySnapshot,
    live_session,
    run_scenario,
)
from .audio_io import read_wav, write_wav
