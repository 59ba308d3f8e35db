"""Deterministic simulator for a 2.4 GHz control-and-telemetry network
for mobile robots: bit-exact frame codecs, timed link models, a
discrete-event network simulation, experiment sweeps, and a live UDP
bridge that runs the simulated network in wall-clock time.
"""

from .codec import (
    CONTROL_FRAME_BYTES,
    TELEMETRY_FRAME_BYTES,
    ControlCommand,
    TelemetryReport,
    decode_control,
    decode_telemetry,
    encode_control,
    encode_telemetry,
)
from .config import Config
from .engine import Simulator, round_half_up
from .experiments import (
    ScenarioResult,
    SweepResult,
    build_network,
    cmd_distance_sweep,
    cmd_interval_sweep,
    cmd_multi_robot,
    cmd_run,
    cmd_telemetry_sweep,
    pipeline_total_us,
    run_scenario,
)
from .links import (
    CONTROL_RADIO,
    TELEMETRY_RADIO,
    ChannelModel,
    RadioConfig,
    TransmitOutcome,
    TransmitResult,
    UplinkModel,
    air_time,
    channel_transmit,
    serial_transfer,
    spi_time,
)
from .metrics import DeliveryStats, WindowUnsatisfied, compute_stats, write_csv
from .nodes import Network, RunResult

__version__ = "1.0.0"

__all__ = [
    "CONTROL_FRAME_BYTES",
    "CONTROL_RADIO",
    "ChannelModel",
    "Config",
    "ControlCommand",
    "DeliveryStats",
    "Network",
    "RadioConfig",
    "RunResult",
    "ScenarioResult",
    "Simulator",
    "SweepResult",
    "TELEMETRY_FRAME_BYTES",
    "TELEMETRY_RADIO",
    "TelemetryReport",
    "TransmitOutcome",
    "TransmitResult",
    "UplinkModel",
    "WindowUnsatisfied",
    "air_time",
    "build_network",
    "channel_transmit",
    "cmd_distance_sweep",
    "cmd_interval_sweep",
    "cmd_multi_robot",
    "cmd_run",
    "cmd_telemetry_sweep",
    "compute_stats",
    "decode_control",
    "decode_telemetry",
    "encode_control",
    "encode_telemetry",
    "pipeline_total_us",
    "round_half_up",
    "run_scenario",
    "serial_transfer",
    "spi_time",
    "write_csv",
    "__version__",
]
