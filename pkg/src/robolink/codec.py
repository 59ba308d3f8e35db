"""Bit-exact codecs for the robot control and telemetry packets.

Both packets are packed MSB first into a fixed number of bytes:

control (14 bytes / 112 bits)          telemetry (13 bytes / 104 bits)
    msg_type         4 bits                msg_type         4 bits
    robot_id         4 bits                robot_id         4 bits
    vx              20 bits s20.q4         motor1          16 bits s16.q2
    vy              20 bits s20.q4         motor2          16 bits s16.q2
    omega           20 bits s20.q4         motor3          16 bits s16.q2
    theta           20 bits s20.q4         motor4          16 bits s16.q2
    kick_front       1 bit                 dribbler_speed  15 bits unsigned
    kick_chip        1 bit                 kick_capacitor   8 bits
    charge_kick      1 bit                 ball_detected    1 bit
    kick_strength    8 bits                battery          8 bits
    dribbler_on      1 bit
    dribbler_speed   8 bits
    extra_command    4 bits

"s20.q4" is a 20-bit two's complement integer holding value * 10^4,
"s16.q2" a 16-bit two's complement integer holding value * 10^2.
Quantization saturates at the integer range instead of wrapping; ties
round away from zero.  Message type 0 is a control command and 1 a
telemetry report; codes 2..15 are carried opaquely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

MSG_CONTROL = 0
MSG_TELEMETRY = 1

CONTROL_FRAME_BYTES = 14
TELEMETRY_FRAME_BYTES = 13

# (field, width in bits), in wire order
CONTROL_FIELDS = (
    ("msg_type", 4),
    ("robot_id", 4),
    ("vx", 20),
    ("vy", 20),
    ("omega", 20),
    ("theta", 20),
    ("kick_front", 1),
    ("kick_chip", 1),
    ("charge_kick", 1),
    ("kick_strength", 8),
    ("dribbler_on", 1),
    ("dribbler_speed", 8),
    ("extra_command", 4),
)

TELEMETRY_FIELDS = (
    ("msg_type", 4),
    ("robot_id", 4),
    ("motor1", 16),
    ("motor2", 16),
    ("motor3", 16),
    ("motor4", 16),
    ("dribbler_speed", 15),
    ("kick_capacitor", 8),
    ("ball_detected", 1),
    ("battery", 8),
)

assert sum(w for _, w in CONTROL_FIELDS) == 8 * CONTROL_FRAME_BYTES
assert sum(w for _, w in TELEMETRY_FIELDS) == 8 * TELEMETRY_FRAME_BYTES

_Q4 = 10_000
_Q2 = 100
_INT20_MIN, _INT20_MAX = -(1 << 19), (1 << 19) - 1
_INT16_MIN, _INT16_MAX = -(1 << 15), (1 << 15) - 1

# exactly the representable bands of the two quantized field kinds
VEL_MIN, VEL_MAX = _INT20_MIN / _Q4, _INT20_MAX / _Q4        # -52.4288 .. 52.4287
MOTOR_MIN, MOTOR_MAX = _INT16_MIN / _Q2, _INT16_MAX / _Q2    # -327.68 .. 327.67


def _round_half_away(x: float) -> int:
    if x >= 0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


def quantize20(value: float) -> int:
    """value -> round(value * 10^4), saturated to the signed 20-bit range."""
    if not math.isfinite(value):
        raise ValueError(f"non-encodable value: {value!r}")
    return min(max(_round_half_away(value * _Q4), _INT20_MIN), _INT20_MAX)


def dequantize20(raw: int) -> float:
    return raw / _Q4


def quantize16(value: float) -> int:
    """value -> round(value * 10^2), saturated to the signed 16-bit range."""
    if not math.isfinite(value):
        raise ValueError(f"non-encodable value: {value!r}")
    return min(max(_round_half_away(value * _Q2), _INT16_MIN), _INT16_MAX)


def dequantize16(raw: int) -> float:
    return raw / _Q2


def _check_int(name: str, value: int, lo: int, hi: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"field {name} must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ValueError(f"field {name} out of range: {value} (allowed [{lo}, {hi}])")


def _check_scaled(name: str, value: float, lo: float, hi: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"field {name} is not finite: {value!r}")
    if not lo <= value <= hi:
        raise ValueError(f"field {name} out of range: {value} (allowed [{lo}, {hi}])")


@dataclass
class ControlCommand:
    """One velocity/kick/dribbler command addressed to a single robot.

    The constructor validates every field and snaps vx/vy/omega/theta onto
    the s20.q4 grid, so encode/decode round-trips are exact.
    """

    robot_id: int
    msg_type: int = MSG_CONTROL
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0
    theta: float = 0.0
    kick_front: bool = False
    kick_chip: bool = False
    charge_kick: bool = False
    kick_strength: int = 0
    dribbler_on: bool = False
    dribbler_speed: int = 0
    extra_command: int = 0

    def __post_init__(self) -> None:
        _check_int("msg_type", self.msg_type, 0, 15)
        _check_int("robot_id", self.robot_id, 0, 15)
        for name in ("vx", "vy", "omega", "theta"):
            _check_scaled(name, getattr(self, name), VEL_MIN, VEL_MAX)
            setattr(self, name, dequantize20(quantize20(getattr(self, name))))
        _check_int("kick_strength", self.kick_strength, 0, 255)
        _check_int("dribbler_speed", self.dribbler_speed, 0, 255)
        _check_int("extra_command", self.extra_command, 0, 15)
        for name in ("kick_front", "kick_chip", "charge_kick", "dribbler_on"):
            setattr(self, name, bool(getattr(self, name)))


@dataclass
class TelemetryReport:
    """One robot-to-computer status report (motor speeds, kicker, battery)."""

    robot_id: int
    msg_type: int = MSG_TELEMETRY
    motor1: float = 0.0
    motor2: float = 0.0
    motor3: float = 0.0
    motor4: float = 0.0
    dribbler_speed: int = 0
    kick_capacitor: int = 0
    ball_detected: bool = False
    battery: int = 0

    def __post_init__(self) -> None:
        _check_int("msg_type", self.msg_type, 0, 15)
        _check_int("robot_id", self.robot_id, 0, 15)
        for name in ("motor1", "motor2", "motor3", "motor4"):
            _check_scaled(name, getattr(self, name), MOTOR_MIN, MOTOR_MAX)
            setattr(self, name, dequantize16(quantize16(getattr(self, name))))
        _check_int("dribbler_speed", self.dribbler_speed, 0, (1 << 15) - 1)
        _check_int("kick_capacitor", self.kick_capacitor, 0, 255)
        _check_int("battery", self.battery, 0, 255)
        self.ball_detected = bool(self.ball_detected)


def _pack(parts: list[tuple[int, int]], nbytes: int) -> bytes:
    acc = 0
    for value, width in parts:
        acc = (acc << width) | (value & ((1 << width) - 1))
    return acc.to_bytes(nbytes, "big")


def _unpack(frame: bytes, widths: list[int]) -> list[int]:
    acc = int.from_bytes(frame, "big")
    total = 8 * len(frame)
    out = []
    for width in widths:
        total -= width
        out.append((acc >> total) & ((1 << width) - 1))
    return out


def _signed(raw: int, width: int) -> int:
    if raw >= 1 << (width - 1):
        raw -= 1 << width
    return raw


def encode_control(cmd: ControlCommand) -> bytes:
    """Pack a ControlCommand into its 14-byte wire frame."""
    return _pack(
        [
            (cmd.msg_type, 4),
            (cmd.robot_id, 4),
            (quantize20(cmd.vx), 20),
            (quantize20(cmd.vy), 20),
            (quantize20(cmd.omega), 20),
            (quantize20(cmd.theta), 20),
            (int(cmd.kick_front), 1),
            (int(cmd.kick_chip), 1),
            (int(cmd.charge_kick), 1),
            (cmd.kick_strength, 8),
            (int(cmd.dribbler_on), 1),
            (cmd.dribbler_speed, 8),
            (cmd.extra_command, 4),
        ],
        CONTROL_FRAME_BYTES,
    )


def decode_control(frame: bytes) -> ControlCommand:
    """Unpack a 14-byte wire frame into a ControlCommand."""
    if len(frame) != CONTROL_FRAME_BYTES:
        raise ValueError(
            f"malformed control frame: expected {CONTROL_FRAME_BYTES} bytes, got {len(frame)}"
        )
    v = _unpack(frame, [w for _, w in CONTROL_FIELDS])
    return ControlCommand(
        msg_type=v[0],
        robot_id=v[1],
        vx=dequantize20(_signed(v[2], 20)),
        vy=dequantize20(_signed(v[3], 20)),
        omega=dequantize20(_signed(v[4], 20)),
        theta=dequantize20(_signed(v[5], 20)),
        kick_front=bool(v[6]),
        kick_chip=bool(v[7]),
        charge_kick=bool(v[8]),
        kick_strength=v[9],
        dribbler_on=bool(v[10]),
        dribbler_speed=v[11],
        extra_command=v[12],
    )


def encode_telemetry(rep: TelemetryReport) -> bytes:
    """Pack a TelemetryReport into its 13-byte wire frame."""
    return _pack(
        [
            (rep.msg_type, 4),
            (rep.robot_id, 4),
            (quantize16(rep.motor1), 16),
            (quantize16(rep.motor2), 16),
            (quantize16(rep.motor3), 16),
            (quantize16(rep.motor4), 16),
            (rep.dribbler_speed, 15),
            (rep.kick_capacitor, 8),
            (int(rep.ball_detected), 1),
            (rep.battery, 8),
        ],
        TELEMETRY_FRAME_BYTES,
    )


def decode_telemetry(frame: bytes) -> TelemetryReport:
    """Unpack a 13-byte wire frame into a TelemetryReport."""
    if len(frame) != TELEMETRY_FRAME_BYTES:
        raise ValueError(
            f"malformed telemetry frame: expected {TELEMETRY_FRAME_BYTES} bytes, got {len(frame)}"
        )
    v = _unpack(frame, [w for _, w in TELEMETRY_FIELDS])
    return TelemetryReport(
        msg_type=v[0],
        robot_id=v[1],
        motor1=dequantize16(_signed(v[2], 16)),
        motor2=dequantize16(_signed(v[3], 16)),
        motor3=dequantize16(_signed(v[4], 16)),
        motor4=dequantize16(_signed(v[5], 16)),
        dribbler_speed=v[6],
        kick_capacitor=v[7],
        ball_detected=bool(v[8]),
        battery=v[9],
    )
