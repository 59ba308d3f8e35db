"""Link models: radio air time, SPI transfer time, lossy channel, uplink.

All durations are microseconds. The radio frame on air carries the payload
plus fixed overhead (preamble, address, CRC); the transceiver is fed over
SPI with one command byte ahead of the payload. The channel model draws a
loss decision first and bit flips second (in frame order) from a stream
owned by the caller, so outcomes are reproducible per seed. The radio CRC
is modeled as perfect: a frame with any flipped bit is dropped at the
receiver, never delivered corrupted. The serial uplink is the opposite:
it has no integrity check, so buffer overflows corrupt frames that are
then delivered anyway.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

MAX_RADIO_PAYLOAD = 32  # [bytes] transceiver hard limit

NOMINAL_BAND_MHZ = (2400, 2525)  # frequencies with a defined channel index


@dataclass(frozen=True)
class RadioConfig:
    frequency_mhz: int
    address: int                      # 5-byte pipe address
    data_rate_bps: int = 2_000_000
    preamble_bytes: int = 1
    address_bytes: int = 5
    crc_bytes: int = 2
    spi_rate_bps: int = 10_000_000

    @property
    def channel_index(self) -> int:
        return self.frequency_mhz - NOMINAL_BAND_MHZ[0]

    @property
    def in_nominal_band(self) -> bool:
        return NOMINAL_BAND_MHZ[0] <= self.frequency_mhz <= NOMINAL_BAND_MHZ[1]


CONTROL_RADIO = RadioConfig(frequency_mhz=2504, address=0x753FAD299A)
TELEMETRY_RADIO = RadioConfig(frequency_mhz=2529, address=0x753FBD299A)


def air_time(payload_len: int, radio: RadioConfig = CONTROL_RADIO) -> float:
    """Microseconds one frame occupies the air.

    8 * (preamble + address + payload + crc) bits at the radio data rate.
    """
    if payload_len > MAX_RADIO_PAYLOAD:
        raise ValueError(f"oversized radio payload: {payload_len} > {MAX_RADIO_PAYLOAD}")
    if payload_len < 0:
        raise ValueError(f"negative payload length: {payload_len}")
    frame_bytes = radio.preamble_bytes + radio.address_bytes + payload_len + radio.crc_bytes
    return 8 * frame_bytes * 1e6 / radio.data_rate_bps


def spi_time(payload_len: int, radio: RadioConfig = CONTROL_RADIO) -> float:
    """Microseconds to clock one payload (plus the command byte) over SPI."""
    if payload_len < 0:
        raise ValueError(f"negative payload length: {payload_len}")
    return (payload_len + 1) * 8 * 1e6 / radio.spi_rate_bps


class TransmitResult(enum.Enum):
    DELIVERED = "delivered"
    LOST = "lost"
    CORRUPT_DROPPED = "corrupt_dropped"
    CORRUPT_DELIVERED = "corrupt_delivered"


@dataclass(frozen=True)
class TransmitOutcome:
    result: TransmitResult
    frame: bytes | None  # bytes as seen by the receiver; None when nothing arrives


@dataclass
class ChannelModel:
    """Loss/corruption behavior of one radio frequency.

    Loss probability is either the constant ``p_loss`` or, when
    ``loss_table`` is given, a piecewise-constant function of distance:
    the table holds (threshold_m, probability) pairs sorted by threshold,
    and the entry with the largest threshold <= distance applies.
    """

    p_loss: float = 0.0
    p_bitflip: float = 0.0
    distance_m: float = 0.4
    loss_table: tuple[tuple[float, float], ...] | None = None
    collisions_enabled: bool = True

    def __post_init__(self) -> None:
        for name in ("p_loss", "p_bitflip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")
        if self.loss_table is not None:
            thresholds = [t for t, _ in self.loss_table]
            if thresholds != sorted(thresholds):
                raise ValueError("loss_table thresholds must be sorted ascending")
            for _, p in self.loss_table:
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"loss_table probability out of range: {p}")

    def loss_probability(self, distance_m: float | None = None) -> float:
        if not self.loss_table:  # None or empty: constant, distance-independent
            return self.p_loss
        d = self.distance_m if distance_m is None else distance_m
        p = self.loss_table[0][1]
        for threshold, prob in self.loss_table:
            if d >= threshold:
                p = prob
            else:
                break
        return p


def channel_transmit(frame: bytes, model: ChannelModel,
                     rng: random.Random) -> TransmitOutcome:
    """Send one frame across the channel; the caller owns the RNG stream.

    Draw order is fixed: one uniform for the loss decision, then one
    uniform per bit in frame order. The bit draws are skipped entirely
    when p_bitflip == 0, so ideal-channel runs consume exactly one draw
    per frame.
    """
    if rng.random() < model.loss_probability(model.distance_m):
        return TransmitOutcome(TransmitResult.LOST, None)
    if model.p_bitflip > 0.0:
        for _ in range(8 * len(frame)):
            if rng.random() < model.p_bitflip:
                # a perfect CRC catches the corruption at the receiver
                return TransmitOutcome(TransmitResult.CORRUPT_DROPPED, None)
    return TransmitOutcome(TransmitResult.DELIVERED, frame)


@dataclass(frozen=True)
class UplinkModel:
    """Computer-to-base-station link: 'ethernet' or 'serial'.

    Exactly one kind's parameters are active: latency_us for ethernet
    (zero serialization time), baud/bits_per_byte/buffer_bytes for serial.
    """

    kind: str
    latency_us: float = 50.0
    baud: int = 115200
    bits_per_byte: int = 10  # start bit + 8 data + stop bit
    buffer_bytes: int = 64

    def __post_init__(self) -> None:
        if self.kind not in ("ethernet", "serial"):
            raise ValueError(f"unknown uplink kind: {self.kind!r}")


def serial_transfer(frame: bytes, model: UplinkModel,
                    queue_depth: int) -> tuple[float, TransmitOutcome]:
    """One frame over the serial line with `queue_depth` bytes already queued.

    Returns (line time in microseconds, outcome). When the frame does not
    fit into the buffer behind the queued bytes, the bytes past the
    capacity stomp the frame in flight: the lowest bit of each overflowed
    byte position (the frame's tail) flips, and the frame is delivered
    anyway — the serial line has no integrity check.
    """
    duration = len(frame) * model.bits_per_byte * 1e6 / model.baud
    overflow = queue_depth + len(frame) - model.buffer_bytes
    if overflow <= 0 or not frame:
        return duration, TransmitOutcome(TransmitResult.DELIVERED, frame)
    corrupted = bytearray(frame)
    for pos in range(max(0, len(frame) - overflow), len(frame)):
        corrupted[pos] ^= 0x01
    return duration, TransmitOutcome(TransmitResult.CORRUPT_DELIVERED, bytes(corrupted))
