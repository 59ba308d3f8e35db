"""Node state machines wired into a simulated control/telemetry network.

Topology and timing:

    computer --(uplink: ethernet 50 us latency | serial 115200 baud)--> base station
    base station --(control radio, one frame on air at a time)--> all robots
    robot --(telemetry radio, shared frequency)--> base station --(uplink)--> computer

The base station is store-and-forward and content-blind: control frames are
queued verbatim into a depth-limited FIFO (drop-newest) and each occupies
the control pipeline for service_time + spi_time + air_time, accumulated in
floats and rounded once. Telemetry forwarding shares the processor: while a
report is being forwarded the *next* control service start waits until the
forward completes (the frame already in service is unaffected), so each
telemetry frame can delay control by at most telemetry_forward_time.

Serial uplink bookkeeping: the computer stuffs whole frames into the 64-byte
buffer feeding the line; occupancy (queued + in flight) is sampled at each
submission and drops by one frame whenever the line finishes clocking one
out. Sustained 14-byte sends every T microseconds against the
1215.28-microsecond line time leave 14*(n - floor(T*n/1215.28)) bytes before
submission n, so e.g. T=800 first exceeds the buffer on submission index 9.

Every control frame's journey ends in exactly one disposition:
  "bs_drop"            dropped from the full base-station FIFO
  "lost"               radio loss on the control channel
  "corrupt_dropped"    radio bit flip, caught by the (perfect) radio CRC
  "corrupt_delivered"  reached the robots with bytes != the bytes sent
                       (serial overflow corruption; no CRC on that path)
  "delivered"          reached the robots bit-exact
Telemetry frames are journaled separately (collisions, channel loss,
forwarding); overlapping telemetry transmissions on the shared frequency
lose every frame involved when collisions are enabled.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import codec, links
from .engine import Simulator, round_half_up

# event kinds
COMPUTER_SEND = "COMPUTER_SEND"
UPLINK_ARRIVAL = "UPLINK_ARRIVAL"
SERIAL_LINE_DONE = "SERIAL_LINE_DONE"
CONTROL_START = "CONTROL_START"
RADIO_TX_DONE = "RADIO_TX_DONE"
RADIO_RX = "RADIO_RX"
TELEMETRY_TIMER = "TELEMETRY_TIMER"
TELEMETRY_RX = "TELEMETRY_RX"
TELEMETRY_FORWARD_DONE = "TELEMETRY_FORWARD_DONE"
TELEMETRY_DELIVERED = "TELEMETRY_DELIVERED"

TELEMETRY_CHECK_PERIOD_US = 1000  # robots poll their telemetry timer at 1 ms

# processor time the base station spends relaying one telemetry report to the
# computer; calibrated so telemetry load measurably stretches control service
DEFAULT_TELEMETRY_FORWARD_US = 675

DEFAULT_SERVICE_TIME_US = 620
DEFAULT_FIFO_DEPTH = 3


def default_command(robot_id: int) -> codec.ControlCommand:
    return codec.ControlCommand(robot_id=robot_id, vx=1.0, vy=-1.0, omega=0.5)


def default_telemetry(robot_id: int) -> codec.TelemetryReport:
    return codec.TelemetryReport(robot_id=robot_id, motor1=10.0, motor2=-10.0,
                                 battery=168)


@dataclass
class Journey:
    """Lifecycle record of one control frame, from submission to disposition."""
    robot_id: int | None
    original: bytes
    sent_at: int
    disposition: str | None = None


@dataclass
class RobotOutcome:
    arrivals: list[int]
    sent: int
    delivered: int
    lost: int
    corrupt_dropped: int
    corrupt_delivered: int
    bs_drops: int
    in_flight: int


@dataclass
class TelemetryOutcome:
    sent_total: int
    send_times: dict[int, list[int]]
    collided: int
    lost: int
    corrupt_dropped: int
    reached_base: int
    forwarded: int
    delivered_to_computer: int


@dataclass
class RunResult:
    per_robot: dict[int, RobotOutcome]
    telemetry: TelemetryOutcome
    delivered_frames: list[bytes]
    malformed_rx: int
    trace_hash: str
    now: int


class Network:
    """Builds and runs one computer / base station / N robots scenario."""

    def __init__(
        self,
        n_robots: int = 1,
        send_interval_us: int = 500,
        telemetry_interval_ms: int = 0,
        uplink: links.UplinkModel | None = None,
        control_channel: links.ChannelModel | None = None,
        telemetry_channel: links.ChannelModel | None = None,
        control_radio: links.RadioConfig = links.CONTROL_RADIO,
        telemetry_radio: links.RadioConfig = links.TELEMETRY_RADIO,
        service_time_us: int = DEFAULT_SERVICE_TIME_US,
        telemetry_forward_time_us: int = DEFAULT_TELEMETRY_FORWARD_US,
        fifo_depth: int = DEFAULT_FIFO_DEPTH,
        telemetry_blocks_control: bool = True,
        seed: int = 1,
        trace: bool = False,
        command_source=default_command,
        telemetry_source=default_telemetry,
        telemetry_phases_us: list[int] | None = None,
    ) -> None:
        if not 1 <= n_robots <= 16:
            raise ValueError(f"n_robots must be in [1, 16], got {n_robots}")
        if send_interval_us <= 0:
            raise ValueError("send_interval_us must be positive")
        self.sim = Simulator(trace=trace)
        self.n_robots = n_robots
        self.send_interval_us = int(send_interval_us)
        self.telemetry_interval_us = int(telemetry_interval_ms) * 1000
        self.uplink = uplink or links.UplinkModel(kind="ethernet")
        self.control_channel = control_channel or links.ChannelModel()
        self.telemetry_channel = telemetry_channel or links.ChannelModel()
        self.control_radio = control_radio
        self.telemetry_radio = telemetry_radio
        self.service_time_us = service_time_us
        self.telemetry_forward_time_us = telemetry_forward_time_us
        self.fifo_depth = fifo_depth
        self.telemetry_blocks_control = telemetry_blocks_control
        self.command_source = command_source
        self.telemetry_source = telemetry_source

        self._control_rng = random.Random(f"{seed}:control")
        self._telemetry_rng = random.Random(f"{seed}:telemetry")

        # computer state
        self._active = True
        self._cursor = 0
        self.journeys: list[Journey] = []
        self._computer_telemetry: list[tuple[int, codec.TelemetryReport]] = []

        # serial line state (occupancy includes the frame on the wire)
        self._serial_fifo_bytes = 0
        self._serial_busy_until = 0.0

        # base-station state
        self._bs_fifo: list[tuple[bytes, Journey]] = []
        self._bs_in_service = False
        self._bs_start_pending = False
        self._bs_forward_busy_until = 0
        self.delivered_frames: list[bytes] = []
        self._malformed_rx = 0

        # telemetry air medium: active transmissions + full journal
        self._tele_active: list[tuple[int, dict]] = []
        self._tele_journal: list[dict] = []

        # robots
        self._arrivals: dict[int, list[int]] = {rid: [] for rid in range(n_robots)}
        if telemetry_phases_us is None:
            if self.telemetry_interval_us > 0:
                telemetry_phases_us = [
                    rid * self.telemetry_interval_us // n_robots
                    for rid in range(n_robots)
                ]
            else:
                telemetry_phases_us = [0] * n_robots
        if len(telemetry_phases_us) != n_robots:
            raise ValueError("telemetry_phases_us must list one phase per robot")
        self._last_telemetry = {rid: -telemetry_phases_us[rid]
                                for rid in range(n_robots)}

        # downlink (base station -> computer) delay for telemetry reports
        if self.uplink.kind == "ethernet":
            self._downlink_us = self.uplink.latency_us
        else:
            self._downlink_us = (codec.TELEMETRY_FRAME_BYTES
                                 * self.uplink.bits_per_byte * 1e6 / self.uplink.baud)

        self.sim.register("computer", self._on_computer)
        self.sim.register("serial-line", self._on_serial_line)
        self.sim.register("base", self._on_base)
        for rid in range(n_robots):
            self.sim.register(f"robot{rid}", self._make_robot_handler(rid))

        self.sim.schedule(0, "computer", COMPUTER_SEND)
        if self.telemetry_interval_us > 0:
            for rid in range(n_robots):
                self.sim.schedule(TELEMETRY_CHECK_PERIOD_US, f"robot{rid}",
                                  TELEMETRY_TIMER)

    # --- computer ---------------------------------------------------------

    def _on_computer(self, ev) -> None:
        if ev.kind == COMPUTER_SEND:
            if not self._active:
                return
            rid = self._cursor
            self._cursor = (self._cursor + 1) % self.n_robots
            frame = codec.encode_control(self.command_source(rid))
            journey = Journey(robot_id=rid, original=frame, sent_at=ev.time)
            self.journeys.append(journey)
            self._submit_uplink(frame, journey, ev.time)
            self.sim.schedule(ev.time + self.send_interval_us, "computer",
                              COMPUTER_SEND)
        elif ev.kind == TELEMETRY_DELIVERED:
            report = codec.decode_telemetry(ev.payload)
            self._computer_telemetry.append((ev.time, report))

    def _submit_uplink(self, frame: bytes, journey: Journey, now: int) -> None:
        if self.uplink.kind == "ethernet":
            self.sim.schedule(now + round_half_up(self.uplink.latency_us),
                              "base", UPLINK_ARRIVAL, (frame, journey))
            return
        duration, outcome = links.serial_transfer(frame, self.uplink,
                                                  self._serial_fifo_bytes)
        self._serial_fifo_bytes += len(frame)
        start = max(float(now), self._serial_busy_until)
        self._serial_busy_until = start + duration
        self.sim.schedule(round_half_up(self._serial_busy_until), "serial-line",
                          SERIAL_LINE_DONE, (len(frame), outcome.frame, journey))

    def _on_serial_line(self, ev) -> None:
        nbytes, frame, journey = ev.payload
        self._serial_fifo_bytes -= nbytes
        self.sim.schedule(ev.time, "base", UPLINK_ARRIVAL, (frame, journey))

    # --- base station -----------------------------------------------------

    def _on_base(self, ev) -> None:
        if ev.kind == UPLINK_ARRIVAL:
            frame, journey = ev.payload
            # fifo_depth counts every frame held at the base station,
            # including the one occupying the service pipeline
            outstanding = len(self._bs_fifo) + (1 if self._bs_in_service else 0)
            if outstanding >= self.fifo_depth:
                journey.disposition = "bs_drop"
            else:
                self._bs_fifo.append((frame, journey))
                self._maybe_start_control(ev.time)
        elif ev.kind == CONTROL_START:
            self._bs_start_pending = False
            self._maybe_start_control(ev.time)
        elif ev.kind == RADIO_TX_DONE:
            self._bs_in_service = False
            frame, journey = ev.payload
            outcome = links.channel_transmit(frame, self.control_channel,
                                             self._control_rng)
            if outcome.result is links.TransmitResult.LOST:
                journey.disposition = "lost"
            elif outcome.result is links.TransmitResult.CORRUPT_DROPPED:
                journey.disposition = "corrupt_dropped"
            else:
                journey.disposition = ("delivered" if outcome.frame == journey.original
                                       else "corrupt_delivered")
                self.delivered_frames.append(outcome.frame)
                for rid in range(self.n_robots):
                    self.sim.schedule(ev.time, f"robot{rid}", RADIO_RX,
                                      outcome.frame)
            self._maybe_start_control(ev.time)
        elif ev.kind == TELEMETRY_RX:
            frame, token = ev.payload
            if token["cancelled"]:
                return
            token["rx_done"] = True
            start = max(ev.time, self._bs_forward_busy_until)
            self._bs_forward_busy_until = start + self.telemetry_forward_time_us
            self.sim.schedule(self._bs_forward_busy_until, "base",
                              TELEMETRY_FORWARD_DONE, (frame, token))
        elif ev.kind == TELEMETRY_FORWARD_DONE:
            frame, token = ev.payload
            token["forwarded"] = True
            self.sim.schedule(ev.time + round_half_up(self._downlink_us),
                              "computer", TELEMETRY_DELIVERED, frame)

    def _maybe_start_control(self, now: int) -> None:
        if self._bs_in_service or not self._bs_fifo:
            return
        start = now
        if self.telemetry_blocks_control:
            start = max(now, self._bs_forward_busy_until)
        if start > now:
            if not self._bs_start_pending:
                self._bs_start_pending = True
                self.sim.schedule(start, "base", CONTROL_START)
            return
        frame, journey = self._bs_fifo.pop(0)
        self._bs_in_service = True
        total = (self.service_time_us
                 + links.spi_time(len(frame), self.control_radio)
                 + links.air_time(len(frame), self.control_radio))
        self.sim.schedule(round_half_up(now + total), "base", RADIO_TX_DONE,
                          (frame, journey))

    # --- robots -----------------------------------------------------------

    def _make_robot_handler(self, rid: int):
        def handler(ev) -> None:
            if ev.kind == RADIO_RX:
                try:
                    cmd = codec.decode_control(ev.payload)
                except ValueError:
                    self._malformed_rx += 1
                    return
                if cmd.robot_id == rid:
                    self._arrivals[rid].append(ev.time)
            elif ev.kind == TELEMETRY_TIMER:
                self.sim.schedule(ev.time + TELEMETRY_CHECK_PERIOD_US,
                                  f"robot{rid}", TELEMETRY_TIMER)
                if ev.time - self._last_telemetry[rid] >= self.telemetry_interval_us:
                    self._last_telemetry[rid] = ev.time
                    frame = codec.encode_telemetry(self.telemetry_source(rid))
                    self._telemetry_transmit(frame, rid, ev.time)
        return handler

    def _telemetry_transmit(self, frame: bytes, rid: int, now: int) -> None:
        air = round_half_up(links.air_time(len(frame), self.telemetry_radio))
        end = now + air
        self._tele_active = [(e, t) for e, t in self._tele_active if e > now]
        token = {"rid": rid, "tx_time": now, "cancelled": False,
                 "channel": None, "rx_done": False, "forwarded": False}
        self._tele_journal.append(token)
        if self.telemetry_channel.collisions_enabled and self._tele_active:
            token["cancelled"] = True
            for _, other in self._tele_active:
                other["cancelled"] = True
            self._tele_active.append((end, token))
            return
        outcome = links.channel_transmit(frame, self.telemetry_channel,
                                         self._telemetry_rng)
        token["channel"] = outcome.result.value
        self._tele_active.append((end, token))
        if outcome.result is links.TransmitResult.DELIVERED:
            self.sim.schedule(end, "base", TELEMETRY_RX, (outcome.frame, token))

    # --- running and reporting ---------------------------------------------

    def run_until(self, t_end: int) -> None:
        self.sim.run_until(t_end)

    def stop_sending(self) -> None:
        self._active = False

    def drain(self, grace_us: int = 30_000) -> None:
        """Stop the computer and let every in-flight control frame resolve."""
        self.stop_sending()
        self.sim.run_until(self.sim.now + grace_us)

    def inject_control(self, frame: bytes, at: int) -> Journey:
        """Drop a raw frame onto the base station's uplink (test/tool hook)."""
        rid = frame[0] & 0x0F if len(frame) == codec.CONTROL_FRAME_BYTES else None
        journey = Journey(robot_id=rid, original=frame, sent_at=at)
        self.journeys.append(journey)
        self.sim.schedule(at, "base", UPLINK_ARRIVAL, (frame, journey))
        return journey

    def trace_hash(self) -> str:
        return self.sim.trace_hash()

    def computer_telemetry(self) -> list[tuple[int, codec.TelemetryReport]]:
        return list(self._computer_telemetry)

    def journey_dispositions(self, robot_id: int) -> list[str | None]:
        return [j.disposition for j in self.journeys if j.robot_id == robot_id]

    def collect(self) -> RunResult:
        per_robot = {}
        for rid in range(self.n_robots):
            mine = [j for j in self.journeys if j.robot_id == rid]
            buckets = {"delivered": 0, "lost": 0, "corrupt_dropped": 0,
                       "corrupt_delivered": 0, "bs_drop": 0, None: 0}
            for j in mine:
                buckets[j.disposition] += 1
            per_robot[rid] = RobotOutcome(
                arrivals=list(self._arrivals[rid]),
                sent=len(mine),
                delivered=buckets["delivered"],
                lost=buckets["lost"],
                corrupt_dropped=buckets["corrupt_dropped"],
                corrupt_delivered=buckets["corrupt_delivered"],
                bs_drops=buckets["bs_drop"],
                in_flight=buckets[None],
            )
        journal = self._tele_journal
        telemetry = TelemetryOutcome(
            sent_total=len(journal),
            send_times={rid: [t["tx_time"] for t in journal if t["rid"] == rid]
                        for rid in range(self.n_robots)},
            collided=sum(1 for t in journal if t["cancelled"]),
            lost=sum(1 for t in journal
                     if not t["cancelled"] and t["channel"] == "lost"),
            corrupt_dropped=sum(1 for t in journal
                                if not t["cancelled"]
                                and t["channel"] == "corrupt_dropped"),
            reached_base=sum(1 for t in journal
                             if t["rx_done"] and not t["cancelled"]),
            forwarded=sum(1 for t in journal if t["forwarded"]),
            delivered_to_computer=len(self._computer_telemetry),
        )
        return RunResult(
            per_robot=per_robot,
            telemetry=telemetry,
            delivered_frames=list(self.delivered_frames),
            malformed_rx=self._malformed_rx,
            trace_hash=self.trace_hash(),
            now=self.sim.now,
        )
