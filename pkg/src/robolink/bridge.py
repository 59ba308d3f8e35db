"""Live UDP bridge: real datagrams in, simulated radio network behind them.

One datagram = one frame, no extra header. Control frames (exactly 14 bytes)
arriving on the control port are pushed through the base-station pipeline
into the simulated radio and robots, clocked by wall time; simulated robots'
telemetry emerges as 13-byte datagrams sent to the most recent control
sender's address on the telemetry port.

The ingress path never waits on the telemetry path: sends are fire-and-forget
datagrams, so a stalled telemetry reader costs control forwarding nothing
beyond the modeled per-report forwarding time inside the pipeline.
"""
from __future__ import annotations

import select
import socket
import time
from dataclasses import dataclass, field

from .codec import CONTROL_FRAME_BYTES, encode_telemetry
from .config import Config
from .experiments import build_network

_POLL_S = 0.0005  # socket wait per loop turn; bounds added egress latency


@dataclass
class BridgeCounters:
    control_in: int = 0
    malformed: int = 0
    telemetry_out: int = 0
    robot_arrivals: int = 0
    telemetry_sent_wall_ns: list = field(default_factory=list)

    def summary(self) -> str:
        return (f"control datagrams in: {self.control_in}\n"
                f"malformed dropped:    {self.malformed}\n"
                f"robot receptions:     {self.robot_arrivals}\n"
                f"telemetry out:        {self.telemetry_out}")


def serve_live(
    cfg: Config | None = None,
    control_port: int | None = None,
    telemetry_port: int | None = None,
    *,
    stop_event=None,
    max_runtime_s: float | None = None,
    ready_event=None,
    seed: int | None = None,
) -> BridgeCounters:
    """Run the bridge until stop_event is set or max_runtime_s elapses."""
    cfg = cfg or Config.default()
    control_port = control_port or cfg["live.control_port"]
    telemetry_port = telemetry_port or cfg["live.telemetry_port"]
    counters = BridgeCounters()

    net = build_network(cfg, seed=cfg["sim.seed"] if seed is None else seed)
    net.stop_sending()  # the real computer on the socket replaces the model's

    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    try:
        sock.bind(("", control_port))
    except OSError:
        sock.close()
        raise
    sock.setblocking(False)

    if ready_event is not None:
        ready_event.set()

    last_peer: str | None = None
    reports_flushed = 0
    start_ns = time.monotonic_ns()

    def now_us() -> int:
        return (time.monotonic_ns() - start_ns) // 1000

    try:
        while True:
            if stop_event is not None and stop_event.is_set():
                break
            if (max_runtime_s is not None
                    and now_us() >= max_runtime_s * 1_000_000):
                break
            readable, _, _ = select.select([sock], [], [], _POLL_S)
            if readable:
                while True:
                    try:
                        data, addr = sock.recvfrom(2048)
                    except BlockingIOError:
                        break
                    last_peer = addr[0]
                    if len(data) != CONTROL_FRAME_BYTES:
                        counters.malformed += 1
                        continue
                    counters.control_in += 1
                    net.inject_control(data, at=max(now_us(), net.sim.now))
            net.run_until(max(now_us(), net.sim.now))
            reports = net.computer_telemetry()
            while reports_flushed < len(reports):
                _, report = reports[reports_flushed]
                reports_flushed += 1
                if last_peer is None:
                    continue  # nobody to address until a sender appears
                sock.sendto(encode_telemetry(report),
                            (last_peer, telemetry_port))
                counters.telemetry_out += 1
                counters.telemetry_sent_wall_ns.append(time.monotonic_ns())
    except KeyboardInterrupt:
        pass  # Ctrl-C is the normal way to stop a foreground bridge
    finally:
        net.drain()
        result = net.collect()
        counters.robot_arrivals = sum(
            len(result.per_robot[r].arrivals) for r in range(net.n_robots))
        sock.close()
    return counters
