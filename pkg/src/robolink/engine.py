"""Deterministic discrete-event engine on an integer-microsecond clock.

Events are dispatched strictly in (time, sequence) order, where the
sequence number grows monotonically with each schedule call — so
simultaneous events run in the order they were scheduled, and a run is a
pure function of its inputs. The engine knows nothing about node
semantics; handlers are plain callables registered under a name.

Fractional durations from the link models are rounded half-up once, at
scheduling; composed pipelines should accumulate their sub-microsecond
terms in floats first and round the sum.
"""
from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable


def round_half_up(x: float) -> int:
    """Round to the nearest integer microsecond, ties away from the past."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SimEvent:
    time: int
    seq: int
    target: str
    kind: str
    payload: Any = None


@dataclass
class Simulator:
    trace: bool = False
    now: int = 0
    trace_lines: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._heap: list[tuple[int, int, SimEvent]] = []
        self._seq = 0
        self._handlers: dict[str, Callable[[SimEvent], None]] = {}
        self._hash = hashlib.sha256()

    def register(self, name: str, handler: Callable[[SimEvent], None]) -> None:
        self._handlers[name] = handler

    def schedule(self, time_us: int, target: str, kind: str,
                 payload: Any = None) -> SimEvent:
        if time_us < self.now:
            raise ValueError(
                f"causality violation: cannot schedule {kind!r} at {time_us} "
                f"with clock at {self.now}"
            )
        if target not in self._handlers:
            raise ValueError(f"no handler registered for target {target!r}")
        ev = SimEvent(int(time_us), self._seq, target, kind, payload)
        self._seq += 1
        heapq.heappush(self._heap, (ev.time, ev.seq, ev))
        return ev

    def run_until(self, t_end: int) -> None:
        """Dispatch every event with time <= t_end, then set the clock to t_end."""
        if t_end < self.now:
            raise ValueError(f"cannot run backwards: {t_end} < {self.now}")
        while self._heap and self._heap[0][0] <= t_end:
            _, _, ev = heapq.heappop(self._heap)
            self.now = ev.time
            line = f"{ev.time} {ev.seq} {ev.target} {ev.kind}"
            self._hash.update(line.encode())
            self._hash.update(b"\n")
            if self.trace:
                self.trace_lines.append(line)
            self._handlers[ev.target](ev)
        self.now = t_end

    def trace_hash(self) -> str:
        """SHA-256 over the dispatched-event lines; a regression fingerprint."""
        return self._hash.hexdigest()

    @property
    def pending(self) -> int:
        return len(self._heap)
