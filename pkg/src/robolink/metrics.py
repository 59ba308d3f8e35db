"""Reception-interval statistics over fixed windows, and CSV emission.

The primary metric is the delivery interval: the time between consecutive
receptions of frames addressed to one robot, averaged over a 500-message
window after a warmup discard (pipeline fill distorts the first arrivals).
Standard deviation is the population form so expected values are unambiguous.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass

DEFAULT_WINDOW = 500
DEFAULT_WARMUP = 20

CSV_HEADER = ("experiment,param,robot_id,n_intervals,mean_us,stddev_us,"
              "min_us,max_us,lost,corrupt_dropped,corrupt_delivered,"
              "bs_drops,seed")


class WindowUnsatisfied(ValueError):
    """Raised when too few arrivals remain after warmup to form one interval."""

    def __init__(self, obtained: int, needed: int) -> None:
        super().__init__(
            f"window unsatisfied: {obtained} arrivals after warmup, "
            f"need at least {needed}")
        self.obtained = obtained
        self.needed = needed


@dataclass(frozen=True)
class DeliveryStats:
    robot_id: int
    n_intervals: int
    mean: float
    stddev: float
    min: int
    max: int
    lost: int = 0
    corrupt_dropped: int = 0
    corrupt_delivered: int = 0
    base_station_drops: int = 0


def compute_stats(
    arrival_log: list[int],
    window: int = DEFAULT_WINDOW,
    warmup: int = DEFAULT_WARMUP,
    robot_id: int = 0,
    lost: int = 0,
    corrupt_dropped: int = 0,
    corrupt_delivered: int = 0,
    base_station_drops: int = 0,
) -> DeliveryStats:
    """Interval statistics over up to `window` gaps after a warmup discard.

    Discards the first `warmup` arrivals, then measures the consecutive
    differences of the next `window + 1` arrivals (or of all that remain,
    recording the actual count).
    """
    kept = arrival_log[warmup:warmup + window + 1]
    if len(kept) < 2:
        raise WindowUnsatisfied(obtained=len(kept), needed=2)
    diffs = [b - a for a, b in zip(kept, kept[1:])]
    return DeliveryStats(
        robot_id=robot_id,
        n_intervals=len(diffs),
        mean=sum(diffs) / len(diffs),
        stddev=statistics.pstdev(diffs),
        min=min(diffs),
        max=max(diffs),
        lost=lost,
        corrupt_dropped=corrupt_dropped,
        corrupt_delivered=corrupt_delivered,
        base_station_drops=base_station_drops,
    )


def format_param(param) -> str:
    """Render a sweep parameter compactly (5.0 -> "5", 0.4 -> "0.4")."""
    if isinstance(param, float) and param.is_integer():
        return str(int(param))
    return str(param)


def write_csv(entries, path, comments=()) -> None:
    """Write (experiment, param, seed, DeliveryStats) rows as delimited text.

    Rows are sorted by (param, robot_id); interval statistics use two
    decimals; identical inputs produce byte-identical files.
    """
    entries = list(entries)
    if not entries:
        raise ValueError("no rows to write")
    ordered = sorted(entries, key=lambda e: (e[1], e[3].robot_id))
    lines = [f"# {c}" for c in comments]
    lines.append(CSV_HEADER)
    for experiment, param, seed, s in ordered:
        lines.append(
            f"{experiment},{format_param(param)},{s.robot_id},"
            f"{s.n_intervals},{s.mean:.2f},{s.stddev:.2f},"
            f"{s.min:.2f},{s.max:.2f},{s.lost},{s.corrupt_dropped},"
            f"{s.corrupt_delivered},{s.base_station_drops},{seed}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
