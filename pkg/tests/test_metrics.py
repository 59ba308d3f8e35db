"""Delivery-interval statistics and CSV emission.

Oracles: closed-form constant and two-point interval distributions, a
hand-computed three-point population stddev, and the telescoping identity
mean == (last - first) / n over the measured window.
"""
import math

import pytest

from robolink.metrics import (DeliveryStats, WindowUnsatisfied, compute_stats,
                              write_csv)


def test_constant_intervals_full_window():
    arrivals = [1000 * k for k in range(521)]  # 521 arrivals, 520 gaps
    s = compute_stats(arrivals, window=500, warmup=20)
    assert s.n_intervals == 500
    assert s.mean == 1000.0
    assert s.stddev == 0.0
    assert s.min == 1000 and s.max == 1000


def test_alternating_gaps_two_point_stddev():
    arrivals = [0]
    for k in range(540):
        arrivals.append(arrivals[-1] + (900 if k % 2 == 0 else 1100))
    s = compute_stats(arrivals, window=500, warmup=20)
    # 250 gaps of 900 and 250 of 1100: mean 1000, population stddev exactly 100
    assert s.n_intervals == 500
    assert s.mean == 1000.0
    assert s.stddev == 100.0
    assert s.min == 900 and s.max == 1100


def test_three_point_stddev_frozen():
    arrivals = [0, 1, 3, 6]  # gaps 1, 2, 3
    s = compute_stats(arrivals, window=500, warmup=0)
    assert s.n_intervals == 3
    assert s.mean == 2.0
    assert math.isclose(s.stddev, 0.816496580927726, rel_tol=1e-12)


def test_window_unsatisfied_reports_count():
    with pytest.raises(WindowUnsatisfied, match="window unsatisfied") as exc:
        compute_stats(list(range(10)), window=500, warmup=20)
    assert exc.value.obtained == 0
    assert isinstance(exc.value, ValueError)


def test_warmup_plus_two_is_the_floor():
    s = compute_stats([0, 100, 250], window=500, warmup=1)
    assert s.n_intervals == 1
    assert s.mean == 150.0
    with pytest.raises(WindowUnsatisfied) as exc:
        compute_stats([0, 100], window=500, warmup=1)
    assert exc.value.obtained == 1  # one arrival left after warmup, need two


def test_short_window_records_actual_count():
    arrivals = [7 * k for k in range(100)]
    s = compute_stats(arrivals, window=500, warmup=20)
    assert s.n_intervals == 79  # 100 - 20 - 1


def test_warmup_discards_distorted_head():
    arrivals = [0, 5000, 5500] + [6000 + 720 * k for k in range(30)]
    s = compute_stats(arrivals, window=500, warmup=3)
    assert s.mean == 720.0 and s.stddev == 0.0


def test_telescoping_identity():
    import random
    rng = random.Random(99)
    arrivals = [0]
    for _ in range(200):
        arrivals.append(arrivals[-1] + rng.randint(1, 5000))
    s = compute_stats(arrivals, window=120, warmup=20)
    window = arrivals[20:20 + 121]
    assert s.n_intervals == 120
    assert s.mean == (window[-1] - window[0]) / 120


def test_compute_stats_is_pure():
    arrivals = [0, 720, 1440, 2160, 2880]
    assert compute_stats(arrivals, warmup=0) == compute_stats(arrivals, warmup=0)


def _stats(rid=0, mean=720.0, **kw):
    base = dict(robot_id=rid, n_intervals=500, mean=mean, stddev=0.0,
                min=720, max=720, lost=0, corrupt_dropped=0,
                corrupt_delivered=0, base_station_drops=0)
    base.update(kw)
    return DeliveryStats(**base)


EXPECTED_HEADER = ("experiment,param,robot_id,n_intervals,mean_us,stddev_us,"
                   "min_us,max_us,lost,corrupt_dropped,corrupt_delivered,"
                   "bs_drops,seed")


def test_csv_header_and_two_decimal_formatting(tmp_path):
    path = tmp_path / "out.csv"
    write_csv([("interval-sweep", 500, 1, _stats())], path)
    lines = path.read_text().splitlines()
    assert lines[0] == EXPECTED_HEADER
    assert lines[1] == "interval-sweep,500,0,500,720.00,0.00,720.00,720.00,0,0,0,0,1"
    assert len(lines) == 2


def test_csv_rows_sorted_by_param_then_robot(tmp_path):
    path = tmp_path / "out.csv"
    entries = [("multi-robot", 6, 1, _stats(rid=2)),
               ("multi-robot", 1, 1, _stats(rid=0)),
               ("multi-robot", 6, 1, _stats(rid=0)),
               ("multi-robot", 2, 1, _stats(rid=1))]
    write_csv(entries, path)
    rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
    assert [(r[1], r[2]) for r in rows] == [("1", "0"), ("2", "1"),
                                            ("6", "0"), ("6", "2")]


def test_csv_float_params_render_compactly(tmp_path):
    path = tmp_path / "out.csv"
    write_csv([("distance-sweep", 0.4, 1, _stats()),
               ("distance-sweep", 5.0, 1, _stats())], path)
    params = [line.split(",")[1] for line in path.read_text().splitlines()[1:]]
    assert params == ["0.4", "5"]


def test_csv_comment_lines_precede_header(tmp_path):
    path = tmp_path / "out.csv"
    write_csv([("run", 0, 1, _stats())], path,
              comments=["computer.send_interval_us=500", "sim.seed=1"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# computer.send_interval_us=500"
    assert lines[1] == "# sim.seed=1"
    assert lines[2] == EXPECTED_HEADER


def test_csv_rewrite_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    entries = [("interval-sweep", 500, s, _stats(mean=719.5 + s))
               for s in range(1, 4)]
    write_csv(entries, a, comments=["sim.seed=1"])
    write_csv(entries, b, comments=["sim.seed=1"])
    assert a.read_bytes() == b.read_bytes()


def test_csv_empty_rejected(tmp_path):
    with pytest.raises(ValueError, match="no rows"):
        write_csv([], tmp_path / "out.csv")
