"""Command-line front end.

Each experiment subcommand runs a parameter sweep, writes the per-robot
delivery statistics as CSV (prefixed with the full configuration as
comment lines so a result file is self-describing), prints an aggregated
summary table, and reports a digest over the per-run event-trace hashes
so two invocations can be compared for bit-identical behaviour.

Exit status: 0 on success, 1 if any run could not fill its measurement
window, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import experiments, metrics
from .config import Config, describe_keys


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}") from None


def _build_config(args) -> Config:
    cfg = Config.from_file(args.config) if args.config else Config.default()
    for pair in args.set or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"expected KEY=VALUE, got {pair!r}")
        cfg.set(key.strip(), value.strip())
    if args.seed is not None:
        cfg.set("sim.seed", str(args.seed))
    return cfg


def _aggregate_rows(entries):
    """Collapse per-seed rows into one line per (param, robot)."""
    groups: dict = {}
    for _exp, param, _seed, s in entries:
        g = groups.setdefault((param, s.robot_id), {
            "runs": 0, "good": 0, "n": 0, "mean": 0.0, "stddev": 0.0,
            "min": None, "max": None, "lost": 0, "corrupt": 0, "drops": 0,
        })
        g["runs"] += 1
        g["lost"] += s.lost
        g["corrupt"] += s.corrupt_dropped + s.corrupt_delivered
        g["drops"] += s.base_station_drops
        if s.n_intervals > 0:
            g["good"] += 1
            g["n"] += s.n_intervals
            g["mean"] += s.mean
            g["stddev"] += s.stddev
            g["min"] = s.min if g["min"] is None else min(g["min"], s.min)
            g["max"] = s.max if g["max"] is None else max(g["max"], s.max)
    return groups


def _print_summary(title: str, entries, stream=None) -> None:
    stream = stream or sys.stdout
    groups = _aggregate_rows(entries)
    print(title, file=stream)
    header = (f"{'param':>10} {'robot':>5} {'runs':>4} {'n':>5} "
              f"{'mean_us':>10} {'stddev_us':>10} {'min_us':>8} {'max_us':>8} "
              f"{'lost':>6} {'corrupt':>7} {'bs_drops':>8}")
    print(header, file=stream)
    for (param, robot_id), g in sorted(groups.items(),
                                       key=lambda kv: (kv[0][0], kv[0][1])):
        good = g["good"]
        if good:
            n = g["n"] // good
            mean = f"{g['mean'] / good:.2f}"
            stddev = f"{g['stddev'] / good:.2f}"
            lo, hi = str(g["min"]), str(g["max"])
        else:
            n, mean, stddev, lo, hi = 0, "-", "-", "-", "-"
        print(f"{metrics.format_param(param):>10} {robot_id:>5} "
              f"{g['runs']:>4} {n:>5} {mean:>10} {stddev:>10} {lo:>8} {hi:>8} "
              f"{g['lost']:>6} {g['corrupt']:>7} {g['drops']:>8}",
              file=stream)


def _trace_digest(trace_hashes: dict) -> str:
    h = hashlib.sha256()
    for (param, seed) in sorted(trace_hashes, key=lambda k: (str(k[0]), k[1])):
        h.update(f"{param}:{seed}:{trace_hashes[(param, seed)]}\n".encode())
    return h.hexdigest()


def _write_trace(out_csv: Path, traces: dict) -> Path:
    path = Path(str(out_csv) + ".trace")
    chunks = []
    for (param, seed) in sorted(traces, key=lambda k: (str(k[0]), k[1])):
        chunks.append(f"# param={metrics.format_param(param)} seed={seed}")
        chunks.extend(traces[(param, seed)])
    path.write_text("\n".join(chunks) + "\n", encoding="utf-8")
    return path


def _render_plots(csv_path) -> int:
    from . import figures  # deferred: pulls in matplotlib
    try:
        written = figures.render(csv_path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for png in written:
        print(f"wrote {png}")
    return 0


def _finish_experiment(args, cfg: Config, result, default_repeat: int) -> int:
    out = Path(args.out) if args.out else Path(f"{args.command}.csv")
    metrics.write_csv(result.entries, out, comments=cfg.as_comments())
    seeds = default_repeat if args.repeat is None else args.repeat
    _print_summary(f"{args.command}  ({seeds} seed(s) per point)",
                   result.entries)
    print(f"event-trace digest: {_trace_digest(result.trace_hashes)}")
    print(f"wrote {out}")
    if args.trace:
        print(f"wrote {_write_trace(out, result.traces)}")
    if args.plot:
        rc = _render_plots(out)
        if rc:
            return rc
    if result.unsatisfied:
        for param, seed, rid in result.unsatisfied:
            print(f"warning: measurement window unsatisfied for "
                  f"param={metrics.format_param(param)} seed={seed} "
                  f"robot={rid}", file=sys.stderr)
        return 1
    return 0


def _run_experiment(args) -> int:
    cfg = _build_config(args)
    repeat = args.repeat
    if args.command == "interval-sweep":
        result = experiments.cmd_interval_sweep(
            cfg, args.intervals, repeat=repeat or 25, trace=args.trace)
        return _finish_experiment(args, cfg, result, 25)
    if args.command == "telemetry-sweep":
        result, increases = experiments.cmd_telemetry_sweep(
            cfg, args.sampling, repeat=repeat or 25, trace=args.trace)
        rc = _finish_experiment(args, cfg, result, 25)
        print("mean delivery interval vs telemetry off:")
        for period in sorted(increases):
            print(f"  {period} ms: {increases[period]:+.2f}%")
        return rc
    if args.command == "distance-sweep":
        result = experiments.cmd_distance_sweep(
            cfg, args.distances, repeat=repeat or 25, trace=args.trace)
        return _finish_experiment(args, cfg, result, 25)
    if args.command == "multi-robot":
        result = experiments.cmd_multi_robot(
            cfg, args.counts, repeat=repeat or 25,
            pace_to_pipeline=not args.no_pacing, trace=args.trace)
        return _finish_experiment(args, cfg, result, 25)
    if args.command == "run":
        result = experiments.cmd_run(cfg, repeat=repeat or 1,
                                     trace=args.trace)
        return _finish_experiment(args, cfg, result, 1)
    raise AssertionError(f"unhandled command {args.command!r}")


def _run_serve(args) -> int:
    from . import bridge  # deferred: opens sockets only when asked to
    cfg = _build_config(args)
    if args.control_port is not None:
        cfg.set("live.control_port", str(args.control_port))
    if args.telemetry_port is not None:
        cfg.set("live.telemetry_port", str(args.telemetry_port))
    print(f"bridge listening: control udp/{cfg['live.control_port']} -> "
          f"telemetry udp/{cfg['live.telemetry_port']}"
          + (f" (for {args.duration:g}s)" if args.duration else ""))
    counters = bridge.serve_live(cfg, max_runtime_s=args.duration)
    print(counters.summary())
    return 0


def _run_plot(args) -> int:
    return _render_plots(args.csv)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robolink",
        description="Deterministic simulator for a radio control-and-"
                    "telemetry network for mobile robots.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="configuration keys (for --set / --config):\n  "
               + "\n  ".join(describe_keys()),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="read key=value lines from PATH")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable, "
                             "applied after --config)")
    common.add_argument("--seed", type=int, metavar="N",
                        help="base random seed (overrides sim.seed)")
    runner = argparse.ArgumentParser(add_help=False, parents=[common])
    runner.add_argument("--repeat", type=int, metavar="N",
                        help="independent seeds per parameter point "
                             "(default: 25 for sweeps, 1 for run)")
    runner.add_argument("--out", metavar="PATH",
                        help="CSV output path (default: <command>.csv)")
    runner.add_argument("--trace", action="store_true",
                        help="also write the full event dump to <out>.trace")
    runner.add_argument("--plot", action="store_true",
                        help="render figures from the CSV after writing it")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interval-sweep", parents=[runner],
                       help="sweep the computer's control send interval")
    p.add_argument("--intervals", type=_int_list, default=[250, 500, 1000, 1900],
                   metavar="US[,US...]", help="send intervals in microseconds")

    p = sub.add_parser("telemetry-sweep", parents=[runner],
                       help="measure control slowdown vs telemetry sampling "
                            "period (telemetry-off baseline always included)")
    p.add_argument("--sampling", type=_int_list, default=[200, 50, 10],
                   metavar="MS[,MS...]", help="telemetry periods in ms")

    p = sub.add_parser("distance-sweep", parents=[runner],
                       help="sweep the radio distance")
    p.add_argument("--distances", type=_float_list, default=[0.4, 2.5, 5.0],
                   metavar="M[,M...]", help="distances in metres")

    p = sub.add_parser("multi-robot", parents=[runner],
                       help="sweep the number of robots sharing the channel")
    p.add_argument("--counts", type=_int_list, default=[1, 2, 6],
                   metavar="N[,N...]", help="robot counts (1..16)")
    p.add_argument("--no-pacing", action="store_true",
                   help="keep the configured send interval instead of pacing "
                        "sends at the base-station pipeline rate")

    sub.add_parser("run", parents=[runner],
                   help="run the configuration exactly as given")

    p = sub.add_parser("serve", parents=[common],
                       help="bridge real UDP traffic through the simulated "
                            "network in wall-clock time")
    p.add_argument("--control-port", type=int, metavar="PORT",
                   help="UDP port to listen on for 14-byte control frames")
    p.add_argument("--telemetry-port", type=int, metavar="PORT",
                   help="UDP port telemetry frames are sent back to")
    p.add_argument("--duration", type=float, metavar="SECONDS",
                   help="stop after this long (default: run until Ctrl-C)")

    p = sub.add_parser("plot", help="render figures from an existing CSV")
    p.add_argument("csv", help="CSV file produced by an experiment command")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _run_serve(args)
        if args.command == "plot":
            return _run_plot(args)
        return _run_experiment(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
