"""Figures rendered from experiment CSV files.

Plotting is strictly downstream of the delimited output: these functions
read a CSV produced by `metrics.write_csv` (never live run objects), so a
figure can always be reproduced from the archived artifact alone. One PNG
per experiment type found in the file.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import CSV_HEADER  # noqa: E402

_NUMERIC = ("param", "robot_id", "n_intervals", "mean_us", "stddev_us",
            "min_us", "max_us", "lost", "corrupt_dropped",
            "corrupt_delivered", "bs_drops", "seed")


def read_csv(path) -> list[dict]:
    """Parse rows (comments skipped); numeric columns become floats/ints."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if not body or body[0] != CSV_HEADER:
        raise ValueError(f"{path}: not an experiment CSV (header mismatch)")
    names = body[0].split(",")
    rows = []
    for ln in body[1:]:
        parts = ln.split(",")
        row = dict(zip(names, parts))
        for key in _NUMERIC:
            row[key] = float(row[key])
        rows.append(row)
    return rows


def _aggregate(rows):
    """Mean-of-means across seeds for each (param, robot_id)."""
    acc: dict = {}
    for r in rows:
        acc.setdefault((r["param"], r["robot_id"]), []).append(r)
    points = []
    for (param, rid), group in sorted(acc.items()):
        mean = sum(g["mean_us"] for g in group) / len(group)
        stddev = sum(g["stddev_us"] for g in group) / len(group)
        points.append((param, rid, mean, stddev))
    return points


_LABELS = {
    "interval-sweep": ("send interval (us)", "delivery interval (us)"),
    "telemetry-sweep": ("telemetry sampling (ms, 0 = off)",
                        "delivery interval (us)"),
    "distance-sweep": ("distance (m)", "delivery interval (us)"),
    "multi-robot": ("robots", "delivery interval (us)"),
    "run": ("robot id", "delivery interval (us)"),
}


def _render_one(experiment: str, rows, path: str) -> None:
    points = _aggregate(rows)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if experiment == "run":
        xs = [rid for _, rid, _, _ in points]
        ys = [m for _, _, m, _ in points]
        es = [s for _, _, _, s in points]
        ax.bar(xs, ys, yerr=es, capsize=4)
        ax.set_xticks(xs)
    elif experiment == "multi-robot":
        for param in sorted({p for p, _, _, _ in points}):
            group = [(rid, m) for p, rid, m, _ in points if p == param]
            ax.scatter([param] * len(group), [m for _, m in group],
                       s=18, zorder=3)
        counts = sorted({p for p, _, _, _ in points})
        base = min(m for p, _, m, _ in points if p == min(counts)) / min(counts)
        ax.plot(counts, [base * c for c in counts], "--", linewidth=1,
                label="proportional reference")
        ax.legend()
    else:
        per_robot: dict = {}
        for param, rid, mean, stddev in points:
            per_robot.setdefault(rid, []).append((param, mean, stddev))
        for rid, series in sorted(per_robot.items()):
            series.sort()
            ax.errorbar([p for p, _, _ in series], [m for _, m, _ in series],
                        yerr=[s for _, _, s in series], marker="o",
                        capsize=3, label=f"robot {int(rid)}")
        if len(per_robot) > 1:
            ax.legend()
    xlabel, ylabel = _LABELS[experiment]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(experiment)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def render(csv_path, out_dir=None) -> list[str]:
    """Render one PNG per experiment type in the CSV; returns written paths."""
    rows = read_csv(csv_path)
    by_experiment: dict = {}
    for r in rows:
        by_experiment.setdefault(r["experiment"], []).append(r)
    known = {exp: rs for exp, rs in by_experiment.items() if exp in _LABELS}
    if not known:
        raise ValueError(f"{csv_path}: no renderable experiment rows")
    out_dir = out_dir or os.path.dirname(os.path.abspath(csv_path))
    written = []
    for experiment, rs in sorted(known.items()):
        path = os.path.join(out_dir, f"{experiment}.png")
        _render_one(experiment, rs, path)
        written.append(path)
    return written
