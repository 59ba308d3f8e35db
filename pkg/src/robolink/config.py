"""Flat dotted-key scenario configuration.

One file/line format: `section.key = value`, `#` comments, blank lines
ignored. Every key is declared below with its type, default, and a domain
check; unknown keys are rejected so typos fail loudly instead of silently
running the default scenario.
"""
from __future__ import annotations


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1"):
        return True
    if low in ("false", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_loss_table(text: str) -> tuple[tuple[float, float], ...]:
    text = text.strip()
    if not text:
        return ()
    pairs = []
    for item in text.split(","):
        threshold, _, prob = item.partition(":")
        pairs.append((float(threshold), float(prob)))
    return tuple(pairs)


def _render_loss_table(table) -> str:
    return ",".join(f"{_render_number(t)}:{_render_number(p)}" for t, p in table)


def _render_number(x) -> str:
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


def _probability(x) -> bool:
    return 0.0 <= x <= 1.0


# key -> (parser, default, domain check, description)
_SCHEMA: dict = {
    "computer.send_interval_us": (int, 500, lambda v: v > 0,
                                  "gap between consecutive control sends"),
    "robots.count": (int, 1, lambda v: 1 <= v <= 16, "robots on the field"),
    "robots.telemetry_interval_ms": (int, 0, lambda v: v >= 0,
                                     "per-robot telemetry period (0 = off)"),
    "uplink.kind": (str, "ethernet", lambda v: v in ("ethernet", "serial"),
                    "computer-to-base-station transport"),
    "uplink.latency_us": (float, 50.0, lambda v: v >= 0,
                          "one-way ethernet latency"),
    "uplink.baud": (int, 115200, lambda v: v > 0, "serial line rate"),
    "uplink.bits_per_byte": (int, 10, lambda v: v > 0,
                             "serial framing (start + 8 + stop)"),
    "uplink.buffer_bytes": (int, 64, lambda v: v > 0, "serial FIFO capacity"),
    "radio.data_rate_bps": (int, 2_000_000, lambda v: v > 0,
                            "over-the-air bit rate"),
    "radio.spi_rate_bps": (int, 10_000_000, lambda v: v > 0,
                           "radio chip bus rate"),
    "base_station.service_time_us": (int, 620, lambda v: v >= 0,
                                     "per-frame processing before radio TX"),
    "base_station.telemetry_forward_time_us": (int, 675, lambda v: v >= 0,
                                               "per-report forwarding cost"),
    "base_station.fifo_depth": (int, 3, lambda v: v >= 1,
                                "frames held including the one in service"),
    "base_station.telemetry_blocks_control": (_parse_bool, True, None,
                                              "forwarding shares the processor"),
    "channel.p_loss": (float, 0.0, _probability, "frame loss probability"),
    "channel.p_bitflip": (float, 0.0, _probability, "per-bit flip probability"),
    "channel.distance_m": (float, 0.4, lambda v: v >= 0,
                           "robot distance used by the loss table"),
    "channel.collisions_enabled": (_parse_bool, True, None,
                                   "overlapping telemetry frames all lost"),
    "channel.loss_table": (_parse_loss_table, (), None,
                           "piecewise distance->p_loss, e.g. 0:0.0,3:0.2"),
    "sim.seed": (int, 1, None, "base random seed"),
    "sim.window": (int, 500, lambda v: v >= 1, "intervals per measurement"),
    "sim.warmup": (int, 20, lambda v: v >= 0, "arrivals discarded up front"),
    "live.control_port": (int, 10010, lambda v: 1 <= v <= 65535,
                          "UDP ingress port for control frames"),
    "live.telemetry_port": (int, 10011, lambda v: 1 <= v <= 65535,
                            "UDP egress port for telemetry frames"),
}


class Config:
    """Typed view over the scenario key-value table."""

    def __init__(self, values: dict) -> None:
        self._values = values

    @classmethod
    def default(cls) -> "Config":
        return cls({key: default for key, (_, default, _, _) in _SCHEMA.items()})

    @classmethod
    def from_file(cls, path) -> "Config":
        cfg = cls.default()
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(
                        f"{path}:{lineno}: expected 'key = value', got {line!r}")
                try:
                    cfg.set(key.strip(), value.strip())
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        return cfg

    def set(self, key: str, text: str) -> None:
        if key not in _SCHEMA:
            raise ValueError(f"unknown config key {key!r}")
        parser, _, check, _ = _SCHEMA[key]
        try:
            value = parser(text)
        except ValueError as exc:
            raise ValueError(f"bad value for {key}: {exc}") from None
        if check is not None and not check(value):
            raise ValueError(f"value out of range for {key}: {text!r}")
        self._values[key] = value

    def __getitem__(self, key: str):
        if key not in _SCHEMA:
            raise ValueError(f"unknown config key {key!r}")
        return self._values[key]

    def values(self) -> dict:
        return dict(self._values)

    def copy(self) -> "Config":
        return Config(dict(self._values))

    def as_comments(self) -> list[str]:
        """Render every key as `key=value`, sorted, parseable back."""
        lines = []
        for key in sorted(self._values):
            value = self._values[key]
            if key == "channel.loss_table":
                text = _render_loss_table(value)
            elif isinstance(value, bool):
                text = "true" if value else "false"
            else:
                text = _render_number(value)
            lines.append(f"{key}={text}")
        return lines


def describe_keys() -> list[str]:
    """One line per key: name, default, description (for --help output)."""
    out = []
    for key in sorted(_SCHEMA):
        _, default, _, desc = _SCHEMA[key]
        out.append(f"{key} (default {default!r}): {desc}")
    return out
