"""Scenario, report and curve text formats, built-in presets and random corpora.

Scenario files are line oriented ``key: value`` text::

    # comments and blank lines are ignored
    label: example2
    channel: siso
    bits: 10
    arrival: t=0 e=2
    arrival: t=1 e=1
"""
from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .channel import LOG2E, ChannelModel
from .schedule import (Diagnostic, EnergyTrace, RunReport, Schedule, Segment,
                       bits_delivered, energy_used)

DECIMALS = 9


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<scenario>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


_KV = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*:\s*(.*?)\s*$")


def _fields(text: str, lineno: int, source: str) -> dict[str, str]:
    out = {}
    for token in text.split():
        if "=" not in token:
            raise ScenarioError(f"expected name=value, got {token!r}", lineno, source)
        k, v = token.split("=", 1)
        out[k] = v
    return out


def _number(text: str, what: str, lineno: int, source: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioError(f"{what} is not a number: {text!r}", lineno, source) from None
    if not math.isfinite(value):
        raise ScenarioError(f"{what} must be finite", lineno, source)
    return value


def parse_scenario(text: str, source: str = "<scenario>") -> EnergyTrace:
    label, channel, bits = "", None, None
    arrivals: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KV.match(line)
        if not m:
            raise ScenarioError(f"cannot parse line {raw!r}", lineno, source)
        key, value = m.group(1).lower(), m.group(2)
        if key == "label":
            label = value
        elif key == "channel":
            try:
                channel = ChannelModel.parse(value)
            except ValueError as exc:
                raise ScenarioError(str(exc), lineno, source) from None
        elif key == "bits":
            bits = _number(value, "bits", lineno, source)
            if bits <= 0:
                raise ScenarioError("bits must be positive", lineno, source)
        elif key == "arrival":
            f = _fields(value, lineno, source)
            if set(f) != {"t", "e"}:
                raise ScenarioError("arrival needs exactly t=<time> e=<energy>", lineno, source)
            t = _number(f["t"], "arrival time", lineno, source)
            e = _number(f["e"], "arrival energy", lineno, source)
            if e <= 0:
                raise ScenarioError(f"arrival energy must be positive, got {e}", lineno, source)
            if t < 0:
                raise ScenarioError(f"arrival time must be >= 0, got {t}", lineno, source)
            if arrivals and t <= arrivals[-1][0]:
                raise ScenarioError(f"arrival times must strictly increase ({arrivals[-1][0]} then {t})",
                                    lineno, source)
            arrivals.append((t, e))
        else:
            raise ScenarioError(f"unknown key {key!r}", lineno, source)
    if bits is None:
        raise ScenarioError("missing 'bits'", None, source)
    if not arrivals:
        raise ScenarioError("no 'arrival' lines", None, source)
    return EnergyTrace.from_pairs(arrivals, bits, channel or ChannelModel.SISO, label)


def load_scenario(path: str | Path) -> EnergyTrace:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def format_scenario(trace: EnergyTrace) -> str:
    lines = []
    if trace.label:
        lines.append(f"label: {trace.label}")
    lines.append(f"channel: {trace.channel.value}")
    lines.append(f"bits: {trace.bits!r}")
    lines += [f"arrival: t={a.time!r} e={a.energy!r}" for a in trace.events]
    return "\n".join(lines) + "\n"


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return "none"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{DECIMALS}f}"


def _unfmt(s: str) -> Optional[float]:
    return None if s == "none" else float(s)


def format_report(report: RunReport, trace: EnergyTrace) -> str:
    """Structured text with stable keys and fixed 9-decimal numbers."""
    lines = [
        f"algorithm: {report.algorithm}",
        f"label: {trace.label}",
        f"channel: {trace.channel.value}",
        f"bits: {_fmt(trace.bits)}",
        f"feasible: {'true' if report.feasible else 'false'}",
        f"completion_time: {_fmt(report.completion_time)}",
    ]
    for s in report.schedule:
        lines.append(
            f"segment: start={_fmt(s.start)} duration={_fmt(s.duration)} power={_fmt(s.power)} "
            f"bits={_fmt(bits_delivered(report.schedule, trace.channel, s.end))} "
            f"energy={_fmt(energy_used(report.schedule, s.end))}")
    for d in report.diagnostics:
        lines.append(
            f"diagnostic: time={_fmt(d.time)} energy_remaining={_fmt(d.energy_remaining)} "
            f"bits_remaining={_fmt(d.bits_remaining)} estimate={_fmt(d.estimate)} power={_fmt(d.power)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of :func:`format_report`; segments and diagnostics come back as dicts of floats."""
    out: dict = {"segments": [], "diagnostics": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        m = _KV.match(raw)
        if not m:
            raise ScenarioError(f"cannot parse report line {raw!r}", lineno, "<report>")
        key, value = m.group(1), m.group(2)
        if key in ("segment", "diagnostic"):
            row = {k: _unfmt(v) for k, v in _fields(value, lineno, "<report>").items()}
            out[key + "s"].append(row)
        elif key == "feasible":
            out[key] = value == "true"
        elif key in ("bits", "completion_time"):
            out[key] = float(value)
        else:
            out[key] = value
    return out


def report_from_text(text: str) -> RunReport:
    data = parse_report(text)
    schedule = Schedule(tuple(Segment(r["start"], r["duration"], r["power"]) for r in data["segments"]))
    diags = tuple(Diagnostic(r["time"], r["energy_remaining"], r["bits_remaining"],
                             r["estimate"], r["power"]) for r in data["diagnostics"])
    return RunReport(data["algorithm"], data["completion_time"], schedule, data["feasible"], diags)


def format_curve(curve: Iterable[tuple[float, float]]) -> str:
    lines = ["alpha,max_ratio"]
    lines += [f"{_fmt(a)},{_fmt(r)}" for a, r in curve]
    return "\n".join(lines) + "\n"


def parse_curve(text: str) -> list[tuple[float, float]]:
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != "alpha,max_ratio":
        raise ScenarioError("curve file must start with 'alpha,max_ratio'")
    return [tuple(map(float, r.split(","))) for r in rows[1:]]


# Example 1 arrival instants: the worked totals only add up when 2, 4, ..., 32 are
# the gaps between arrivals (t_5 = 62 s); "example1-literal" keeps t_n = 2**n.
EXAMPLE1_GAPS = [0.0, 2.0, 6.0, 14.0, 30.0, 62.0, 126.0]
EXAMPLE1_LITERAL = [0.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]

TRACE_PRESETS = {
    "example1": lambda: EnergyTrace.from_pairs(
        zip(EXAMPLE1_GAPS, [2.0 ** (n + 1) for n in range(7)]), 100.0, "siso", "example1"),
    "example1-literal": lambda: EnergyTrace.from_pairs(
        zip(EXAMPLE1_LITERAL, [2.0 ** (n + 1) for n in range(7)]), 100.0, "siso", "example1-literal"),
    "example2": lambda: EnergyTrace.from_pairs(
        [(0.0, 2.0)] + [(float(n), 1.0) for n in range(1, 9)], 10.0, "siso", "example2"),
}


def trace_preset(name: str) -> EnergyTrace:
    try:
        return TRACE_PRESETS[name]()
    except KeyError:
        raise ScenarioError(f"unknown preset {name!r}; choose from {sorted(TRACE_PRESETS)}") from None


def random_trace(rng: np.random.Generator, max_arrivals: int = 10,
                 channel: ChannelModel | str = ChannelModel.SISO,
                 load: tuple[float, float] = (0.5, 0.95), low: float = 0.1, high: float = 10.0) -> EnergyTrace:
    """Arrivals from t = 0 with log-uniform energies and gaps; bits a random share of capacity."""
    k = int(rng.integers(1, max_arrivals + 1))
    log_lo, log_hi = math.log(low), math.log(high)
    energies = np.exp(rng.uniform(log_lo, log_hi, k))
    gaps = np.exp(rng.uniform(log_lo, log_hi, k - 1))
    times = np.concatenate([[0.0], np.cumsum(gaps)])
    bits = rng.uniform(*load) * energies.sum() * LOG2E
    return EnergyTrace.from_pairs(zip(times.tolist(), energies.tolist()), float(bits), channel)


def random_corpus(n: int, seed: int, max_arrivals: int = 10,
                  channel: ChannelModel | str = ChannelModel.SISO) -> list[EnergyTrace]:
    rng = np.random.default_rng(seed)
    traces = []
    for i in range(n):
        tr = random_trace(rng, max_arrivals, channel)
        traces.append(EnergyTrace(tr.events, tr.bits, tr.channel, f"random-{seed}-{i}"))
    return traces
