"""Energy traces, piecewise-constant power schedules and their accounting."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .channel import ChannelModel, rate

# Absolute slack on the energy-neutrality constraint, in joules.
NEUTRALITY_SLACK = 1e-6


@dataclass(frozen=True)
class Arrival:
    time: float
    energy: float


@dataclass(frozen=True)
class EnergyTrace:
    """Harvest events ``(t_i, E_i)``, the bit load and the channel."""

    events: tuple[Arrival, ...]
    bits: float
    channel: ChannelModel = ChannelModel.SISO
    label: str = ""

    def __post_init__(self):
        events = tuple(e if isinstance(e, Arrival) else Arrival(*map(float, e)) for e in self.events)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "channel", ChannelModel.parse(self.channel))
        if not events:
            raise ValueError("trace needs at least one arrival")
        if not events[0].time >= 0:
            raise ValueError("first arrival time must be >= 0")
        for prev, cur in zip(events, events[1:]):
            if not cur.time > prev.time:
                raise ValueError(f"arrival times must be strictly increasing ({prev.time} then {cur.time})")
        for e in events:
            if not (e.energy > 0 and math.isfinite(e.energy)):
                raise ValueError(f"arrival energy must be positive and finite, got {e.energy}")
        if not (self.bits >= 0 and math.isfinite(self.bits)):
            raise ValueError(f"bits must be a finite non-negative number, got {self.bits}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]], bits: float,
                   channel: ChannelModel | str = ChannelModel.SISO, label: str = "") -> "EnergyTrace":
        return cls(tuple(Arrival(float(t), float(e)) for t, e in pairs), float(bits),
                   ChannelModel.parse(channel), label)

    @property
    def times(self) -> list[float]:
        return [e.time for e in self.events]

    @property
    def energies(self) -> list[float]:
        return [e.energy for e in self.events]

    @property
    def total_energy(self) -> float:
        return math.fsum(self.energies)

    def __len__(self) -> int:
        return len(self.events)

    def harvested(self, t: float, strict: bool = False) -> float:
        """Energy arrived by time ``t`` (``strict``: arrivals before ``t`` only)."""
        times = self.times
        k = bisect.bisect_left(times, t) if strict else bisect.bisect_right(times, t)
        return math.fsum(self.energies[:k])

    def with_bits(self, bits: float) -> "EnergyTrace":
        return EnergyTrace(self.events, bits, self.channel, self.label)

    def with_channel(self, channel: ChannelModel | str) -> "EnergyTrace":
        return EnergyTrace(self.events, self.bits, ChannelModel.parse(channel), self.label)


@dataclass(frozen=True)
class Segment:
    start: float
    duration: float
    power: float

    @property
    def end(self) -> float:
        return self.start + self.duration

    @property
    def energy(self) -> float:
        return self.power * self.duration


@dataclass(frozen=True)
class Schedule:
    """Contiguous constant-power segments; idle stretches are zero-power segments."""

    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for s in segs:
            if not s.duration > 0:
                raise ValueError(f"segment durations must be > 0, got {s.duration}")
            if not s.power >= 0:
                raise ValueError(f"segment powers must be >= 0, got {s.power}")
        for a, b in zip(segs, segs[1:]):
            if abs(b.start - a.end) > 1e-9 * max(1.0, abs(a.end)):
                raise ValueError(f"segments must be contiguous: {a.end} then {b.start}")

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def end(self) -> float:
        return self.segments[-1].end if self.segments else 0.0

    @property
    def completion_time(self) -> float:
        """End of the last segment with positive power."""
        for s in reversed(self.segments):
            if s.power > 0:
                return s.end
        return 0.0

    @property
    def change_points(self) -> list[float]:
        """Instants where the power level changes (idle-to-active counts)."""
        pts = []
        for a, b in zip(self.segments, self.segments[1:]):
            if a.power != b.power:
                pts.append(b.start)
        return pts


class ScheduleBuilder:
    """Appends segments, dropping zero-length pieces and keeping contiguity."""

    def __init__(self, start: float = 0.0):
        self.now = start
        self.segments: list[Segment] = []

    def add(self, duration: float, power: float) -> None:
        if duration <= 0:
            return
        self.segments.append(Segment(self.now, duration, power))
        self.now += duration

    def build(self) -> Schedule:
        return Schedule(tuple(self.segments))


@dataclass(frozen=True)
class Diagnostic:
    """State snapshot. Online runs fill ``estimate``/``power`` at decision instants."""

    time: float
    energy_remaining: float
    bits_remaining: float
    estimate: Optional[float] = None
    power: Optional[float] = None


@dataclass(frozen=True)
class RunReport:
    algorithm: str
    completion_time: float
    schedule: Schedule
    feasible: bool
    diagnostics: tuple[Diagnostic, ...] = field(default_factory=tuple)

    @classmethod
    def infeasible(cls, algorithm: str, schedule: Schedule = Schedule(),
                   diagnostics: Sequence[Diagnostic] = ()) -> "RunReport":
        return cls(algorithm, math.inf, schedule, False, tuple(diagnostics))


def bits_delivered(schedule: Schedule, channel: ChannelModel, t: float) -> float:
    """Bits sent by time ``t`` (the partial final segment included)."""
    total = []
    for s in schedule.segments:
        if s.start >= t:
            break
        total.append(rate(channel, min(s.duration, t - s.start), s.power))
    return math.fsum(total)


def energy_used(schedule: Schedule, t: float) -> float:
    total = []
    for s in schedule.segments:
        if s.start >= t:
            break
        total.append(s.power * min(s.duration, t - s.start))
    return math.fsum(total)


def verify_energy_neutrality(schedule: Schedule, trace: EnergyTrace,
                             slack: float = NEUTRALITY_SLACK) -> tuple[bool, Optional[tuple[float, float]]]:
    """Check that spending never runs ahead of harvesting.

    Energy used is piecewise linear and harvested energy is a right-continuous
    step, so it is enough to compare at each arrival instant (against energy
    harvested strictly before it), at segment boundaries and at the schedule end.
    Returns ``(ok, (time, deficit))`` with the first violation, or ``(True, None)``.
    """
    if not schedule.segments:
        return True, None
    end = schedule.end
    checkpoints = {s.end for s in schedule.segments}
    checkpoints.update(t for t in trace.times if 0 < t <= end)
    for t in sorted(checkpoints):
        deficit = energy_used(schedule, t) - trace.harvested(t, strict=True)
        if deficit > slack:
            return False, (t, deficit)
    return True, None
