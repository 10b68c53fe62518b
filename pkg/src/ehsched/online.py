"""Causal schedulers driven by an event loop that reveals arrivals as they happen.

A policy only ever sees the arrivals whose time has come.  At each decision
instant it picks a power and, optionally, a wake-up time; the loop holds that
power until the next arrival, the wake-up, energy exhaustion or completion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Protocol

from .channel import ChannelModel, bits_capacity_limit, bits_per_second, completion_time
from .schedule import (Arrival, Diagnostic, EnergyTrace, RunReport, ScheduleBuilder, bits_delivered,
                       energy_used)

DONE_RTOL = 1e-9


class PreconditionError(ValueError):
    """Input violates an algorithm's stated precondition."""


@dataclass(frozen=True)
class OnlineState:
    now: float
    energy_available: float
    bits_remaining: float
    transmitting: bool = False


@dataclass(frozen=True)
class Decision:
    power: float
    wake_at: Optional[float] = None
    estimate: Optional[float] = None


class Policy(Protocol):
    name: str

    def decide(self, state: OnlineState, revealed: tuple[Arrival, ...],
               channel: ChannelModel) -> Decision: ...


class ArrivalCursor:
    """Hands out a trace's arrivals in time order, never ahead of the clock."""

    def __init__(self, trace: EnergyTrace):
        self._events = trace.events
        self._next = 0
        self.clock = -math.inf

    def next_time(self) -> float:
        # environment-side; policies never receive the cursor
        return self._events[self._next].time if self._next < len(self._events) else math.inf

    def advance_to(self, t: float) -> list[Arrival]:
        if t < self.clock:
            raise RuntimeError("cursor clock cannot move backwards")
        self.clock = t
        out = []
        while self._next < len(self._events) and self._events[self._next].time <= t:
            out.append(self._events[self._next])
            self._next += 1
        return out


def lazy_step(state: OnlineState, channel: ChannelModel) -> tuple[float, float]:
    """Power that finishes the residual bits soonest if nothing else arrives.

    Returns ``(power, T)`` with ``T`` measured from ``state.now``; an
    infeasible state gives ``(0.0, inf)``.
    """
    if state.bits_remaining <= 0:
        return 0.0, 0.0
    T = completion_time(channel, state.bits_remaining, state.energy_available)
    if not math.isfinite(T):
        return 0.0, math.inf
    return state.energy_available / T, T


def simulate(trace: EnergyTrace, policy: Policy, cursor: Optional[ArrivalCursor] = None) -> RunReport:
    channel = trace.channel
    cursor = cursor or ArrivalCursor(trace)
    tol = DONE_RTOL * max(trace.bits, 1e-300)

    first = cursor.next_time()
    builder = ScheduleBuilder(0.0)
    builder.add(first, 0.0)
    now = first
    revealed: tuple[Arrival, ...] = ()
    state = OnlineState(now, 0.0, trace.bits)
    diagnostics = []

    while state.bits_remaining > tol:
        new = cursor.advance_to(now)
        revealed += tuple(new)
        state = replace(state, now=now,
                        energy_available=state.energy_available + math.fsum(a.energy for a in new))
        decision = policy.decide(state, revealed, channel)
        wake_at = decision.wake_at
        power = decision.power
        diagnostics.append(Diagnostic(now, state.energy_available, state.bits_remaining,
                                      decision.estimate, power))

        next_event = min(cursor.next_time(), wake_at if wake_at is not None else math.inf)
        if power > 0 and state.energy_available > 0:
            bps = bits_per_second(channel, power)
            t_finish = state.bits_remaining / bps
            t_empty = state.energy_available / power
            # lazy finishes and empties together; prefer the finish under rounding
            if t_finish <= t_empty * (1.0 + DONE_RTOL) and now + t_finish <= next_event:
                builder.add(t_finish, power)
                now += t_finish
                state = OnlineState(now, max(0.0, state.energy_available - power * t_finish), 0.0, True)
                break
            hold = min(t_empty, next_event - now)
            builder.add(hold, power)
            state = OnlineState(now + hold, max(0.0, state.energy_available - power * hold),
                                state.bits_remaining - bps * hold, True)
            now += hold
            if now < next_event:
                if not math.isfinite(next_event):
                    break
                builder.add(next_event - now, 0.0)
                now = next_event
        else:
            if not math.isfinite(next_event):
                break
            builder.add(next_event - now, 0.0)
            now = next_event
            state = replace(state, transmitting=False)

    schedule = builder.build()
    if state.bits_remaining > tol:
        return RunReport.infeasible(policy.name, schedule, diagnostics)
    return RunReport(policy.name, schedule.completion_time, schedule, True, tuple(diagnostics))


class LazyPolicy:
    name = "lazy"

    def decide(self, state, revealed, channel):
        power, T = lazy_step(state, channel)
        return Decision(power, estimate=T)


class GLOPolicy:
    """Waits until pooled energy could eventually carry all bits, then acts lazily."""

    name = "glo"

    def __init__(self, bits_total: float):
        self.bits_total = bits_total
        self.started = False

    def decide(self, state, revealed, channel):
        if not self.started:
            harvested = math.fsum(a.energy for a in revealed)
            if bits_capacity_limit(channel, harvested) > self.bits_total:
                self.started = True
            else:
                return Decision(0.0)
        power, T = lazy_step(state, channel)
        return Decision(power, estimate=T)


class AlphaPolicy:
    """Spend a fraction ``alpha`` of the initial energy evenly up to ``horizon``,
    then pool what is left and finish as fast as possible."""

    name = "alpha"

    def __init__(self, alpha: float, horizon: float):
        self.alpha = alpha
        self.horizon = horizon

    def decide(self, state, revealed, channel):
        if state.now < self.horizon:
            e0 = revealed[0].energy
            start = revealed[0].time
            return Decision(self.alpha * e0 / (self.horizon - start), wake_at=self.horizon)
        power, T = lazy_step(state, channel)
        return Decision(power, estimate=T)


def run_lazy(trace: EnergyTrace) -> RunReport:
    e0 = trace.events[0].energy
    if not trace.bits < bits_capacity_limit(trace.channel, e0):
        raise PreconditionError(
            f"lazy needs the first arrival to cover all bits eventually "
            f"({trace.bits} >= {bits_capacity_limit(trace.channel, e0):.6g}); use run_glo")
    return simulate(trace, LazyPolicy())


def run_glo(trace: EnergyTrace) -> RunReport:
    return simulate(trace, GLOPolicy(trace.bits))


def run_alpha_policy(trace: EnergyTrace, alpha: float, horizon: float) -> RunReport:
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"alpha must lie in [0, 1], got {alpha}")
    t0 = trace.events[0].time
    if not horizon > t0:
        raise PreconditionError("horizon must come after the first arrival")
    if any(t0 < t < horizon for t in trace.times):
        raise PreconditionError("alpha policy expects no arrival strictly before the horizon")
    return simulate(trace, AlphaPolicy(alpha, horizon))


def progress_ratios(trace: EnergyTrace, online: RunReport, offline: RunReport) -> list[tuple[float, float, float]]:
    """``(t_k, theta_k, phi_k)`` at each online decision instant before the offline finish.

    ``theta`` is online over offline energy on hand, ``phi`` online over offline
    bits still to send.
    """
    out = []
    for d in online.diagnostics:
        if d.estimate is None or d.time >= offline.completion_time:
            continue
        e_off = trace.harvested(d.time) - energy_used(offline.schedule, d.time)
        b_off = trace.bits - bits_delivered(offline.schedule, trace.channel, d.time)
        if e_off <= 0 or b_off <= 0:
            continue
        out.append((d.time, d.energy_remaining / e_off, d.bits_remaining / b_off))
    return out
