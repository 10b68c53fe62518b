"""Optimal offline (non-causal) transmission-time minimizer.

The scheduler knows every future arrival.  From the current start it finds the
first arrival index ``n*`` whose preceding energy can finish the residual bits
strictly before ``t_{n*}``.  If the constant power that does so would overdraw
an earlier arrival constraint, it instead runs at the tightest cumulative
average power up to that arrival, drains the energy there, and repeats.
"""
from __future__ import annotations

import math

from .channel import completion_time, rate
from .schedule import Diagnostic, EnergyTrace, RunReport, ScheduleBuilder, energy_used

# relative tolerance for treating cumulative-average powers as tied
TIE_RTOL = 1e-12


def _first_sufficient_index(channel, bits, start, times, cumulative):
    """Smallest n >= 1 whose energy before ``times[n]`` finishes strictly before it.

    ``times`` ends with ``inf`` standing for "no further arrival".  Returns
    ``(n, duration)`` or ``None`` when even the total energy is insufficient.
    """
    for n in range(1, len(times)):
        T = completion_time(channel, bits, cumulative[n])
        if T < times[n] - start:
            return n, T
    return None


def offline_schedule(trace: EnergyTrace) -> RunReport:
    channel = trace.channel
    builder = ScheduleBuilder(0.0)
    if trace.events[0].time > 0:
        builder.add(trace.events[0].time, 0.0)

    residual = trace.bits
    events = list(trace.events)
    diagnostics = []
    k = 0  # index of the arrival at the current start
    while residual > 0:
        start = events[k].time
        times = [e.time for e in events[k:]] + [math.inf]
        # cumulative[n] = energy arriving in [start, times[n])
        cumulative = [0.0]
        for e in events[k:]:
            cumulative.append(cumulative[-1] + e.energy)
        diagnostics.append(Diagnostic(start, cumulative[1], residual))

        found = _first_sufficient_index(channel, residual, start, times, cumulative)
        if found is None:
            return RunReport.infeasible("offline", builder.build(), diagnostics)
        n_star, T = found
        power = cumulative[n_star] / T

        # tightest earlier constraint: min over 1 <= n < n* of cumulative average power
        best_n, best_power = None, power
        for n in range(1, n_star):
            p = cumulative[n] / (times[n] - start)
            if p < best_power * (1.0 - TIE_RTOL):
                best_n, best_power = n, p
        if best_n is None:
            builder.add(T, power)
            residual = 0.0
            break

        span = times[best_n] - start
        sent = rate(channel, span, best_power)
        if sent >= residual:
            # only reachable through rounding at a tie with n*
            builder.add(completion_time(channel, residual, best_power * span), best_power)
            residual = 0.0
            break
        builder.add(span, best_power)
        residual -= sent
        k += best_n

    schedule = builder.build()
    return RunReport("offline", schedule.completion_time, schedule, True, tuple(diagnostics))


def offline_energy_fraction(trace: EnergyTrace, window_end: float) -> float:
    """Share of the initial arrival's energy the offline schedule spends by ``window_end``."""
    if window_end <= 0:
        return 0.0
    report = offline_schedule(trace)
    if not report.feasible:
        raise ValueError("trace is infeasible for the offline scheduler")
    return energy_used(report.schedule, window_end) / trace.events[0].energy
