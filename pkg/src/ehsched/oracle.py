"""Brute-force validator for small offline instances.

Enumerates schedules whose power changes only at arrival instants: in every
whole inter-arrival interval before the last one used, a gridded fraction of
the energy on hand is spent at constant power; the final piece spends all
remaining energy and its end time is gridded.  Nothing here calls the offline
scheduler, so the two can check each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, completion_time
from .schedule import EnergyTrace, RunReport, bits_delivered, verify_energy_neutrality

MAX_ARRIVALS = 4
MIN_GRID = 16


def _rate(channel: ChannelModel, d, p):
    d = np.asarray(d, dtype=float)
    p = np.asarray(p, dtype=float)
    if channel is ChannelModel.GMAC:
        return 0.5 * d * np.log2(1.0 + 2.0 * p)
    return d * np.log2(1.0 + p)


@dataclass(frozen=True)
class OracleResult:
    time: float
    step: float  # time-grid spacing of the interval holding the best end time
    end_interval: int
    fractions: tuple[float, ...]


def _final_span_cap(trace: EnergyTrace) -> float:
    # waiting for every arrival and then pooling is feasible, so T_O lies below this
    pooled = completion_time(trace.channel, trace.bits, trace.total_energy)
    return 2.0 * pooled


def oracle_search(trace: EnergyTrace, power_grid: int = 64, time_grid: int = 256) -> OracleResult:
    if len(trace) > MAX_ARRIVALS:
        raise ValueError(f"oracle handles at most {MAX_ARRIVALS} arrivals, got {len(trace)}")
    if power_grid < MIN_GRID or time_grid < MIN_GRID:
        raise ValueError(f"grids must have at least {MIN_GRID} points")
    if trace.bits == 0:
        return OracleResult(0.0, 0.0, 0, ())

    channel = trace.channel
    times = trace.times
    energies = trace.energies
    k = len(times)
    cap = _final_span_cap(trace)
    fractions = np.linspace(0.0, 1.0, power_grid + 1)
    steps = np.arange(1, time_grid + 1) / time_grid

    best = OracleResult(math.inf, math.nan, -1, ())
    for j in range(k):
        span = times[j + 1] - times[j] if j + 1 < k else cap
        if not math.isfinite(span):
            continue  # total energy cannot carry the bits
        # energy and bits after spending gridded fractions in intervals 0..j-1
        shape = (len(fractions),) * j
        carry = np.zeros(shape)
        sent = np.zeros(shape)
        for i in range(j):
            f = fractions.reshape((1,) * i + (-1,) + (1,) * (j - i - 1))
            avail = carry + energies[i]
            spend = f * avail
            s = times[i + 1] - times[i]
            sent = sent + _rate(channel, s, spend / s)
            carry = avail - spend
        avail = (carry + energies[j]).ravel()
        residual = trace.bits - sent.ravel()

        # smallest grid index m with rate(tau_m, avail / tau_m) >= residual; monotone in m
        taus = span * steps
        ok_at_end = _rate(channel, taus[-1], avail / taus[-1]) >= residual
        lo = np.full(avail.shape, -1)
        hi = np.full(avail.shape, time_grid - 1)
        while np.any(hi - lo > 1):
            mid = (lo + hi) // 2
            enough = _rate(channel, taus[mid], avail / taus[mid]) >= residual
            hi = np.where(enough, mid, hi)
            lo = np.where(enough, lo, mid)
        end = np.where(ok_at_end & (residual > 0), times[j] + taus[hi], np.inf)
        end = np.where(residual <= 0, times[j], end)
        idx = int(np.argmin(end))
        if end[idx] < best.time:
            combo = np.unravel_index(idx, shape) if j else ()
            best = OracleResult(float(end[idx]), span / time_grid, j,
                                tuple(float(fractions[c]) for c in combo))
    return best


def oracle_min_time(trace: EnergyTrace, power_grid: int = 64, time_grid: int = 256) -> float:
    """Minimum completion time over the enumerated schedules (``inf`` if none delivers)."""
    return oracle_search(trace, power_grid, time_grid).time


def oracle_certify(trace: EnergyTrace, claimed: RunReport, tolerance: float,
                   power_grid: int = 64, time_grid: int = 256) -> bool:
    """Feasible, delivers all bits, and no slower than the oracle plus ``tolerance``."""
    if not claimed.feasible:
        return False
    ok, _ = verify_energy_neutrality(claimed.schedule, trace)
    if not ok:
        return False
    delivered = bits_delivered(claimed.schedule, trace.channel, claimed.completion_time)
    if delivered < trace.bits * (1.0 - 1e-6):
        return False
    return claimed.completion_time <= oracle_min_time(trace, power_grid, time_grid) + tolerance
