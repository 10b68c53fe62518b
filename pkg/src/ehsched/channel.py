"""Rate functions for the single-user Gaussian (SISO) and uncoordinated two-user
GMAC channels, and the monotone root solver that inverts them.

All logarithms are base 2; quantities are in bits, seconds and joules.
"""
from __future__ import annotations

import math
from enum import Enum

LOG2E = 1.0 / math.log(2.0)

# Bisection bracket ceiling; the capacity limit is only reached as T -> inf.
MAX_DURATION = 1e12
REL_TOL = 1e-9
# Bits within this relative margin of the capacity limit count as unreachable.
LIMIT_MARGIN = 1e-12


class ChannelModel(str, Enum):
    SISO = "siso"
    GMAC = "gmac"

    @classmethod
    def parse(cls, value: "str | ChannelModel") -> "ChannelModel":
        if isinstance(value, ChannelModel):
            return value
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown channel {value!r}; expected 'siso' or 'gmac'") from None


def _check_nonneg(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not value >= 0:
            raise ValueError(f"{name} must be >= 0, got {value!r}")


def rate(model: ChannelModel, duration: float, power: float) -> float:
    """Bits delivered when transmitting at constant ``power`` for ``duration``.

    SISO: ``d * log2(1 + p)``; GMAC: ``(d / 2) * log2(1 + 2 p)``.
    """
    _check_nonneg(duration=duration, power=power)
    if duration == 0:
        return 0.0
    if model is ChannelModel.GMAC:
        return 0.5 * duration * math.log1p(2.0 * power) * LOG2E
    return duration * math.log1p(power) * LOG2E


def bits_per_second(model: ChannelModel, power: float) -> float:
    return rate(model, 1.0, power)


def bits_capacity_limit(model: ChannelModel, energy: float) -> float:
    """Bits deliverable with ``energy`` as the duration grows without bound.

    Both channel models share the limit ``E * log2(e)``.
    """
    _check_nonneg(energy=energy)
    return energy * LOG2E


def _pooled_rate(model: ChannelModel, duration: float, energy: float) -> float:
    # rate(T, E/T), increasing in T
    return rate(model, duration, energy / duration)


def completion_time(model: ChannelModel, bits: float, energy: float) -> float:
    """Shortest ``T`` with ``rate(T, energy / T) == bits``.

    Returns ``math.inf`` when ``bits`` cannot be delivered with ``energy``
    in finite time (at or above the capacity limit).
    """
    _check_nonneg(bits=bits, energy=energy)
    if bits == 0:
        return 0.0
    limit = bits_capacity_limit(model, energy)
    if energy == 0 or bits >= limit * (1.0 - LIMIT_MARGIN):
        return math.inf

    lo, hi = 0.0, 1.0
    while _pooled_rate(model, hi, energy) < bits:
        lo, hi = hi, 2.0 * hi
        if hi > MAX_DURATION:
            return math.inf

    # bisect to ~1e-12 relative; the contract only promises 1e-9
    while hi - lo > REL_TOL * 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if _pooled_rate(model, mid, energy) < bits:
            lo = mid
        else:
            hi = mid
    return hi
