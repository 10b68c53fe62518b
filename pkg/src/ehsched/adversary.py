"""Min-max lower bound on the competitive ratio of any online scheduler.

Two candidate traces share their first arrival.  Any online algorithm must
commit to a fraction ``alpha`` of the initial energy before the second arrival
would have appeared; the bound is the smallest, over ``alpha``, of the worse of
the two completion-time ratios against the offline optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel
from .offline import offline_schedule
from .online import run_alpha_policy
from .schedule import EnergyTrace

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LowerBoundConfig:
    sigma1: EnergyTrace
    sigma2: EnergyTrace
    horizon: float = 1.0
    channel: ChannelModel = ChannelModel.SISO
    grid_step: float = 1e-3
    refine: bool = True

    def __post_init__(self):
        channel = ChannelModel.parse(self.channel)
        object.__setattr__(self, "channel", channel)
        object.__setattr__(self, "sigma1", self.sigma1.with_channel(channel))
        object.__setattr__(self, "sigma2", self.sigma2.with_channel(channel))
        if self.sigma1.bits != self.sigma2.bits:
            raise ConfigError("both traces must carry the same bit load")
        if len(self.sigma1) > 1 and self.sigma1.events[1].time != self.horizon:
            raise ConfigError(f"horizon {self.horizon} must equal sigma1's second arrival "
                              f"({self.sigma1.events[1].time})")
        if not 0 < self.grid_step <= 0.5:
            raise ConfigError("grid_step must lie in (0, 0.5]")


def two_sequence_config(e0: float, e1: float, bits: float,
                        channel: ChannelModel | str = ChannelModel.SISO,
                        grid_step: float = 1e-3) -> LowerBoundConfig:
    """``sigma1 = (e0 @ 0, e1 @ 1)`` against ``sigma2 = (e0 @ 0)``, horizon 1."""
    sigma1 = EnergyTrace.from_pairs([(0.0, e0), (1.0, e1)], bits, channel, "sigma1")
    sigma2 = EnergyTrace.from_pairs([(0.0, e0)], bits, channel, "sigma2")
    return LowerBoundConfig(sigma1, sigma2, 1.0, channel, grid_step)


def proof_preset(channel: ChannelModel | str = ChannelModel.SISO, grid_step: float = 1e-3) -> LowerBoundConfig:
    return two_sequence_config(2.0, 4.0, 2.8, channel, grid_step)


def figure_preset(channel: ChannelModel | str = ChannelModel.SISO, grid_step: float = 1e-3) -> LowerBoundConfig:
    # figure captions give only "e = 3, B = 4.2"; e1 = 2 * e0 mirrors the proof's ratio
    return two_sequence_config(3.0, 6.0, 4.2, channel, grid_step)


def _offline_times(config: LowerBoundConfig) -> tuple[float, float]:
    out = []
    for name, trace in (("sigma1", config.sigma1), ("sigma2", config.sigma2)):
        report = offline_schedule(trace)
        if not report.feasible or report.completion_time <= 0:
            raise ConfigError(f"{name} is infeasible for the offline scheduler")
        out.append(report.completion_time)
    return out[0], out[1]


def worst_ratio(config: LowerBoundConfig, alpha: float, offline_times=None) -> float:
    """Worse of the two online/offline completion ratios for a given ``alpha``.

    An infeasible tail counts as ``inf``.
    """
    t1, t2 = offline_times or _offline_times(config)
    worst = 0.0
    for trace, t_opt in ((config.sigma1, t1), (config.sigma2, t2)):
        report = run_alpha_policy(trace, alpha, config.horizon)
        worst = max(worst, report.completion_time / t_opt)
    return worst


def golden_section(f, a: float, b: float, tol: float = 1e-6) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass(frozen=True)
class LowerBoundResult:
    alpha_star: float
    r_lower: float
    curve: list[tuple[float, float]] = field(default_factory=list)
    offline_times: tuple[float, float] = (math.nan, math.nan)


def lower_bound_search(config: LowerBoundConfig) -> LowerBoundResult:
    """Grid scan of ``worst_ratio`` over alpha, then golden-section refinement."""
    offline_times = _offline_times(config)
    n = int(round(1.0 / config.grid_step))
    alphas = np.linspace(0.0, 1.0, n + 1)
    ratios = [worst_ratio(config, float(a), offline_times) for a in alphas]
    curve = list(zip(alphas.tolist(), ratios))

    i = int(np.argmin(ratios))
    alpha_star, r_lower = float(alphas[i]), float(ratios[i])
    if config.refine and math.isfinite(r_lower):
        lo = float(alphas[max(i - 1, 0)])
        hi = float(alphas[min(i + 1, n)])
        # keep infinite neighbours out of the bracket
        if not math.isfinite(ratios[max(i - 1, 0)]):
            lo = alpha_star
        if not math.isfinite(ratios[min(i + 1, n)]):
            hi = alpha_star
        if hi > lo:
            a, r = golden_section(lambda x: worst_ratio(config, x, offline_times), lo, hi, 1e-6)
            if r < r_lower:
                alpha_star, r_lower = a, r
    return LowerBoundResult(alpha_star, r_lower, curve, offline_times)
