"""Transmission-time scheduling for energy-harvesting transmitters.

Offline optimum, causal lazy/GLO schedulers, a min-max lower-bound engine for
the competitive ratio, and a brute-force oracle, over SISO and uncoordinated
two-user GMAC channels.
"""
from .adversary import (LowerBoundConfig, LowerBoundResult, figure_preset, lower_bound_search,
                        proof_preset, worst_ratio)
from .channel import ChannelModel, bits_capacity_limit, completion_time, rate
from .offline import offline_energy_fraction, offline_schedule
from .online import OnlineState, PreconditionError, lazy_step, run_alpha_policy, run_glo, run_lazy
from .oracle import oracle_certify, oracle_min_time, oracle_search
from .schedule import (Arrival, EnergyTrace, RunReport, Schedule, Segment, bits_delivered,
                       energy_used, verify_energy_neutrality)

__version__ = "0.1.0"
