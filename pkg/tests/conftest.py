import math

import numpy as np
import pytest
from scipy.optimize import brentq

from ehsched import ChannelModel, EnergyTrace
from ehsched.scenario import random_corpus, trace_preset

SISO, GMAC = ChannelModel.SISO, ChannelModel.GMAC


def direct_rate(model, d, p):
    # written out independently of ehsched.channel
    if model is GMAC:
        return d / 2 * math.log1p(2 * p) / math.log(2)
    return d * math.log1p(p) / math.log(2)


def brent_completion(model, bits, energy):
    """Independent root for T * rate(1, E/T) = bits via Brent's method."""
    if bits == 0:
        return 0.0
    if bits >= energy / math.log(2):
        return math.inf
    return brentq(lambda T: direct_rate(model, T, energy / T) - bits, 1e-12, 1e13, xtol=1e-13, rtol=1e-14)


@pytest.fixture
def example1():
    return trace_preset("example1")


@pytest.fixture
def example2():
    return trace_preset("example2")


@pytest.fixture
def sigma1():
    return EnergyTrace.from_pairs([(0, 2), (1, 4)], 2.8)


@pytest.fixture
def sigma2():
    return EnergyTrace.from_pairs([(0, 2)], 2.8)


@pytest.fixture(scope="session")
def small_corpus():
    return random_corpus(200, seed=11, max_arrivals=6) + random_corpus(200, seed=12, max_arrivals=6, channel="gmac")


# lines recorded by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
