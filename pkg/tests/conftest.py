import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from heatdiode.model import BathSpec, ChainSpec, QuadratureSpec

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# grid used by property tests; identities below hold on any grid
COARSE = QuadratureSpec(points=4_001)

positive = st.floats(0.1, 2.0)


@st.composite
def chains(draw, min_n=2, max_n=8, pinned=None):
    n = draw(st.integers(min_n, max_n))
    masses = draw(st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n))
    springs = draw(st.lists(positive, min_size=n + 1, max_size=n + 1))
    if pinned is False:
        pinning = [0.0] * n
    else:
        pinning = draw(st.lists(st.one_of(st.just(0.0), st.floats(0.0, 1.0)), min_size=n, max_size=n))
    return ChainSpec(masses, springs, pinning)


@st.composite
def single_affinity(draw, n):
    order = draw(st.permutations(range(n)))
    n_hot = draw(st.integers(1, n - 1))
    n_cold = draw(st.integers(1, n - n_hot))
    hot, cold = sorted(order[:n_hot]), sorted(order[n_hot:n_hot + n_cold])
    t_hot = draw(st.floats(0.5, 2.0))
    t_cold = draw(st.floats(0.05, 0.45))
    frictions, temps = [0.0] * n, [0.0] * n
    for i in hot + cold:
        frictions[i] = draw(st.floats(0.2, 2.0))
    for i in hot:
        temps[i] = t_hot
    for i in cold:
        temps[i] = t_cold
    return BathSpec(frictions, temps, hot, cold)


@st.composite
def multi_bath(draw, n):
    """Random hot/cold partition with independent temperatures on every bath."""
    base = draw(single_affinity(n))
    temps = list(base.temperatures)
    for i in base.thermostated:
        temps[i] = draw(st.floats(0.05, 2.0))
    return base.with_temperatures(temps)


def tgho_baths(temps=(1.0, 0.5, 0.2, 0.1), gamma=1.0, n=5):
    return BathSpec.edges(n, temps[:2], temps[2:], gamma=gamma)


def rng(seed=0):
    return np.random.default_rng(seed)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
