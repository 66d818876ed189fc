import numpy as np
import pytest
from hypothesis import settings, strategies as st

from intermatch.core import Market, Preference

# numba compiles on first call, so per-example timing is meaningless
settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_market(rng, n_doctors, n_hospitals, p_full=0.6):
    """Uniformly random strict lists; with probability 1 - p_full an agent's list is truncated."""

    def lists(n, n_other):
        out = []
        for _ in range(n):
            ranked = tuple(rng.permutation(n_other).tolist())
            cut = n_other if rng.random() < p_full else int(rng.integers(0, n_other + 1))
            out.append(Preference(ranked, cut))
        return out

    return Market(lists(n_doctors, n_hospitals), lists(n_hospitals, n_doctors))


def correlated_market(rng, n_doctors, n_hospitals, noise=1.0):
    """Lists from a shared quality ranking plus Gumbel noise; everyone acceptable."""
    qd = rng.random(n_doctors) * 3
    qh = rng.random(n_hospitals) * 3
    ud = qh[None, :] + noise * rng.gumbel(size=(n_doctors, n_hospitals))
    uh = qd[None, :] + noise * rng.gumbel(size=(n_hospitals, n_doctors))
    return Market.from_lists(np.argsort(-ud, axis=1).tolist(), np.argsort(-uh, axis=1).tolist())


@st.composite
def markets(draw, min_size=2, max_doctors=4, max_hospitals=4, allow_truncation=True):
    nd = draw(st.integers(min_size, max_doctors))
    nh = draw(st.integers(min_size, max_hospitals))

    def side(n, n_other):
        out = []
        for _ in range(n):
            ranked = draw(st.permutations(range(n_other)))
            cut = draw(st.integers(0, n_other)) if allow_truncation else n_other
            out.append(Preference(tuple(ranked), cut))
        return out

    return Market(side(nd, nh), side(nh, nd))


@st.composite
def markets_with_caps(draw, max_doctors=5, max_hospitals=5, max_cap=5):
    market = draw(markets(max_doctors=max_doctors, max_hospitals=max_hospitals))
    iota = draw(st.lists(st.integers(1, max_cap), min_size=market.n_hospitals, max_size=market.n_hospitals))
    kappa = draw(st.lists(st.integers(1, max_cap), min_size=market.n_doctors, max_size=market.n_doctors))
    return market, tuple(iota), tuple(kappa)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
