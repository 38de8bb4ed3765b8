import pytest

from hardyrog.hardy import build_level, build_surrogate_level
from hardyrog.spectral import build_chain

# Calibrated certificate constant for the surrogate statistical test: the
# centered block sums |S_p - 1/2| over the membership set of the mini n=50
# level have a hard lower edge at 0.2840 (stable across seeds, ~10^4 in-set
# points), so M - 1/2 = 0.26 is a genuinely positive bound with margin.
SURROGATE_M = 0.76


@pytest.fixture(scope="session")
def level500():
    return build_level(500)


@pytest.fixture(scope="session")
def level10000():
    return build_level(10000)


@pytest.fixture(scope="session")
def mini50():
    return build_level(50, mini=True)


@pytest.fixture(scope="session")
def surrogate50():
    return build_surrogate_level(50, m_cert=SURROGATE_M)


@pytest.fixture(scope="session")
def paper_chain(level500, level10000):
    return build_chain([level500, level10000])


@pytest.fixture(scope="session")
def mini_chain1(mini50):
    return build_chain([mini50])


@pytest.fixture(scope="session")
def mini_chain2():
    return build_chain([50, 60], mini=True)
