import pytest
from hypothesis import strategies as st

from incentive_cost.games import DonationGame, PublicGoodsGame


@pytest.fixture
def dg18():
    return DonationGame(b=1.8, c=1)


@pytest.fixture
def dg2():
    return DonationGame(b=2, c=1)


@st.composite
def games(draw, max_n=10):
    if draw(st.booleans()):
        c = draw(st.floats(0.1, 3))
        return DonationGame(c * draw(st.floats(1.05, 4)), c)
    n = draw(st.integers(2, max_n))
    r = draw(st.floats(1.05, n - 0.05)) if n > 2 else 1.5
    return PublicGoodsGame(r, n, draw(st.floats(0.1, 3)))


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
