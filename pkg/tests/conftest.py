import pytest

from atlplus.cgm import hub, m3, mstar
from atlplus.formula import expand_abbreviations, parse_formula

PHI_STAR = "<<a1>> ((!(X p3) & <<a2>> X p1) | (F p1 & (!p1) U p2))"
M3_GOAL = "<<a2>>(G p1 | F p2)"
HUB_GOAL = "<<a>>(F p & F q)"

# one line per acceptance criterion, printed in the terminal summary
CRITERIA: dict[int, str] = {}


def expanded(text):
    return expand_abbreviations(parse_formula(text))


@pytest.fixture
def model_star():
    return mstar()


@pytest.fixture
def model_m3():
    return m3()


@pytest.fixture
def model_hub():
    return hub()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
