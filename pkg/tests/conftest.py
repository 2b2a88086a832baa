import pytest

from kdvbreak.phase import PhaseContext
from kdvbreak.pi2 import Pi2Grid, continuation_in_T
from kdvbreak.profile import (gaussian_pair_profile, locate_catastrophe,
                              sech2_profile)

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sech2():
    return sech2_profile()


@pytest.fixture(scope="session")
def sech2_point(sech2):
    return locate_catastrophe(sech2)


@pytest.fixture(scope="session")
def gauss2():
    return gaussian_pair_profile()


@pytest.fixture(scope="session")
def ctx(sech2, sech2_point):
    return PhaseContext(sech2, sech2_point)


@pytest.fixture(scope="session")
def pi2_family():
    """Default-grid family for T in {-1, 0, 1}."""
    return continuation_in_T(Pi2Grid.from_spacing(25.0, 0.025), [-1, 0, 1])


@pytest.fixture
def record():
    """Log one pass/fail line per acceptance criterion and return the verdict."""
    def _record(number, title, ok, detail):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
