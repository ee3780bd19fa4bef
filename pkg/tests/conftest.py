import numpy as np
import pytest

from qaep import catalog


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def biased():
    return catalog.biased_qubit(0.9)


@pytest.fixture
def period_two():
    return catalog.period_two_chain(0.3)


_ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line, then assert it."""

    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
