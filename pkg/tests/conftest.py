import numpy as np
import pytest

from tailcount import DailyPanel

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20250601)


@pytest.fixture
def small_panel(rng):
    return DailyPanel(rng.gamma(0.6, 1.2, size=(5, 2, 4, 12)))


def write_long_csv(path, rows):
    with open(path, "w") as fh:
        fh.write("run,year,day,site,value\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")


@pytest.fixture
def record_criterion():
    """Collect one pass/fail line per acceptance criterion for the summary."""

    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
