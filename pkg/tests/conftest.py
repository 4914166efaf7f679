import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--skip-slow", action="store_true", help="skip Monte Carlo tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--skip-slow"):
        skip = pytest.mark.skip(reason="--skip-slow given")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20190917)


ACCEPTANCE_LINES = []


@pytest.fixture
def accept():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
