"""Shared fixtures: the standard adaptive runs and the acceptance report."""

import pytest

from rbfpum import RunConfig
from rbfpum.harness import run_solve

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_report():
    """Record one pass/fail line per acceptance criterion."""

    def _report(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return line

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def u1_grid_run():
    """The standard u1 adaptive run: 121-point grid start, default knobs."""
    return run_solve(RunConfig(problem="u1", mode="grid"))


@pytest.fixture(scope="session")
def u2_grid_run():
    return run_solve(RunConfig(problem="u2", mode="grid"))


@pytest.fixture(scope="session")
def u2_halton_run():
    return run_solve(RunConfig(problem="u2", mode="halton"))
