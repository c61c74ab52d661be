import pytest

from qeclipse.harness import PROFILES, GridSpec, rows_from_solves, solve_grid


@pytest.fixture(scope="session")
def desk_spec():
    return GridSpec(**PROFILES["desk"])


@pytest.fixture(scope="session")
def desk_solves(desk_spec):
    # full desk-scale grid, solved once per session (about half a minute)
    return solve_grid(desk_spec)


@pytest.fixture(scope="session")
def desk_rows(desk_spec, desk_solves):
    return rows_from_solves(desk_spec, desk_solves)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion, then assert it."""

    def _report(criterion, passed, detail):
        line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
