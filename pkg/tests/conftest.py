import time

import pytest
from mpmath import mp

from dsemi.config import RunConfig
from dsemi.qseries import QContext, hp
from dsemi.suites import Workspace, run_suites

CRITERIA_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _precision():
    """Every test starts at the default 60 digits, whatever the previous one did."""
    mp.dps = 60
    yield
    mp.dps = 60


@pytest.fixture
def ctx():
    return QContext.create("0.5", 60)


@pytest.fixture(scope="session")
def workspace():
    """Default-parameter workspace; the quadrature reference grid is built once per session."""
    return Workspace(RunConfig())


@pytest.fixture(scope="session")
def full_run(workspace):
    """All suites on the shared workspace: (records, wall seconds)."""
    t0 = time.perf_counter()
    records = run_suites(workspace.cfg, ws=workspace)
    return records, time.perf_counter() - t0


@pytest.fixture
def m3params(ctx):
    from dsemi.e7system import M3Params

    return M3Params(tuple(hp(s) for s in ("0.1", "0.2", "0.3", "0.4")), hp("0.35"), hp("1.3"), ctx, 0)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[1].rstrip(':'))):
            terminalreporter.write_line(line)
