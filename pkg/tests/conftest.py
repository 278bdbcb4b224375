import pytest

from hotloop.analysis import sweep_temperature
from hotloop.plant import build_plant

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}

SWEEP_SETPOINTS = (49.0, 50.0, 55.0, 57.0, 60.0, 62.0, 65.0, 67.0, 70.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def plant():
    return build_plant()


@pytest.fixture(scope="session")
def sweep(plant):
    return sweep_temperature(plant, SWEEP_SETPOINTS)
