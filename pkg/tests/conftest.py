from hypothesis import HealthCheck, settings

settings.register_profile("belltax", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("belltax")

import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, ok, detail)."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA, key=lambda x: x[0]):
            terminalreporter.write_line(line)
