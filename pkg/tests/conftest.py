import pytest

import qradar as q


@pytest.fixture
def optical():
    """Envelope with realistic optical numbers (rad/s)."""
    return q.make_gaussian_spectrum(1.2e15, 1e13)


@pytest.fixture
def unit_env():
    return q.make_gaussian_spectrum(1.0, 0.1)


@pytest.fixture
def geom():
    return q.BeamGeometry(1.0)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k, (passed, detail) in sorted(acceptance.RESULTS.items()):
        terminalreporter.write_line(acceptance.format_line(k, passed, detail))
