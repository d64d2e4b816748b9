import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dronevrp.scenario import Params, Scenario, generate_random

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def one_stop():
    """Depot at the origin, one customer 180 m away with a 1 kg parcel."""
    return Scenario(np.array([[0.0, 0.0], [180.0, 0.0]]), np.array([1.0]))


@pytest.fixture
def small_scenario():
    return generate_random(5, 0.25, seed=7, params=Params(time_limit=900.0))



_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion; returns the flag."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
