import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vilenkin import heisenberg, padic, vilenkin

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def desk_towers():
    return [
        padic(3, 3),
        padic(5, 2),
        padic(3, 2, dim=2),
        vilenkin([2, 3, 4, 5]),
        heisenberg(3, 1),
        heisenberg(3, 2),
        heisenberg(5, 1),
    ]


DESK = desk_towers()


@pytest.fixture(params=DESK, ids=lambda t: t.describe())
def tower(request):
    return request.param


def random_values(t, seed, real=False):
    rng = np.random.default_rng(seed)
    if real:
        return rng.standard_normal(t.order)
    return rng.standard_normal(t.order) + 1j * rng.standard_normal(t.order)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
