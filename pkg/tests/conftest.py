import numpy as np
import pytest

from slablens.core import C0, SlabGeometry

F0 = 1.0e10
OMEGA0 = 2 * np.pi * F0
LAM0 = C0 / F0
K00 = OMEGA0 / C0


@pytest.fixture
def geom():
    return SlabGeometry(0.5 * LAM0, LAM0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
