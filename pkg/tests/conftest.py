import numpy as np
import pytest

from radm.spectral import Grid, make_rng, random_field


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(params=[8, 16])
def grid(request):
    return Grid(request.param)


def rand_field(n, seed=0, **kw):
    return random_field(Grid(n), make_rng(seed), **kw)


def rel_err(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
