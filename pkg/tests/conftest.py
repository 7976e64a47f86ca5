import numpy as np
import pytest

import cransched as cs
from cransched import _backend

ACCEPTANCE_LINES = []


@pytest.fixture(params=["compiled", "python"])
def backend(request):
    if request.param == "compiled" and not _backend.compiled_available():
        pytest.skip("compiled kernels not built")
    previous = _backend.backend_name()
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(previous)


def random_small_config(rng, max_slots=8, extra_users=2, **kw):
    while True:
        C, B, Z = (int(x) for x in rng.integers(1, 3, size=3))
        if C * B * Z <= max_slots:
            break
    U = int(rng.integers(C * B, C * B + extra_users + 1))
    return cs.NetworkConfig(C, B, Z, U, rng_seed=int(rng.integers(2**32)), **kw)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
