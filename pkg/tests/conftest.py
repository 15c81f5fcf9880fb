import sys

import numpy as np
import pytest

from dykstra_msf.kernels import available_backends

BACKENDS = available_backends()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return BACKENDS[request.param]


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, whatever the capture mode
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[k]
        terminalreporter.write_line(mod.format_line(k, ok, detail))
