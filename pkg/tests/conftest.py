import os
import sys

import pytest

ACCEPTANCE_LINES = []


def report_line(line: str):
    """Record an acceptance result; printed in the terminal summary and to stdout."""
    ACCEPTANCE_LINES.append(line)
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fig2():
    from optocausal.params import fig2_params
    return fig2_params()


@pytest.fixture(params=["numpy", "numba"])
def backend(request):
    from optocausal import _kernels
    impl = getattr(_kernels, f"{request.param}_impl")
    if impl is None:
        pytest.skip("numba backend unavailable")
    return impl
