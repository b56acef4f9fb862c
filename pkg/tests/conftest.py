import numpy as np
import pytest

from stabletool import kernel_1d

_ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    return ok


@pytest.fixture
def report():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def k_skew():
    """s = 0.75, weights 1.5 / 0.5."""
    return kernel_1d(1.0, 0.5, 0.75)


@pytest.fixture
def k_low():
    return kernel_1d(1.0, 0.5, 0.25)


@pytest.fixture
def k_half():
    return kernel_1d(1.0, 0.5, 0.5)
