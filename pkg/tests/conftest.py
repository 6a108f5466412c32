import numpy as np
import pytest

from fieldlab.modebasis import PhysicalConstants

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def unit():
    return PhysicalConstants()


@pytest.fixture
def odd_units():
    # non-unit constants catch misplaced factors of hbar, c, m, e
    return PhysicalConstants(hbar=1.3, c=2.1, m=0.7, e=0.9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
