import numpy as np
import pytest


class ZeroRng:
    """Generator stub whose Gaussian draws are all zero.

    ``random()`` returns 0.0, so probabilistic operators (crossover,
    mutation) always fire.
    """

    def standard_normal(self, size=None):
        return 0.0 if size is None else np.zeros(size)

    def random(self, size=None):
        return 0.0 if size is None else np.zeros(size)

    def choice(self, n, size=None, replace=True):
        return np.arange(size)

    def integers(self, low, high=None, size=None):
        return 0 if size is None else np.zeros(size, dtype=int)


@pytest.fixture
def zero_rng():
    return ZeroRng()


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for the acceptance summary, then return it."""

    def record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
