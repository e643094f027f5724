import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one of the twelve acceptance criteria")


@pytest.fixture
def acceptance_log():
    return _LINES.append


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
