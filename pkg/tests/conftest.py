import time

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_VERDICTS = []


class _Criterion:
    """Times one acceptance criterion and records a pass/fail line for it."""

    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.detail = ""

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        seconds = time.monotonic() - self.t0
        passed = exc_type is None and (self.limit is None or seconds < self.limit)
        line = (f"[{'PASS' if passed else 'FAIL'}] criterion {self.number} ({self.title}): "
                f"{self.detail or (exc if exc else '')} [{seconds:.2f}s]")
        _VERDICTS.append(line)
        print(line)
        if exc_type is None and not passed:
            raise AssertionError(f"criterion {self.number} took {seconds:.1f}s, limit {self.limit}s")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
