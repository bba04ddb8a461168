import time
from contextlib import contextmanager

import pytest

_CRITERIA: dict = {}


class _Criterion:
    def __init__(self):
        self.detail = ""


@pytest.fixture
def criterion():
    """Record one acceptance criterion; a raised exception marks it FAIL."""

    @contextmanager
    def record(number, title):
        c = _Criterion()
        start = time.perf_counter()
        try:
            yield c
        except BaseException as exc:
            _CRITERIA[number] = (title, False, f"{type(exc).__name__}: {exc}".splitlines()[0],
                                 time.perf_counter() - start)
            raise
        _CRITERIA[number] = (title, True, c.detail, time.perf_counter() - start)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail, elapsed = _CRITERIA[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title} ({elapsed:.2f} s) {detail}")
