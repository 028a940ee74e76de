import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record a named acceptance criterion as PASS or FAIL with its runtime."""

    @contextmanager
    def run(name):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            _CRITERIA.append(("FAIL", name, time.perf_counter() - start))
            raise
        _CRITERIA.append(("PASS", name, time.perf_counter() - start))

    return run


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, secs in _CRITERIA:
        terminalreporter.write_line(f"[{status}] {name} ({secs:.2f}s)")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_jsonl(tmp_path):
    def write(name, rows):
        path = tmp_path / name
        path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
                        encoding="utf-8")
        return path
    return write
