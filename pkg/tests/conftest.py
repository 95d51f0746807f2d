import numpy as np
import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the final report."""
    def record(key, title, passed, detail=""):
        _CRITERIA[key] = (title, bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[key]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {key}: {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
