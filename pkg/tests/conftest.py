import numpy as np
import pytest
from hypothesis import settings

from lqrpid.reference import OSCILLATORY, SLUGGISH


settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("fast", max_examples=5, deadline=None)
settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def oscillatory():
    return OSCILLATORY


@pytest.fixture
def sluggish():
    return SLUGGISH


@pytest.fixture
def criterion(request):
    """Record an acceptance line ``(criterion, passed, detail)`` for the summary."""
    log = request.config.stash[_ACCEPTANCE]

    def record(label: str, passed: bool, detail: str = ""):
        log.append((label, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {label} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in log:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
