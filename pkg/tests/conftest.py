import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from apnlab.codec import known_representatives  # noqa: E402

settings.register_profile(
    "apnlab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("apnlab")


@pytest.fixture(scope="session")
def reps():
    return [r.function for r in known_representatives()]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def closure14(reps):
    """Two rounds of 1-switch closure from the 14 classes, with its store and timing."""
    import time

    from apnlab.pipeline import ResultStore, one_switch_closure

    store = ResultStore()
    t0 = time.perf_counter()
    rep = one_switch_closure(reps, 2, labels=range(1, 15), store=store)
    return rep, store, time.perf_counter() - t0


# acceptance summary: one line per criterion at the end of the run
_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and report.when == "call":
        _CRITERIA[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py::test_criterion_" in report.nodeid and report.failed:
        _CRITERIA[report.nodeid.split("::")[-1]] = "error"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        num = int(name.split("_")[2])
        title = " ".join(name.split("_")[3:])
        verdict = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} {title}: {verdict}")
