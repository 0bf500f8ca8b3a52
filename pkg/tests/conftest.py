import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from mff import EpochSchedule, ModelParams

A = (0.25, 0.75)
B = (1 / 3, 2 / 3)

_acceptance: dict[str, str] = {}


@pytest.fixture
def running():
    """The running example: a=(1/4, 3/4), b=(1/3, 2/3), squares schedule."""
    return ModelParams(A, B), EpochSchedule("squares")


def _simplex(size):
    # integer parts keep every weight well inside (0, 1)
    return st.lists(st.integers(1, 50), min_size=size, max_size=size).map(
        lambda ks: tuple(k / sum(ks) for k in ks))


@st.composite
def model_params(draw, sizes=((2, 2), (2, 3), (3, 2), (3, 3))):
    c1, c2 = draw(st.sampled_from(sizes))
    return ModelParams(draw(_simplex(c1)), draw(_simplex(c2)))


def exact_log_mass(params, schedule, word):
    """Independent oracle: product of weights by direct position lookup."""
    total = Fraction(1)
    for j, d in enumerate(word, start=1):
        weights = params.a if schedule.alphabet_at(j) == 1 else params.b
        total *= Fraction(weights[d])
    return math.log(total) if total else -math.inf


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
