import sys

import pytest

from modcalc.exterior import Multivector
from modcalc.ratfun import Chart


@pytest.fixture
def xyz():
    return Chart(["x", "y", "z"])


@pytest.fixture
def so3_chart():
    return Chart(["x1", "x2", "x3"])


@pytest.fixture
def pi_so3(so3_chart):
    return Multivector(so3_chart, {("x1", "x2"): "x3", ("x2", "x3"): "x1", ("x3", "x1"): "x2"})


@pytest.fixture
def pi_r3(xyz):
    """1/2 dz ^ (x dx + y dy) written as a bivector."""
    return Multivector(xyz, {("z", "x"): "x/2", ("z", "y"): "y/2"})


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion that ran, in criterion order."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
