import sys

import pytest


def pytest_runtest_logreport(report):
    # one visible verdict line per acceptance criterion
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        sys.stderr.write(f"[acceptance] {status} {name}\n")


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the jitted quadrature kernels once so timed tests measure math,
    # not compilation
    from favardkit.projection import warmup

    warmup()


@pytest.fixture(scope="session")
def favard_table4():
    from favardkit.projection import favard_table

    return favard_table(4, 1e-3)
