import numpy as np
import pytest

from qlperception import SweepSpec, default_config, run_sweep

# Input vector used throughout the worked example of the encoding.
REFERENCE_X = (0.8, 0.3, 0.7)


@pytest.fixture
def rgb():
    return default_config()


@pytest.fixture(scope="session")
def full_sweep():
    return run_sweep(SweepSpec(step=5))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criteria of the build")


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_c" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        _acceptance.setdefault(report.nodeid, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_acceptance.items()):
        name = nodeid.split("::")[-1][len("test_"):]
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
