import re

import pytest

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        passed = report.outcome == "passed" and not hasattr(report, "wasxfail")
        # parametrized criteria pass only if every case passes
        _CRITERIA[key] = _CRITERIA.get(key, True) and passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), passed in sorted(_CRITERIA.items()):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} {name:<32s} {verdict}")


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger JIT compilation once so timings measure steady-state runtime."""
    import numpy as np

    from gapsc.pipeline import enhance
    from gapsc.spectral_frames import AudioSignal

    enhance(AudioSignal(np.random.default_rng(0).standard_normal(2000)))
