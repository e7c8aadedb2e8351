import time

import pytest

from shepwm.parametric import build_parametric_rur

_BUILT = {}


def parametric(n: int):
    """Build (once per session) the parametric representation for ``n`` angles."""
    if n not in _BUILT:
        t0 = time.perf_counter()
        p = build_parametric_rur(n)
        _BUILT[n] = (p, time.perf_counter() - t0)
    return _BUILT[n]


@pytest.fixture(scope="session")
def build():
    return parametric


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import summary_lines

    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
