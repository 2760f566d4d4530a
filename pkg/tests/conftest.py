import pytest

from qclique.graph import AdjacencyMatrix

_ACCEPTANCE = {}


@pytest.fixture
def p3():
    """Path 1-2-3, the three-node worked example."""
    return AdjacencyMatrix.path(3)


@pytest.fixture
def k3():
    return AdjacencyMatrix.complete(3)


@pytest.fixture
def empty2():
    return AdjacencyMatrix.empty(2)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        prev = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
