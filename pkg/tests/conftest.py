import pytest

from sisrecon import AdjacencyMatrix, SISParams


@pytest.fixture
def default_params():
    return SISParams(0.05, 0.1)


@pytest.fixture
def k2():
    return AdjacencyMatrix.complete(2)


@pytest.fixture
def k3():
    return AdjacencyMatrix.complete(3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
