import numpy as np
import pytest

from pathlab.graph import build_graph
from pathlab.mapio import grid_to_graph, parse_map

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def report_criterion():
    def report(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return report


def grid_text(rows):
    return "type octile\nheight %d\nwidth %d\nmap\n%s\n" % (len(rows), len(rows[0]), "\n".join(rows))


@pytest.fixture
def open3():
    return parse_map(grid_text(["...", "...", "..."])).with_neighborhood("four")


@pytest.fixture
def open3_graph(open3):
    return grid_to_graph(open3)


@pytest.fixture
def path3():
    return build_graph(3, [(0, 1, 2.0), (1, 2, 3.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
