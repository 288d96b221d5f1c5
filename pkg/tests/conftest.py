from __future__ import annotations

import pytest

from coordlab.graph import Graph, generate_circulant

_ACCEPTANCE_LINES: list[str] = []

CIRCULANT_CORPUS = [
    (4, 2), (4, 3), (5, 2), (5, 4), (6, 2), (6, 3), (6, 4), (6, 5),
    (7, 2), (7, 4), (7, 6), (8, 3), (8, 4), (8, 5), (9, 2), (9, 4),
    (10, 3), (10, 4), (11, 4), (12, 5),
]


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def cube() -> Graph:
    return Graph.from_edges(8, [(v, v ^ (1 << b)) for v in range(8) for b in range(3) if v < v ^ (1 << b)])


def two_triangles() -> Graph:
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def connected_corpus() -> list[Graph]:
    """Connected regular graphs with N <= 12, two of them non-circulant."""
    return [generate_circulant(n, k) for n, k in CIRCULANT_CORPUS] + [petersen(), cube()]


def corpus_id(g: Graph) -> str:
    return f"N{g.n}K{g.k}-{hash(g.adjacency) & 0xFFFF:04x}"


@pytest.fixture
def four_cycle() -> Graph:
    return generate_circulant(4, 2)


@pytest.fixture
def six_cycle() -> Graph:
    return generate_circulant(6, 2)


@pytest.fixture(scope="session")
def acceptance_log():
    def log(number: int, title: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
