import random
from collections import deque

import pytest

from toastflow.graph import Graph


def path_graph(n):
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def block(graph, x0, y0, a, b):
    return frozenset(graph.vertex_at(x0 + dx, y0 + dy) for dx in range(a) for dy in range(b))


def bfs_dist(graph, sources):
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        for y in graph.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def random_blob(graph, size, rng):
    """Random connected vertex set grown from one seed vertex."""
    start = rng.choice(graph.vertices)
    blob = {start}
    frontier = set(graph.neighbors(start))
    while len(blob) < size and frontier:
        v = rng.choice(sorted(frontier))
        blob.add(v)
        frontier.discard(v)
        frontier.update(y for y in graph.neighbors(v) if y not in blob)
    return frozenset(blob)


def fill_holes(graph, blob):
    """Add every complement component other than the largest one."""
    comps = graph.components(graph.vertex_set - blob)
    if len(comps) <= 1:
        return blob
    comps.sort(key=len, reverse=True)
    out = set(blob)
    for c in comps[1:]:
        out |= c
    return frozenset(out)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
