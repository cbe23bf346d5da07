import random

import pytest
from hypothesis import strategies as st

from mapfdl.core import Graph, Instance, InstanceError, bfs_distances, parse_instance

I1_TEXT = """mapfdl 1
deadline 2
graph 3 2
0 1
1 2
agents 2
0 2
2 0
"""

# 2x2 ring; a1 (0,0)->(1,1), a2 (1,1)->(0,0)
I2_TEXT = """mapfdl 1
deadline 2
map 2 2
..
..
agents 2
0 0 1 1
1 1 0 0
"""

A, B, C = 0, 1, 2


@pytest.fixture
def i1():
    return parse_instance(I1_TEXT, "I1")


@pytest.fixture
def i2():
    return parse_instance(I2_TEXT, "I2")


def line_graph(n):
    return Graph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def random_grid_instance(rng: random.Random, height=3, width=3, block=0.15, max_agents=3,
                         slack=(0, 1, 2), max_deadline=8):
    """Small random grid instance; agents drawn from one component, distinct starts and goals."""
    while True:
        rows = ["".join("@" if rng.random() < block else "." for _ in range(width)) for _ in range(height)]
        g = Graph.from_grid(rows)
        if g.n_vertices < 2:
            continue
        v0 = rng.randrange(g.n_vertices)
        d0 = bfs_distances(g, v0)
        comp = [v for v in range(g.n_vertices) if d0[v] != float("inf")]
        m = rng.randint(1, min(max_agents, len(comp)))
        starts = rng.sample(comp, m)
        goals = rng.sample(comp, m)
        dmax = max(bfs_distances(g, s)[t] for s, t in zip(starts, goals))
        T = int(dmax) + rng.choice(slack)
        if T > max_deadline:
            continue
        try:
            return Instance(g, tuple(zip(starts, goals)), T, f"rand{rng.random():.6f}")
        except InstanceError:
            continue


@st.composite
def grid_instances(draw, **kw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_grid_instance(random.Random(seed), **kw)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
