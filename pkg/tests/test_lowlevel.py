import itertools
import random

from hypothesis import given, settings, strategies as st

from mapfdl.core import Constraint, Graph, Instance, bfs_distances, validate_plan, Plan
from mapfdl.lowlevel import ConstraintIndex, constrained_path

from conftest import A, B, C


def vcon(agent, v, t):
    return Constraint("vertex", agent, (v,), t)


def econ(agent, u, v, t):
    return Constraint("edge", agent, (u, v), t)


def test_unconstrained_corridor(i1):
    assert constrained_path(i1, 0, ()) == (A, B, C)


def test_vertex_constraint_blocks_corridor(i1):
    assert constrained_path(i1, 0, [vcon(0, B, 1)]) is None


def test_edge_constraint_blocks_only_move(i1):
    assert constrained_path(i1, 1, [econ(1, C, B, 0)]) is None


def test_constraints_on_other_agents_ignored(i1):
    assert constrained_path(i1, 0, [vcon(1, B, 1)]) == (A, B, C)


def test_slack_path_on_open_grid():
    g = Graph.from_grid(["...", "...", "..."])
    inst = Instance(g, ((0, 8),), 6)
    p = constrained_path(inst, 0, ())
    assert len(p) == 7 and p[0] == 0 and p[-1] == 8
    assert validate_plan(inst, Plan((p,))).ok


def test_goal_may_be_left_and_revisited():
    # only way through: be off the goal at t=1
    inst = Instance(Graph.from_edges(2, [(0, 1)]), ((0, 0),), 2)
    assert constrained_path(inst, 0, [vcon(0, 0, 1)]) == (0, 1, 0)


def test_start_vertex_constraint():
    inst = Instance(Graph.from_edges(2, [(0, 1)]), ((0, 1),), 1)
    assert constrained_path(inst, 0, [vcon(0, 0, 0)]) is None


def test_constraint_index_membership():
    cons = [vcon(0, 1, 2), econ(1, 2, 3, 0)]
    idx = ConstraintIndex(cons)
    assert idx.forbids_vertex(0, 1, 2) and not idx.forbids_vertex(1, 1, 2)
    assert idx.forbids_edge(1, 2, 3, 0) and not idx.forbids_edge(1, 3, 2, 0)


def enumerate_paths(inst, agent, cons):
    """All |V|^(T+1) sequences filtered by the rules; returns True if any survives."""
    T = inst.deadline
    s, g = inst.agents[agent]
    V = inst.graph.n_vertices
    vforb = {(c.loc[0], c.t) for c in cons if c.agent == agent and c.kind == "vertex"}
    eforb = {(c.loc[0], c.loc[1], c.t) for c in cons if c.agent == agent and c.kind == "edge"}
    adj = {(u, v) for u, v in inst.graph.edges} | {(v, u) for u, v in inst.graph.edges}
    for mid in itertools.product(range(V), repeat=T - 1) if T >= 1 else [()]:
        seq = (s, *mid, g) if T >= 1 else (s,)
        if T == 0 and s != g:
            continue
        if any((seq[t], t) in vforb for t in range(T + 1)):
            continue
        if any(seq[t] != seq[t + 1] and (seq[t], seq[t + 1]) not in adj for t in range(T)):
            continue
        if any((seq[t], seq[t + 1], t) in eforb for t in range(T)):
            continue
        return True
    return False


@st.composite
def small_problem(draw):
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    V = rng.randint(1, 9)
    pairs = [(u, v) for u in range(V) for v in range(u + 1, V)]
    edges = [e for e in pairs if rng.random() < 0.35]
    g = Graph.from_edges(V, edges)
    s = rng.randrange(V)
    d = bfs_distances(g, s)
    goal = rng.choice([v for v in range(V) if d[v] <= 4])
    T = rng.randint(int(d[goal]), 4)
    inst = Instance(g, ((s, goal),), T)
    cons = []
    for _ in range(rng.randint(0, 6)):
        t = rng.randint(0, T)
        v = rng.randrange(V)
        if rng.random() < 0.5 or t == T or not g.neighbors[v]:
            cons.append(vcon(0, v, t))
        else:
            cons.append(econ(0, v, rng.choice(g.neighbors[v]), t))
    return inst, cons


@settings(max_examples=300, deadline=None)
@given(small_problem())
def test_matches_exhaustive_enumeration(problem):
    inst, cons = problem
    path = constrained_path(inst, 0, cons)
    assert (path is not None) == enumerate_paths(inst, 0, cons)
    if path is not None:
        assert validate_plan(inst, Plan((path,))).ok
        assert not any(c.violated_by(path) for c in cons)


@settings(max_examples=300, deadline=None)
@given(small_problem())
def test_pruning_never_changes_existence(problem):
    inst, cons = problem
    a = constrained_path(inst, 0, cons)
    b = constrained_path(inst, 0, cons, prune=False)
    assert (a is None) == (b is None)
    if b is not None:
        assert not any(c.violated_by(b) for c in cons)
