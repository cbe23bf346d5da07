import random

import pytest
from hypothesis import given, settings

from mapfdl.core import Graph, Instance
from mapfdl.oracle import OracleTooLarge, brute_force_optimal, subset_feasible

from conftest import grid_instances


def test_i1(i1):
    assert not subset_feasible(i1, [0, 1])
    assert brute_force_optimal(i1) == 1


def test_i2(i2):
    assert subset_feasible(i2, [0, 1])
    assert brute_force_optimal(i2) == 0


def test_singletons_feasible(i1, i2):
    for inst in (i1, i2):
        assert all(subset_feasible(inst, [a]) for a in range(inst.num_agents))


def test_shared_goal():
    g = Graph.from_edges(5, [(0, 4), (1, 4), (2, 4), (3, 4)])
    inst = Instance(g, ((0, 4), (1, 4), (2, 4), (3, 4)), 3)
    assert brute_force_optimal(inst) == 3


def test_size_bound():
    g = Graph.from_edges(2, [(0, 1)])
    inst = Instance(g, tuple((0, 1) for _ in range(6)), 1)
    with pytest.raises(OracleTooLarge):
        brute_force_optimal(inst)


@settings(max_examples=60, deadline=None)
@given(grid_instances(max_agents=4))
def test_invariant_under_agent_reordering(inst):
    rng = random.Random(inst.name)
    agents = list(inst.agents)
    rng.shuffle(agents)
    assert brute_force_optimal(inst) == brute_force_optimal(Instance(inst.graph, tuple(agents), inst.deadline))


@settings(max_examples=60, deadline=None)
@given(grid_instances(max_agents=4))
def test_invariant_under_vertex_relabeling(inst):
    rng = random.Random(inst.name)
    n = inst.graph.n_vertices
    perm = list(range(n))
    rng.shuffle(perm)
    g = Graph.from_edges(n, [(perm[u], perm[v]) for u, v in inst.graph.edges])
    relabeled = Instance(g, tuple((perm[s], perm[t]) for s, t in inst.agents), inst.deadline)
    assert brute_force_optimal(inst) == brute_force_optimal(relabeled)


@settings(max_examples=40, deadline=None)
@given(grid_instances(max_agents=4))
def test_monotone_under_inclusion(inst):
    full = list(range(inst.num_agents))
    if subset_feasible(inst, full):
        for a in full:
            assert subset_feasible(inst, [x for x in full if x != a])
