import itertools

from hypothesis import given, settings

from mapfdl.cbs_dl import solve_cbs_dl
from mapfdl.core import Constraint, Graph, Instance, validate_plan
from mapfdl.dbs import ConsistencyCache, check_consistent, solve_dbs
from mapfdl.oracle import brute_force_optimal, subset_feasible

from conftest import A, B, C, grid_instances


def test_singleton_consistent(i1):
    assert check_consistent(i1, [0]) == {0: (A, B, C)}


def test_pair_inconsistent(i1):
    assert check_consistent(i1, [0, 1]) is None


def test_ring_pair_consistent(i2):
    paths = check_consistent(i2, [0, 1])
    assert paths is not None and set(paths) == {0, 1}


def test_empty_group_consistent(i1):
    assert check_consistent(i1, []) == {}


def test_cache_keyed_by_relevant_constraints(i1):
    cache = ConsistencyCache()
    check_consistent(i1, [0], cache=cache)
    # a constraint on another agent is irrelevant and hits the same entry
    check_consistent(i1, [0], [Constraint("vertex", 1, (B,), 1)], cache=cache)
    assert len(cache) == 1
    assert check_consistent(i1, [0], [Constraint("vertex", 0, (B,), 1)], cache=cache) is None
    assert len(cache) == 2


def test_i1_trace(i1):
    res = solve_dbs(i1)
    assert res.cost == 1
    # root (merge) -> {{a1,a2}} (split) -> first cost-1 child returns
    assert res.expanded_costs == [0, 0, 1]
    assert validate_plan(i1, res.plan(i1)).ok


def test_i2(i2):
    res = solve_dbs(i2)
    assert res.cost == 0 and all(p is not None for p in res.paths.values())


def test_single_agent_immediate():
    inst = Instance(Graph.from_edges(2, [(0, 1)]), ((0, 1),), 3)
    res = solve_dbs(inst)
    assert res.cost == 0 and res.nodes_expanded == 1


def test_external_constraints_forwarded(i1):
    res = solve_dbs(i1, [Constraint("vertex", 1, (B,), 1)])
    assert res.paths == {0: (A, B, C), 1: None}


@settings(max_examples=60, deadline=None)
@given(grid_instances(max_agents=4))
def test_matches_oracle_and_cbs(inst):
    res = solve_dbs(inst)
    assert res.cost == brute_force_optimal(inst) == solve_cbs_dl(inst).cost
    assert validate_plan(inst, res.plan(inst)).ok
    assert res.expanded_costs == sorted(res.expanded_costs)


@settings(max_examples=40, deadline=None)
@given(grid_instances(max_agents=4))
def test_consistency_closed_under_subsets(inst):
    agents = range(inst.num_agents)
    for k in range(1, inst.num_agents + 1):
        for group in itertools.combinations(agents, k):
            ok = check_consistent(inst, group) is not None
            assert ok == subset_feasible(inst, group)
            if ok:
                for sub in itertools.combinations(group, k - 1):
                    assert check_consistent(inst, sub) is not None
