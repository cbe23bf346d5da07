from hypothesis import given, settings

from mapfdl.cbs_dl import solve_cbs_dl
from mapfdl.core import Constraint, Graph, Instance, validate_plan
from mapfdl.ma_dbs import ConflictMatrix, merge_constraints, should_merge, solve_ma_dbs
from mapfdl.oracle import brute_force_optimal

from conftest import B, grid_instances


def cm_with(pairs):
    cm = ConflictMatrix()
    for (k, k2), n in pairs.items():
        for _ in range(n):
            cm.bump(k, k2)
    return cm


def test_should_merge_zero_threshold():
    assert should_merge(cm_with({(0, 1): 1}), frozenset({0}), frozenset({1}), 0)


def test_should_merge_strict():
    assert not should_merge(cm_with({(0, 1): 10}), frozenset({0}), frozenset({1}), 10)
    assert should_merge(cm_with({(0, 1): 11}), frozenset({0}), frozenset({1}), 10)


def test_should_merge_large_threshold():
    assert not should_merge(cm_with({(0, 1): 3}), frozenset({0}), frozenset({1}), 100)


def test_should_merge_sums_over_members():
    cm = cm_with({(0, 2): 4, (1, 2): 4, (0, 1): 50})
    assert cm.between({0, 1}, {2}) == 8
    assert should_merge(cm, frozenset({0, 1}), frozenset({2}), 7)


def test_cm_symmetric():
    cm = cm_with({(3, 1): 2})
    assert cm.between({1}, {3}) == cm.between({3}, {1}) == 2


def internal():
    return Constraint("vertex", 0, (B,), 1, frozenset({0, 1}))


def external():
    return Constraint("vertex", 0, (B,), 1, frozenset({0, 2}))


def test_merge_constraints_drops_internal():
    assert merge_constraints({internal()}, frozenset({0, 1})) == frozenset()


def test_merge_constraints_keeps_external():
    assert merge_constraints({external()}, frozenset({0, 1})) == {external()}


def test_merge_constraints_mixed():
    assert merge_constraints({internal(), external()}, frozenset({0, 1})) == {external()}


def test_b0_on_i1_merges(i1):
    res = solve_ma_dbs(i1, 0)
    assert res.cost == 1
    assert res.info["merges"] == [(0, 1)]
    assert validate_plan(i1, res.plan(i1)).ok


def test_b100_on_i2_never_merges(i2):
    res = solve_ma_dbs(i2, 100)
    assert res.cost == 0 and res.info["merges"] == []


def test_single_agent_any_threshold():
    inst = Instance(Graph.from_edges(3, [(0, 1), (1, 2)]), ((0, 2),), 4)
    for b in (0, 1, 10, 100):
        res = solve_ma_dbs(inst, b)
        assert res.cost == 0 and res.nodes_expanded == 1


def test_negative_threshold_rejected(i1):
    import pytest
    with pytest.raises(ValueError):
        solve_ma_dbs(i1, -1)


@settings(max_examples=60, deadline=None)
@given(grid_instances(max_agents=4))
def test_matches_oracle_all_thresholds(inst):
    opt = brute_force_optimal(inst)
    for b in (0, 1, 10):
        res = solve_ma_dbs(inst, b)
        assert res.cost == opt, b
        assert validate_plan(inst, res.plan(inst)).ok
        assert res.expanded_costs == sorted(res.expanded_costs)
        # merges only coarsen: every recorded meta agent contains the earlier ones it touches
        seen = []
        for m in res.info["merges"]:
            assert all(set(p) <= set(m) or not set(p) & set(m) for p in seen)
            seen.append(m)


@settings(max_examples=60, deadline=None)
@given(grid_instances(max_agents=4))
def test_huge_threshold_traces_cbs(inst):
    a = solve_ma_dbs(inst, 1e9)
    b = solve_cbs_dl(inst)
    assert a.expanded_costs == b.expanded_costs
    assert a.cost == b.cost and a.info["merges"] == []
