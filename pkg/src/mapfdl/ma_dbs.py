"""Meta-agent DBS: CBS-DL on the high level, DBS for merged meta agents."""
from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import Constraint, Instance, Path, constraints_for_collision, scan_collisions
from .dbs import ConsistencyCache, solve_dbs
from .lowlevel import constrained_path
from .search import Budget, BudgetExhausted, SolveResult, make_budget

MetaAgent = frozenset


class ConflictMatrix(Counter):
    """Collision counts per unordered pair of simple agents."""

    def bump(self, k: int, k2: int) -> None:
        self[frozenset((k, k2))] += 1

    def between(self, mi: Iterable[int], mj: Iterable[int]) -> int:
        return sum(self.get(frozenset((k, k2)), 0) for k in mi for k2 in mj)


def should_merge(cm: ConflictMatrix, mi: MetaAgent, mj: MetaAgent, merge_threshold: float) -> bool:
    return cm.between(mi, mj) > merge_threshold


def merge_constraints(node_constraints: Iterable[Constraint], merged: MetaAgent) -> frozenset:
    """Drop constraints spawned by collisions inside ``merged``.

    Constraints always address simple agents, so the survivors already apply
    to the right member of the meta agent.
    """
    return frozenset(c for c in node_constraints if not c.spawned_from <= merged)


@dataclass
class _Node:
    constraints: frozenset
    paths: tuple[Optional[Path], ...]  # indexed by simple agent id
    view: tuple[MetaAgent, ...]  # meta agent each agent was planned as
    cost: int = 0
    n_collisions: int = 0
    collision: object = None
    seq: int = 0

    def evaluate(self, horizon: int):
        self.collision, self.n_collisions = scan_collisions(self.paths, range(len(self.paths)), horizon)
        self.cost = sum(p is None for p in self.paths)


def solve_ma_dbs(instance: Instance, merge_threshold: float = 10, node_budget: Optional[int] = None, *,
                 budget: Optional[Budget] = None) -> SolveResult:
    if merge_threshold < 0:
        raise ValueError("merge threshold must be non-negative")
    budget = make_budget(node_budget, budget)
    M = instance.num_agents
    T = instance.deadline
    cm = ConflictMatrix()
    meta_of = {a: MetaAgent((a,)) for a in range(M)}
    cache = ConsistencyCache()
    result = SolveResult("budget_exhausted")
    seq = itertools.count()
    result.info["merges"] = []

    def replan(meta: MetaAgent, constraints) -> dict[int, Optional[Path]]:
        if len(meta) == 1:
            (a,) = meta
            return {a: constrained_path(instance, a, [c for c in constraints if c.agent == a])}
        sub = solve_dbs(instance, [c for c in constraints if c.agent in meta],
                        agents=sorted(meta), budget=budget, cache=cache)
        if sub.status != "solved":
            raise BudgetExhausted
        return sub.paths

    def refresh(node: _Node, meta: MetaAgent) -> None:
        node.constraints = merge_constraints(node.constraints, meta)
        paths = list(node.paths)
        for a, p in replan(meta, node.constraints).items():
            paths[a] = p
        node.paths = tuple(paths)
        node.view = tuple(meta if a in meta else m for a, m in enumerate(node.view))

    def push(node: _Node):
        node.evaluate(T)
        node.seq = next(seq)
        heapq.heappush(open_list, ((node.cost, node.n_collisions, node.seq), node))

    root = _Node(frozenset(), tuple(constrained_path(instance, a, ()) for a in range(M)),
                 tuple(meta_of[a] for a in range(M)))
    open_list = []
    push(root)
    result.nodes_generated = 1
    last_cost = 0

    try:
        while open_list:
            _, node = heapq.heappop(open_list)
            budget.charge()
            result.nodes_expanded += 1
            result.expanded_costs.append(node.cost)
            assert node.cost >= last_cost, "expansion costs must be non-decreasing"
            last_cost = node.cost
            col = node.collision
            if col is None:
                result.status = "solved"
                result.paths = dict(enumerate(node.paths))
                return result

            cm.bump(col.i, col.j)
            mi, mj = meta_of[col.i], meta_of[col.j]
            stale = [m for m in dict.fromkeys((mi, mj)) if any(node.view[a] != m for a in m)]
            if stale:
                # node was planned before a merge touching these agents
                for m in stale:
                    refresh(node, m)
                push(node)
                continue
            if should_merge(cm, mi, mj, merge_threshold):
                merged = mi | mj
                assert mi <= merged and mj <= merged
                for a in merged:
                    meta_of[a] = merged
                result.info["merges"].append(tuple(sorted(merged)))
                refresh(node, merged)
                push(node)
                continue

            for con in constraints_for_collision(col):
                assert con.violated_by(node.paths[con.agent])
                assert con not in node.constraints
                cons = node.constraints | {con}
                meta = meta_of[con.agent]
                paths = list(node.paths)
                for a, p in replan(meta, cons).items():
                    paths[a] = p
                child = _Node(cons, tuple(paths), node.view)
                push(child)
                assert child.cost >= node.cost, "child cost below parent cost"
                result.nodes_generated += 1
    except BudgetExhausted:
        result.status = "budget_exhausted"
        return result
    raise RuntimeError("constraint tree exhausted without a solution")
