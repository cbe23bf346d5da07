"""Conflict-based search minimizing the number of unsuccessful agents."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import Collision, Constraint, Instance, Path, constraints_for_collision, scan_collisions
from .lowlevel import constrained_path
from .search import Budget, BudgetExhausted, SolveResult, make_budget

FULL = "full"
ZERO_COST_CHECK = "zero_cost_check"


@dataclass
class CtNode:
    constraints: frozenset
    paths: tuple[Optional[Path], ...]  # aligned with the solver's agent list
    cost: int
    n_collisions: int
    collision: Optional[Collision]
    seq: int

    def sort_key(self):
        return (self.cost, self.n_collisions, self.seq)


def _agent_constraints(constraints: Iterable[Constraint], agent: int) -> list[Constraint]:
    return [c for c in constraints if c.agent == agent]


def _evaluate(paths, agents, horizon):
    first, count = scan_collisions(paths, agents, horizon)
    cost = sum(p is None for p in paths)
    return cost, count, first


def solve_cbs_dl(instance: Instance, external_constraints: Iterable[Constraint] = (),
                 mode: str = FULL, node_budget: Optional[int] = None, *,
                 agents: Optional[Sequence[int]] = None,
                 budget: Optional[Budget] = None) -> SolveResult:
    """Best-first search over the constraint tree.

    In ``zero_cost_check`` mode the search stops with status "inconsistent"
    as soon as it picks a node with nonzero cost for expansion.
    """
    if mode not in (FULL, ZERO_COST_CHECK):
        raise ValueError(f"unknown mode {mode!r}")
    budget = make_budget(node_budget, budget)
    agents = sorted(agents if agents is not None else range(instance.num_agents))
    pos = {a: k for k, a in enumerate(agents)}
    T = instance.deadline
    result = SolveResult("budget_exhausted")
    seq = itertools.count()

    root_cons = frozenset(c for c in external_constraints if c.agent in pos)
    root_paths = tuple(constrained_path(instance, a, _agent_constraints(root_cons, a)) for a in agents)
    cost, count, first = _evaluate(root_paths, agents, T)
    open_list = [((cost, count, next(seq)), CtNode(root_cons, root_paths, cost, count, first, 0))]
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
            if mode == ZERO_COST_CHECK and node.cost > 0:
                result.status = "inconsistent"
                return result
            if node.collision is None:
                result.status = "solved"
                result.paths = dict(zip(agents, node.paths))
                return result
            for con in constraints_for_collision(node.collision):
                k = pos[con.agent]
                assert con.violated_by(node.paths[k]), "parent plan must violate the new constraint"
                assert con not in node.constraints
                cons = node.constraints | {con}
                new_path = constrained_path(instance, con.agent, _agent_constraints(cons, con.agent))
                paths = node.paths[:k] + (new_path,) + node.paths[k + 1:]
                cost, count, first = _evaluate(paths, agents, T)
                assert cost >= node.cost, "child cost below parent cost"
                child = CtNode(cons, paths, cost, count, first, next(seq))
                heapq.heappush(open_list, (child.sort_key(), child))
                result.nodes_generated += 1
    except BudgetExhausted:
        result.status = "budget_exhausted"
        return result
    # unreachable: the all-unsuccessful plan is always a solution
    raise RuntimeError("constraint tree exhausted without a solution")
