"""Death-based search: best-first search over sets of agents declared dead."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .cbs_dl import ZERO_COST_CHECK, solve_cbs_dl
from .core import Constraint, Instance, Path
from .search import Budget, BudgetExhausted, SolveResult, make_budget

AgentGroup = tuple[int, ...]  # sorted agent ids


@dataclass
class DtNode:
    live: tuple[AgentGroup, ...]  # ordered by smallest member id
    dead: frozenset
    seq: int

    @property
    def cost(self) -> int:
        return len(self.dead)

    def key(self):
        return (self.dead, frozenset(self.live))


class ConsistencyCache(dict):
    """(group, relevant constraint keys) -> zero-cost paths or None."""


def check_consistent(instance: Instance, group: Iterable[int],
                     external_constraints: Iterable[Constraint] = (),
                     cache: Optional[ConsistencyCache] = None,
                     budget: Optional[Budget] = None) -> Optional[dict[int, Path]]:
    """Zero-cost paths for every agent of ``group``, or None if the group is inconsistent."""
    group = tuple(sorted(group))
    if not group:
        return {}
    members = set(group)
    relevant = [c for c in external_constraints if c.agent in members]
    key = (group, frozenset(c.key for c in relevant))
    if cache is not None and key in cache:
        return cache[key]
    res = solve_cbs_dl(instance, relevant, ZERO_COST_CHECK, agents=group,
                       budget=budget if budget is not None else Budget())
    if res.status == "budget_exhausted":
        raise BudgetExhausted
    paths = res.paths if res.status == "solved" else None
    if cache is not None:
        cache[key] = paths
    return paths


def _ordered(groups) -> tuple[AgentGroup, ...]:
    return tuple(sorted(groups, key=lambda g: g[0]))


def solve_dbs(instance: Instance, external_constraints: Iterable[Constraint] = (),
              node_budget: Optional[int] = None, *,
              agents: Optional[Sequence[int]] = None,
              budget: Optional[Budget] = None,
              cache: Optional[ConsistencyCache] = None) -> SolveResult:
    budget = make_budget(node_budget, budget)
    cache = ConsistencyCache() if cache is None else cache
    agents = sorted(agents if agents is not None else range(instance.num_agents))
    external_constraints = [c for c in external_constraints if c.agent in set(agents)]
    all_agents = frozenset(agents)
    result = SolveResult("budget_exhausted")
    seq = itertools.count()

    root = DtNode(_ordered((a,) for a in agents), frozenset(), next(seq))
    open_list = [((0, len(root.live), root.seq), root)]
    seen = {root.key()}
    result.nodes_generated = 1
    last_cost = 0

    def push(parent: DtNode, child: DtNode):
        assert child.cost >= parent.cost
        assert (len(child.live) < len(parent.live)
                or sum(map(len, child.live)) < sum(map(len, parent.live)))
        members = [a for g in child.live for a in g]
        assert len(members) == len(set(members)), "live groups must be disjoint"
        assert set(members) | child.dead == all_agents and not set(members) & child.dead
        k = child.key()
        if k in seen:
            return
        seen.add(k)
        heapq.heappush(open_list, ((child.cost, len(child.live), child.seq), child))
        result.nodes_generated += 1

    try:
        while open_list:
            _, node = heapq.heappop(open_list)
            budget.charge()
            result.nodes_expanded += 1
            result.expanded_costs.append(node.cost)
            assert node.cost >= last_cost, "expansion costs must be non-decreasing"
            last_cost = node.cost

            bad = None
            solution = None
            for group in node.live:
                paths = check_consistent(instance, group, external_constraints, cache, budget)
                if paths is None:
                    bad = group
                    break
                solution = paths
            if bad is None:
                if len(node.live) <= 1:
                    result.status = "solved"
                    result.paths = {a: None for a in node.dead}
                    result.paths.update(solution or {})
                    result.paths = dict(sorted(result.paths.items()))
                    return result
                by_size = sorted(node.live, key=lambda g: (len(g), g[0]))
                g1, g2 = by_size[0], by_size[1]
                merged = tuple(sorted(g1 + g2))
                live = [g for g in node.live if g is not g1 and g is not g2] + [merged]
                push(node, DtNode(_ordered(live), node.dead, next(seq)))
            else:
                for a in bad:
                    rest = tuple(x for x in bad if x != a)
                    live = [g for g in node.live if g is not bad]
                    if rest:
                        live.append(rest)
                    push(node, DtNode(_ordered(live), node.dead | {a}, next(seq)))
    except BudgetExhausted:
        result.status = "budget_exhausted"
        return result
    raise RuntimeError("death tree exhausted without a solution")
