"""Budgets and result records shared by the search-based solvers."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .core import Instance, Path, Plan


class BudgetExhausted(Exception):
    pass


@dataclass
class Budget:
    """Cooperative node/wall-clock budget, shared by nested searches.

    ``deadline`` is an absolute ``time.monotonic()`` value; the clock is read
    every ``poll_every`` charges.
    """

    node_limit: Optional[int] = None
    deadline: Optional[float] = None
    poll_every: int = 8
    expanded: int = 0

    @classmethod
    def wall_clock(cls, seconds: float, node_limit: Optional[int] = None) -> "Budget":
        return cls(node_limit=node_limit, deadline=time.monotonic() + seconds)

    def charge(self, n: int = 1) -> None:
        self.expanded += n
        if self.node_limit is not None and self.expanded > self.node_limit:
            raise BudgetExhausted
        if self.deadline is not None and self.expanded % self.poll_every == 0:
            self.check_clock()

    def check_clock(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExhausted


def make_budget(node_budget: Optional[int], budget: Optional[Budget]) -> Budget:
    if budget is not None:
        if node_budget is not None:
            raise ValueError("pass either node_budget or budget, not both")
        return budget
    return Budget(node_limit=node_budget)


@dataclass
class SolveResult:
    """Outcome of one solver call.

    ``status`` is "solved", "inconsistent" (zero-cost check failed) or
    "budget_exhausted". ``paths`` covers only the agents the call was asked
    to plan for.
    """

    status: str
    paths: dict[int, Optional[Path]] = field(default_factory=dict)
    nodes_expanded: int = 0
    nodes_generated: int = 0
    expanded_costs: list[int] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    @property
    def cost(self) -> Optional[int]:
        if self.status != "solved":
            return None
        return sum(p is None for p in self.paths.values())

    def plan(self, instance: Instance) -> Plan:
        return Plan.from_mapping(instance.num_agents, self.paths)
