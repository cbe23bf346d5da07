"""Uniform entry point over the four optimal solvers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cbs_dl import solve_cbs_dl
from .core import Instance
from .dbs import solve_dbs
from .ma_dbs import solve_ma_dbs
from .search import Budget, SolveResult

ALGORITHMS = ("ilp", "cbs-dl", "dbs", "ma-dbs")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    merge_threshold: Optional[float] = None

    @property
    def label(self) -> str:
        if self.name == "ma-dbs":
            b = self.merge_threshold
            return f"MA-DBS({int(b) if float(b).is_integer() else b})"
        return {"ilp": "ILP", "cbs-dl": "CBS-DL", "dbs": "DBS"}[self.name]

    @property
    def params(self) -> str:
        return "" if self.merge_threshold is None else f"B={self.merge_threshold:g}"

    @classmethod
    def parse(cls, text: str) -> "AlgorithmSpec":
        """'cbs-dl', 'ma-dbs:10' or a paper label such as 'MA-DBS(10)'."""
        t = text.strip().lower()
        if t.startswith("ma-dbs"):
            rest = t[len("ma-dbs"):].strip(":()= ")
            return cls("ma-dbs", float(rest) if rest else 10.0)
        if t not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {text!r}")
        return cls(t)


PAPER_ALGORITHMS = (
    AlgorithmSpec("ilp"), AlgorithmSpec("cbs-dl"), AlgorithmSpec("dbs"),
    AlgorithmSpec("ma-dbs", 0), AlgorithmSpec("ma-dbs", 10), AlgorithmSpec("ma-dbs", 100),
)


def solve(instance: Instance, alg: AlgorithmSpec, time_limit: Optional[float] = None,
          node_budget: Optional[int] = None, ilp_backend=None) -> SolveResult:
    if alg.name == "ilp":
        from .ilp_flow import solve_ilp_instance
        return solve_ilp_instance(instance, ilp_backend, time_limit)
    budget = Budget.wall_clock(time_limit, node_budget) if time_limit is not None else Budget(node_budget)
    if alg.name == "cbs-dl":
        return solve_cbs_dl(instance, budget=budget)
    if alg.name == "dbs":
        return solve_dbs(instance, budget=budget)
    if alg.name == "ma-dbs":
        return solve_ma_dbs(instance, alg.merge_threshold, budget=budget)
    raise ValueError(f"unknown algorithm {alg.name!r}")
