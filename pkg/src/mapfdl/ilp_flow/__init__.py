"""MAPF-DL as a maximum integer multi-commodity flow on a time-expanded network."""
from __future__ import annotations

import time
from typing import Optional

from ..core import Instance
from ..search import SolveResult
from .model import IlpModel, Row, build_ilp, export_model, parse_lp
from .network import FlowNetwork, ReducedNetwork, build_network, reduce_network
from .solve import (BACKEND_ERROR, INFEASIBLE, OPTIMAL, TIME_LIMIT, BranchAndBoundBackend, CommandBackend,
                    IlpSolution, PlanDecodeError, ScipyBackend, backend_from_config, extract_plan, solve_ilp)

__all__ = [
    "FlowNetwork", "ReducedNetwork", "IlpModel", "Row", "IlpSolution", "PlanDecodeError",
    "ScipyBackend", "CommandBackend", "BranchAndBoundBackend", "backend_from_config",
    "build_network", "reduce_network", "build_ilp", "export_model", "parse_lp", "solve_ilp",
    "extract_plan", "solve_ilp_instance", "OPTIMAL", "INFEASIBLE", "TIME_LIMIT", "BACKEND_ERROR",
]


def solve_ilp_instance(instance: Instance, backend=None, time_limit: Optional[float] = None,
                       prune: bool = True) -> SolveResult:
    """Build, solve and decode in one go; ``time_limit`` covers model building too."""
    start = time.monotonic()
    reduced = reduce_network(build_network(instance), instance, prune=prune)
    model = build_ilp(reduced)
    remaining = None if time_limit is None else time_limit - (time.monotonic() - start)
    if remaining is not None and remaining <= 0:
        return SolveResult("budget_exhausted")
    sol = solve_ilp(model, backend, remaining)
    info = {"n_vars": model.n_vars, "n_rows": len(model.rows), "ilp_status": sol.status}
    if sol.status == TIME_LIMIT:
        return SolveResult("budget_exhausted", info=info)
    if sol.status != OPTIMAL:
        raise RuntimeError(f"ILP backend failed: {sol.status} {sol.message}")
    plan = extract_plan(sol, reduced, instance, model)
    return SolveResult("solved", dict(enumerate(plan.paths)), info=info)
