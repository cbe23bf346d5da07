"""Optimal solvers for multi-agent path finding with deadlines."""
from .cbs_dl import solve_cbs_dl
from .core import (Collision, Constraint, Graph, Instance, InstanceError, Plan, bfs_distances,
                   find_first_collision, format_instance, format_plan, load_instance, parse_instance,
                   parse_plan, plan_cost, validate_plan)
from .dbs import check_consistent, solve_dbs
from .lowlevel import constrained_path
from .ma_dbs import solve_ma_dbs
from .search import Budget, SolveResult

__version__ = "0.1.0"

__all__ = [
    "Collision", "Constraint", "Graph", "Instance", "InstanceError", "Plan", "Budget", "SolveResult",
    "bfs_distances", "find_first_collision", "format_instance", "format_plan", "load_instance",
    "parse_instance", "parse_plan", "plan_cost", "validate_plan", "constrained_path",
    "solve_cbs_dl", "check_consistent", "solve_dbs", "solve_ma_dbs",
]
