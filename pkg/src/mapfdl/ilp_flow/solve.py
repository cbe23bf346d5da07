"""ILP backends and plan extraction."""
from __future__ import annotations

import logging
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from ..core import Instance, Plan
from .model import IlpModel, export_model
from .network import ENTRY, EXIT, MIDDLE, VERTEX, WAIT, ReducedNetwork

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time_limit"
BACKEND_ERROR = "backend_error"


@dataclass
class IlpSolution:
    status: str
    values: list[int] = field(default_factory=list)
    objective: Optional[float] = None
    message: str = ""


class ScipyBackend:
    """In-process HiGHS through scipy.optimize.milp."""

    name = "scipy"

    def solve(self, model: IlpModel, time_limit: Optional[float]) -> IlpSolution:
        n = model.n_vars
        c = np.zeros(n)
        for k, coef in model.objective.items():
            c[k] = -coef
        constraints = []
        if model.rows:
            data, rows, cols = [], [], []
            lb = np.empty(len(model.rows))
            ub = np.empty(len(model.rows))
            for r, row in enumerate(model.rows):
                for k, coef in row.terms:
                    rows.append(r)
                    cols.append(k)
                    data.append(coef)
                lb[r] = row.rhs if row.sense in ("=", ">=") else -np.inf
                ub[r] = row.rhs if row.sense in ("=", "<=") else np.inf
            A = csr_matrix((data, (rows, cols)), shape=(len(model.rows), n))
            constraints.append(LinearConstraint(A, lb, ub))
        options = {"disp": False}
        if time_limit is not None:
            options["time_limit"] = max(float(time_limit), 0.01)
        res = milp(c, constraints=constraints, integrality=np.ones(n), bounds=Bounds(0, 1), options=options)
        if res.status == 0:
            return IlpSolution(OPTIMAL, [int(round(x)) for x in res.x], -res.fun, res.message)
        if res.status == 2:
            return IlpSolution(INFEASIBLE, message=res.message)
        if res.status == 1:
            return IlpSolution(TIME_LIMIT, message=res.message)
        return IlpSolution(BACKEND_ERROR, message=res.message)


def read_cbc_solution(text: str, model: IlpModel) -> IlpSolution:
    """Parse a CBC-style solution file (status line, then ``index name value``)."""
    lines = text.splitlines()
    if not lines:
        return IlpSolution(BACKEND_ERROR, message="empty solution file")
    head = lines[0].strip().lower()
    if head.startswith("optimal"):
        status = OPTIMAL
    elif "infeasible" in head:
        return IlpSolution(INFEASIBLE, message=lines[0])
    elif "stopped" in head or "time" in head:
        return IlpSolution(TIME_LIMIT, message=lines[0])
    else:
        return IlpSolution(BACKEND_ERROR, message=lines[0])
    index = {name: k for k, name in enumerate(model.var_names)}
    values = [0] * model.n_vars
    for ln in lines[1:]:
        parts = ln.split()
        if parts and parts[0] == "**":
            parts = parts[1:]
        if len(parts) < 3:
            continue
        name, value = parts[1], float(parts[2])
        if name not in index:
            return IlpSolution(BACKEND_ERROR, message=f"unknown variable {name} in solution")
        values[index[name]] = int(round(value))
    return IlpSolution(status, values, model.objective_value(values), lines[0])


def write_cbc_solution(solution: IlpSolution, model: IlpModel) -> str:
    head = {OPTIMAL: "Optimal", INFEASIBLE: "Infeasible", TIME_LIMIT: "Stopped on time"}.get(
        solution.status, "Error")
    obj = solution.objective if solution.objective is not None else 0.0
    out = [f"{head} - objective value {obj:.8f}"]
    for k, x in enumerate(solution.values):
        if x:
            out.append(f"{k:7d} {model.var_names[k]:<24} {x:>12} {0:>12}")
    return "\n".join(out) + "\n"


class CommandBackend:
    """External solver run as a process on the exported LP file.

    ``template`` holds ``{model}`` and ``{solution}`` placeholders (and an
    optional ``{time_limit}``); the solver must write a CBC-style solution
    file, e.g. ``cbc {model} sec {time_limit} solve solu {solution}``.
    """

    name = "command"

    def __init__(self, template: str):
        if "{model}" not in template or "{solution}" not in template:
            raise ValueError("command template needs {model} and {solution} placeholders")
        self.template = template

    def solve(self, model: IlpModel, time_limit: Optional[float]) -> IlpSolution:
        with tempfile.TemporaryDirectory(prefix="mapfdl-") as tmp:
            model_path = FsPath(tmp) / "model.lp"
            sol_path = FsPath(tmp) / "model.sol"
            model_path.write_text(export_model(model), encoding="utf-8")
            limit = time_limit if time_limit is not None else 1e9
            cmd = self.template.format(model=shlex.quote(str(model_path)),
                                       solution=shlex.quote(str(sol_path)),
                                       time_limit=f"{limit:g}")
            try:
                proc = subprocess.run(cmd, shell=True, capture_output=True, text=True,
                                      timeout=None if time_limit is None else time_limit + 5)
            except subprocess.TimeoutExpired:
                return IlpSolution(TIME_LIMIT, message="solver process timed out")
            if not sol_path.exists():
                return IlpSolution(BACKEND_ERROR, message=f"exit {proc.returncode}: {proc.stderr.strip()[-500:]}")
            return read_cbc_solution(sol_path.read_text(), model)


class BranchAndBoundBackend:
    """Built-in exact fallback working on the success indicators only.

    Agents are decided one at a time (include first). A branch is cut when
    the aggregated single-commodity max flow over the still-possible agents
    cannot beat the incumbent; the set of included agents must stay
    consistent (zero-cost solvable), checked by the death-based search
    machinery. The winning plan is written back as arc flows.
    """

    name = "bnb"

    def solve(self, model: IlpModel, time_limit: Optional[float]) -> IlpSolution:
        from ..dbs import ConsistencyCache, check_consistent
        from ..search import Budget, BudgetExhausted

        red = model.reduced
        if red is None:
            return IlpSolution(BACKEND_ERROR, message="branch and bound needs the flow network")
        inst = red.instance
        M = inst.num_agents
        budget = Budget.wall_clock(time_limit) if time_limit is not None else Budget()
        cache = ConsistencyCache()
        best: dict = {"n": -1, "paths": {}}

        def search(k: int, included: tuple, paths: dict, excluded: frozenset):
            budget.check_clock()
            if len(included) > best["n"]:
                best["n"], best["paths"] = len(included), paths
            if k == M:
                return
            candidates = [a for a in range(M) if a not in excluded]
            if _flow_bound(red, candidates) <= best["n"]:
                return
            group = included + (k,)
            sub = check_consistent(inst, group, (), cache, budget)
            if sub is not None:
                search(k + 1, group, sub, excluded)
            search(k + 1, included, paths, excluded | {k})

        try:
            search(0, (), {}, frozenset())
        except BudgetExhausted:
            return IlpSolution(TIME_LIMIT, message="branch and bound ran out of time")
        values = paths_to_values(model, best["paths"])
        return IlpSolution(OPTIMAL, values, model.objective_value(values), "branch and bound")


def _flow_bound(red: ReducedNetwork, agents) -> int:
    """Max flow from all listed sources to all listed sinks, commodities merged."""
    import networkx as nx

    net = red.network
    g = nx.DiGraph()
    arcs = set()
    for i in agents:
        arcs.update(red.admissible_arcs[i])
    for k in arcs:
        arc = net.arc(k)
        g.add_edge(arc.tail, arc.head, capacity=1)
    if not agents:
        return 0
    for i in agents:
        src, snk = red.source(i), red.sink(i)
        prev = g.get_edge_data("S", src, {"capacity": 0})["capacity"]
        g.add_edge("S", src, capacity=prev + 1)
        prev = g.get_edge_data(snk, "D", {"capacity": 0})["capacity"]
        g.add_edge(snk, "D", capacity=prev + 1)
    return int(nx.maximum_flow_value(g, "S", "D"))


def paths_to_values(model: IlpModel, paths: dict) -> list[int]:
    """Encode successful agents' paths as a 0/1 assignment of the model."""
    red = model.reduced
    net = red.network
    edge_index = {}
    for e, (u, v) in enumerate(net.edges):
        edge_index[(u, v)] = (e, 0, 1)
        edge_index[(v, u)] = (e, 1, 0)
    values = [0] * model.n_vars
    for i, path in paths.items():
        if path is None:
            continue
        values[model.y_index[i]] = 1
        arcs = [net.vertex_arc(path[0], 0)]
        for t in range(len(path) - 1):
            u, v = path[t], path[t + 1]
            if u == v:
                arcs.append(net.wait_arc(u, t))
            else:
                e, ju, jv = edge_index[(u, v)]
                base = net.gadget_arc(e, t)
                arcs += [base + ju, base + 2, base + 3 + jv]
            arcs.append(net.vertex_arc(v, t + 1))
        for k in arcs:
            values[model.x_index[(i, k)]] = 1
    return values


BACKENDS = {"scipy": ScipyBackend, "bnb": BranchAndBoundBackend}


def backend_from_config(name: Optional[str] = None, command: Optional[str] = None):
    """Pick a backend; MAPFDL_ILP_COMMAND overrides everything with a command backend."""
    command = os.environ.get("MAPFDL_ILP_COMMAND") or command
    if command:
        return CommandBackend(command)
    name = name or "scipy"
    if name == "command":
        raise ValueError("command backend needs a command template")
    if name not in BACKENDS:
        raise ValueError(f"unknown ILP backend {name!r}")
    return BACKENDS[name]()


def solve_ilp(model: IlpModel, backend=None, time_limit: Optional[float] = None) -> IlpSolution:
    backend = backend or ScipyBackend()
    start = time.monotonic()
    try:
        sol = backend.solve(model, time_limit)
    except (OSError, ValueError, subprocess.SubprocessError) as exc:
        return IlpSolution(BACKEND_ERROR, message=str(exc))
    log.debug("backend %s: %s in %.3fs", backend.name, sol.status, time.monotonic() - start)
    if sol.status == OPTIMAL:
        if len(sol.values) != model.n_vars:
            return IlpSolution(BACKEND_ERROR, message="assignment has wrong length")
        bad = model.violations(sol.values)
        if bad:
            return IlpSolution(BACKEND_ERROR, sol.values, sol.objective,
                               f"assignment violates {len(bad)} rows, e.g. {bad[:3]}")
        sol.objective = model.objective_value(sol.values)
    return sol


class PlanDecodeError(RuntimeError):
    pass


def extract_plan(solution: IlpSolution, reduced: ReducedNetwork, instance: Instance,
                 model: IlpModel) -> Plan:
    """Walk each successful commodity's unit flow from source to sink."""
    if solution.status != OPTIMAL:
        raise ValueError("can only decode optimal solutions")
    net = reduced.network
    T = instance.deadline
    paths = {}
    for i in range(instance.num_agents):
        if not solution.values[model.y_index[i]]:
            continue
        used: dict[int, list] = {}
        for k in reduced.admissible_arcs[i]:
            if solution.values[model.x_index[(i, k)]]:
                arc = net.arc(k)
                used.setdefault(arc.tail, []).append(arc)

        def step(node):
            nxt = used.get(node, [])
            if len(nxt) != 1:
                raise PlanDecodeError(f"commodity {i}: {len(nxt)} flow arcs leave node {node}")
            return nxt[0]

        node = reduced.source(i)
        path = []
        for t in range(T + 1):
            arc = step(node)
            if arc.kind != VERTEX:
                raise PlanDecodeError(f"commodity {i}: expected vertex arc at t={t}")
            v, _, _ = net.node_vertex_time(node)
            path.append(v)
            node = arc.head
            if t == T:
                break
            arc = step(node)
            if arc.kind == WAIT:
                node = arc.head
            elif arc.kind == ENTRY:
                mid = step(arc.head)
                assert mid.kind == MIDDLE
                out = step(mid.head)
                assert out.kind == EXIT
                node = out.head
            else:
                raise PlanDecodeError(f"commodity {i}: unexpected {arc.kind} arc")
        if node != reduced.sink(i):
            raise PlanDecodeError(f"commodity {i}: flow does not end at the sink")
        paths[i] = tuple(path)
    return Plan.from_mapping(instance.num_agents, paths)
