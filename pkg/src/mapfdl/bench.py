"""Random grid instances and a timed benchmark runner."""
from __future__ import annotations

import csv
import io
import logging
import math
import multiprocessing as mp
import random
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .core import Graph, Instance, validate_plan
from .solvers import AlgorithmSpec, solve

log = logging.getLogger(__name__)


class GenerationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    width: int
    height: int
    block_prob: float
    deadline: int
    n_agents: int
    distances: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.block_prob < 1:
            raise ValueError("blocked probability must be in [0, 1)")
        if not self.distances or max(self.distances) > self.deadline:
            raise ValueError("start-goal distances must be non-empty and <= deadline")


PRESETS = {
    "small": GeneratorConfig(40, 40, 0.2, 50, 10, (48, 49, 50)),
    "medium": GeneratorConfig(80, 80, 0.2, 100, 10, (98, 99, 100)),
    "large": GeneratorConfig(120, 120, 0.2, 150, 10, (148, 149, 150)),
    "tiny": GeneratorConfig(6, 6, 0.1, 8, 3, tuple(range(1, 9))),
    "desk-small": GeneratorConfig(20, 20, 0.2, 24, 5, (22, 23, 24)),
    "desk-large": GeneratorConfig(40, 40, 0.2, 48, 5, (46, 47, 48)),
}

MASK_ATTEMPTS = 50
AGENT_ATTEMPTS = 20000


def _bfs(graph: Graph, src: int) -> list[int]:
    dist = [-1] * graph.n_vertices
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in graph.neighbors[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def generate_instance(config: GeneratorConfig, name: Optional[str] = None) -> Instance:
    """Blocked cells i.i.d.; each agent's (start, goal) pair is uniform over pairs
    at an admissible distance, with starts distinct and goals distinct."""
    rng = random.Random(config.seed)
    wanted = set(config.distances)
    for _ in range(MASK_ATTEMPTS):
        rows = ["".join("@" if rng.random() < config.block_prob else "." for _ in range(config.width))
                for _ in range(config.height)]
        graph = Graph.from_grid(rows)
        if graph.n_vertices < 2 * config.n_agents:
            continue
        agents = _sample_agents(graph, config, wanted, rng)
        if agents is not None:
            return Instance(graph, tuple(agents), config.deadline,
                            name or f"{config.height}x{config.width}_m{config.n_agents}_s{config.seed}")
    raise GenerationFailed(f"could not place {config.n_agents} agents for {config}")


def _sample_agents(graph: Graph, config: GeneratorConfig, wanted: set, rng: random.Random):
    n = graph.n_vertices
    cache: dict[int, list[int]] = {}
    starts, goals, agents = set(), set(), []
    for _ in range(AGENT_ATTEMPTS):
        if len(agents) == config.n_agents:
            return agents
        s = rng.randrange(n)
        if s in starts:
            continue
        if s not in cache:
            d = _bfs(graph, s)
            cache[s] = [v for v in range(n) if d[v] in wanted]
        cands = [g for g in cache[s] if g not in goals]
        # accept s with probability |cands| / n so the pair is uniform
        if not cands or rng.random() * n >= len(cands):
            continue
        g = cands[rng.randrange(len(cands))]
        starts.add(s)
        goals.add(g)
        agents.append((s, g))
    return agents if len(agents) == config.n_agents else None


def generate_suite(config: GeneratorConfig, agent_counts: Iterable[int], per_count: int,
                   base_seed: int = 0) -> list[Instance]:
    suite = []
    for m in agent_counts:
        for k in range(per_count):
            seed = base_seed + 1000 * m + k
            suite.append(generate_instance(replace(config, n_agents=m, seed=seed)))
    return suite


# -- runner ------------------------------------------------------------------

CSV_FIELDS = ("instance", "algorithm", "params", "status", "cost", "wall_ms", "nodes_expanded")


@dataclass
class BenchRow:
    instance: str
    algorithm: str
    params: str
    status: str  # solved | timeout | skipped | invalid | error
    cost: Optional[int]
    wall_ms: float
    nodes_expanded: int
    n_agents: int

    def csv_record(self) -> list:
        return [self.instance, self.algorithm, self.params, self.status,
                "" if self.cost is None else self.cost, f"{self.wall_ms:.3f}", self.nodes_expanded]


@dataclass
class BenchResult:
    rows: list[BenchRow] = field(default_factory=list)
    time_limit: float = 60.0
    cost_mismatches: list[str] = field(default_factory=list)

    @property
    def algorithms(self) -> list[str]:
        return list(dict.fromkeys(r.algorithm for r in self.rows))

    @property
    def agent_counts(self) -> list[int]:
        return sorted({r.n_agents for r in self.rows})

    def _charged_seconds(self, r: BenchRow) -> float:
        return r.wall_ms / 1000 if r.status == "solved" else self.time_limit

    def success_rates(self) -> dict[tuple[str, int], float]:
        out = {}
        for alg in self.algorithms:
            for m in self.agent_counts:
                cell = [r for r in self.rows if r.algorithm == alg and r.n_agents == m]
                if cell:
                    out[(alg, m)] = sum(r.status == "solved" for r in cell) / len(cell)
        return out

    def mean_runtime_all(self) -> dict[tuple[str, int], float]:
        """Mean seconds over all instances, unsolved ones charged the full limit."""
        out = {}
        for alg in self.algorithms:
            for m in self.agent_counts:
                cell = [self._charged_seconds(r) for r in self.rows if r.algorithm == alg and r.n_agents == m]
                if cell:
                    out[(alg, m)] = sum(cell) / len(cell)
        return out

    def mean_runtime_solved_by_all(self) -> dict[int, tuple[int, dict[str, float]]]:
        """Per agent count: (number of instances solved by every algorithm, mean seconds per algorithm)."""
        by_inst = defaultdict(dict)
        for r in self.rows:
            by_inst[(r.n_agents, r.instance)][r.algorithm] = r
        algs = self.algorithms
        out = {}
        for m in self.agent_counts:
            common = [cells for (mm, _), cells in by_inst.items() if mm == m
                      and all(a in cells and cells[a].status == "solved" for a in algs)]
            if common:
                out[m] = (len(common), {a: sum(c[a].wall_ms for c in common) / 1000 / len(common) for a in algs})
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow(r.csv_record())
        return buf.getvalue()

    def aggregate_csvs(self) -> dict[str, str]:
        out = {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("algorithm", "agents", "success_rate"))
        for (alg, m), v in self.success_rates().items():
            w.writerow((alg, m, f"{v:.4f}"))
        out["success_rate"] = buf.getvalue()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("algorithm", "agents", "mean_seconds"))
        for (alg, m), v in self.mean_runtime_all().items():
            w.writerow((alg, m, f"{v:.4f}"))
        out["runtime_all"] = buf.getvalue()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("agents", "instances", "algorithm", "mean_seconds"))
        for m, (n, means) in self.mean_runtime_solved_by_all().items():
            for alg, v in means.items():
                w.writerow((m, n, alg, f"{v:.4f}"))
        out["runtime_solved_by_all"] = buf.getvalue()
        return out


def _run_cell(instance: Instance, alg: AlgorithmSpec, time_limit: float, ilp_backend=None):
    start = time.perf_counter()
    try:
        res = solve(instance, alg, time_limit=time_limit, ilp_backend=ilp_backend)
    except Exception as exc:  # recorded as a row, never propagated
        return "error", None, (time.perf_counter() - start) * 1000, 0, repr(exc)
    wall = (time.perf_counter() - start) * 1000
    if res.status != "solved":
        return "timeout", None, wall, res.nodes_expanded, ""
    plan = res.plan(instance)
    report = validate_plan(instance, plan)
    if not report.ok:
        return "invalid", plan.cost, wall, res.nodes_expanded, "; ".join(report.violations[:3])
    if wall > time_limit * 1000:
        return "timeout", None, wall, res.nodes_expanded, ""
    return "solved", plan.cost, wall, res.nodes_expanded, ""


def _cell_worker(conn, instance, alg, time_limit, ilp_backend):
    conn.send(_run_cell(instance, alg, time_limit, ilp_backend))
    conn.close()


def _run_isolated(instance, alg, time_limit, ilp_backend, grace: float = 2.0):
    """Run one cell in a child process; kill it if it overruns the limit."""
    ctx = mp.get_context("fork")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_cell_worker, args=(send, instance, alg, time_limit, ilp_backend), daemon=True)
    start = time.perf_counter()
    proc.start()
    send.close()
    ready = recv.poll(time_limit + grace)
    out = recv.recv() if ready else None
    if proc.is_alive():
        proc.kill()
    proc.join()
    if out is None:
        return "timeout", None, (time.perf_counter() - start) * 1000, 0, "watchdog"
    return out


def run_benchmark(suite: Sequence[Instance], algorithms: Sequence[AlgorithmSpec], time_limit: float = 60.0,
                  isolate: bool = True, ilp_backend=None, skip_rule: bool = True,
                  progress=None) -> BenchResult:
    """Run every (instance, algorithm) cell.

    With ``skip_rule`` an algorithm is not run for an agent count once it
    solved none of the instances of a smaller agent count.
    """
    result = BenchResult(time_limit=time_limit)
    if not algorithms:
        return result
    by_count = defaultdict(list)
    for inst in suite:
        by_count[inst.num_agents].append(inst)
    given_up: set[str] = set()
    for m in sorted(by_count):
        solved_any = defaultdict(bool)
        for inst in by_count[m]:
            costs = {}
            for alg in algorithms:
                if alg.label in given_up:
                    result.rows.append(BenchRow(inst.name, alg.label, alg.params, "skipped", None,
                                                time_limit * 1000, 0, m))
                    continue
                run = _run_isolated if isolate else _run_cell
                status, cost, wall, nodes, note = run(inst, alg, time_limit, ilp_backend)
                if status in ("invalid", "error"):
                    log.warning("%s on %s: %s %s", alg.label, inst.name, status, note)
                result.rows.append(BenchRow(inst.name, alg.label, alg.params, status, cost, wall, nodes, m))
                if status == "solved":
                    solved_any[alg.label] = True
                    costs[alg.label] = cost
                if progress is not None:
                    progress(result.rows[-1])
            if len(set(costs.values())) > 1:
                msg = f"{inst.name}: cost disagreement {costs}"
                log.error(msg)
                result.cost_mismatches.append(msg)
        if skip_rule:
            given_up.update(a.label for a in algorithms if not solved_any[a.label])
    return result


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else math.inf


def trend_summary(small: BenchResult, large: BenchResult, small_name: str = "desk-small",
                  large_name: str = "desk-large") -> str:
    """Directional comparison of two runs; for human review, never gating."""

    def common_means(res: BenchResult) -> dict[str, float]:
        totals, n = defaultdict(float), 0
        for _, (count, means) in res.mean_runtime_solved_by_all().items():
            for alg, v in means.items():
                totals[alg] += v * count
            n += count
        return {alg: v / n for alg, v in totals.items()} if n else {}

    lines = []
    s, l = common_means(small), common_means(large)
    lines.append(f"mean seconds over instances solved by all ({small_name}): "
                 + ", ".join(f"{a}={v:.4f}" for a, v in s.items()))
    lines.append(f"mean seconds over instances solved by all ({large_name}): "
                 + ", ".join(f"{a}={v:.4f}" for a, v in l.items()))

    def verdict(ok: Optional[bool]) -> str:
        return "n/a" if ok is None else ("holds" if ok else "does not hold")

    ok = None
    if {"ILP", "CBS-DL"} <= s.keys() & l.keys():
        rs, rl = _ratio(s["ILP"], s["CBS-DL"]), _ratio(l["ILP"], l["CBS-DL"])
        ok = rl > rs
        lines.append(f"ILP/CBS-DL runtime ratio {small_name}={rs:.2f} {large_name}={rl:.2f}")
    lines.append(f"claim: ILP relative runtime degrades as the deadline grows -> {verdict(ok)}")

    def closer(res: dict, alg: str, to: str, other: str) -> Optional[bool]:
        if not {alg, to, other} <= res.keys() or min(res[alg], res[to], res[other]) <= 0:
            return None
        return abs(math.log(res[alg] / res[to])) <= abs(math.log(res[alg] / res[other]))

    for name, res in ((small_name, s), (large_name, l)):
        lines.append(f"claim ({name}): MA-DBS(0) tracks DBS -> {verdict(closer(res, 'MA-DBS(0)', 'DBS', 'CBS-DL'))}")
        for b in ("10", "100"):
            lines.append(f"claim ({name}): MA-DBS({b}) tracks CBS-DL -> "
                         f"{verdict(closer(res, f'MA-DBS({b})', 'CBS-DL', 'DBS'))}")
    for name, res in ((small_name, small), (large_name, large)):
        rates = res.success_rates()
        lines.append(f"success rates ({name}): "
                     + ", ".join(f"{a}@{m}={v:.2f}" for (a, m), v in sorted(rates.items())))
    return "\n".join(lines) + "\n"
