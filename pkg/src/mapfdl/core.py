"""Problem representation shared by every solver.

Vertices are integer ids. Grid maps number their free cells in row-major
order and keep the (row, col) of every vertex for I/O.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Optional, Sequence

UNREACHABLE = math.inf

Path = tuple[int, ...]


class InstanceError(ValueError):
    """Raised for malformed or invalid instance and plan files."""


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    height: Optional[int] = None
    width: Optional[int] = None
    blocked: Optional[tuple[str, ...]] = field(default=None, repr=False)
    cells: Optional[tuple[tuple[int, int], ...]] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        norm = set()
        for u, v in edges:
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise InstanceError(f"edge ({u}, {v}) references unknown vertex")
            if u == v:
                raise InstanceError(f"self-loop on vertex {u}")
            norm.add((min(u, v), max(u, v)))
        nbrs: list[list[int]] = [[] for _ in range(n_vertices)]
        for u, v in norm:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return cls(n_vertices, tuple(sorted(norm)), tuple(tuple(sorted(n)) for n in nbrs))

    @classmethod
    def from_grid(cls, rows: Sequence[str]) -> "Graph":
        """4-neighbor grid; '.' is free and '@' is blocked."""
        height = len(rows)
        width = len(rows[0]) if rows else 0
        cells = []
        index = {}
        for r, row in enumerate(rows):
            if len(row) != width:
                raise InstanceError(f"map row {r} has length {len(row)}, expected {width}")
            for c, ch in enumerate(row):
                if ch == ".":
                    index[(r, c)] = len(cells)
                    cells.append((r, c))
                elif ch != "@":
                    raise InstanceError(f"unknown map character {ch!r} at row {r}")
        edges = []
        for (r, c), v in index.items():
            for nb in ((r + 1, c), (r, c + 1)):
                if nb in index:
                    edges.append((v, index[nb]))
        g = cls.from_edges(len(cells), edges)
        return cls(g.n_vertices, g.edges, g.neighbors, height, width, tuple(rows), tuple(cells))

    @property
    def is_grid(self) -> bool:
        return self.cells is not None

    def cell_index(self) -> dict[tuple[int, int], int]:
        return {cell: v for v, cell in enumerate(self.cells or ())}

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def label(self, v: int) -> str:
        if self.cells is not None:
            r, c = self.cells[v]
            return f"{r},{c}"
        return str(v)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    agents: tuple[tuple[int, int], ...]
    deadline: int
    name: str = "instance"
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.agents:
            raise InstanceError("instance needs at least one agent")
        if self.deadline < 0:
            raise InstanceError("deadline must be non-negative")
        n = self.graph.n_vertices
        for i, (s, g) in enumerate(self.agents):
            if not (0 <= s < n and 0 <= g < n):
                raise InstanceError(f"agent {i}: unknown vertex")
            if self.goal_distances(i)[s] > self.deadline:
                raise InstanceError(f"agent {i}: agent unreachable within deadline")

    @property
    def num_agents(self) -> int:
        return len(self.agents)

    def start(self, i: int) -> int:
        return self.agents[i][0]

    def goal(self, i: int) -> int:
        return self.agents[i][1]

    def distances_from(self, v: int) -> list:
        key = ("bfs", v)
        if key not in self._cache:
            self._cache[key] = bfs_distances(self.graph, v)
        return self._cache[key]

    def goal_distances(self, i: int) -> list:
        return self.distances_from(self.agents[i][1])

    def start_distances(self, i: int) -> list:
        return self.distances_from(self.agents[i][0])

    def with_deadline(self, deadline: int) -> "Instance":
        return Instance(self.graph, self.agents, deadline, self.name)


def bfs_distances(graph: Graph, source: int) -> list:
    """Unweighted shortest-path distances; UNREACHABLE (inf) where no path exists."""
    dist = [UNREACHABLE] * graph.n_vertices
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in graph.neighbors[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


@dataclass(frozen=True, order=True)
class Collision:
    """Ordered as (t, vertex-before-edge, i, j, location)."""

    t: int
    rank: int  # 0 vertex, 1 edge
    i: int
    j: int
    loc: tuple[int, ...]

    @property
    def kind(self) -> str:
        return "vertex" if self.rank == 0 else "edge"

    @classmethod
    def vertex(cls, i: int, j: int, v: int, t: int) -> "Collision":
        return cls(t, 0, i, j, (v,))

    @classmethod
    def edge(cls, i: int, j: int, u: int, v: int, t: int) -> "Collision":
        # u is where agent i stands at t (and j at t + 1)
        return cls(t, 1, i, j, (u, v))

    def __str__(self):
        where = "/".join(map(str, self.loc))
        return f"{self.kind} collision a{self.i} a{self.j} at {where} t={self.t}"


@dataclass(frozen=True)
class Constraint:
    kind: Literal["vertex", "edge"]
    agent: int
    loc: tuple[int, ...]
    t: int
    spawned_from: frozenset = frozenset()

    @property
    def key(self) -> tuple:
        return (self.agent, self.kind, self.loc, self.t)

    def violated_by(self, path: Optional[Path]) -> bool:
        if path is None:
            return False
        if self.kind == "vertex":
            return path[self.t] == self.loc[0]
        u, v = self.loc
        return path[self.t] == u and path[self.t + 1] == v


def constraints_for_collision(c: Collision) -> tuple[Constraint, Constraint]:
    """The two branching constraints, agent i first."""
    pair = frozenset((c.i, c.j))
    if c.rank == 0:
        v = c.loc[0]
        return (Constraint("vertex", c.i, (v,), c.t, pair),
                Constraint("vertex", c.j, (v,), c.t, pair))
    u, v = c.loc
    return (Constraint("edge", c.i, (u, v), c.t, pair),
            Constraint("edge", c.j, (v, u), c.t, pair))


@dataclass(frozen=True)
class Plan:
    """One optional path per agent; None marks an unsuccessful agent."""

    paths: tuple[Optional[Path], ...]

    @classmethod
    def from_mapping(cls, num_agents: int, paths: Mapping[int, Optional[Path]]) -> "Plan":
        return cls(tuple(paths.get(i) for i in range(num_agents)))

    @property
    def num_agents(self) -> int:
        return len(self.paths)

    @property
    def cost(self) -> int:
        return sum(p is None for p in self.paths)

    @property
    def num_successful(self) -> int:
        return self.num_agents - self.cost


def plan_cost(plan: Plan) -> int:
    return plan.cost


def scan_collisions(paths: Sequence[Optional[Path]], ids: Sequence[int], horizon: int,
                    first_only: bool = False) -> tuple[Optional[Collision], int]:
    """Return (first collision, number of collisions) among the given paths.

    ``ids`` maps positions in ``paths`` to agent ids. With ``first_only`` the
    scan stops at the earliest time step holding a collision and the count is
    only partial.
    """
    live = [(a, p) for a, p in zip(ids, paths) if p is not None]
    live.sort()
    first = None
    count = 0
    for t in range(horizon + 1):
        at: dict[int, list[int]] = {}
        for a, p in live:
            at.setdefault(p[t], []).append(a)
        for v, occ in at.items():
            if len(occ) > 1:
                count += len(occ) * (len(occ) - 1) // 2
                cand = Collision.vertex(occ[0], occ[1], v, t)
                if first is None or cand < first:
                    first = cand
        if t < horizon:
            moves = {}
            for a, p in live:
                if p[t] != p[t + 1]:
                    moves[(p[t], p[t + 1])] = a
            for (u, v), a in moves.items():
                b = moves.get((v, u))
                if b is not None and a < b:
                    count += 1
                    cand = Collision.edge(a, b, u, v, t)
                    if first is None or cand < first:
                        first = cand
        if first_only and first is not None:
            break
    return first, count


def all_collisions(instance: Instance, plan: Plan) -> list[Collision]:
    live = [(a, p) for a, p in enumerate(plan.paths) if p is not None]
    out = []
    T = instance.deadline
    for x in range(len(live)):
        a, p = live[x]
        for y in range(x + 1, len(live)):
            b, q = live[y]
            for t in range(T + 1):
                if p[t] == q[t]:
                    out.append(Collision.vertex(a, b, p[t], t))
                if t < T and p[t] == q[t + 1] and q[t] == p[t + 1] and p[t] != p[t + 1]:
                    out.append(Collision.edge(a, b, p[t], q[t], t))
    out.sort()
    return out


def find_first_collision(instance: Instance, plan: Plan) -> Optional[Collision]:
    first, _ = scan_collisions(plan.paths, range(plan.num_agents), instance.deadline, first_only=True)
    return first


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    collisions: list[Collision] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def path_violations(instance: Instance, agent: int, path: Path) -> list[str]:
    out = []
    T = instance.deadline
    s, g = instance.agents[agent]
    if len(path) != T + 1:
        return [f"agent {agent}: path length {len(path)}, expected {T + 1}"]
    if any(not (0 <= v < instance.graph.n_vertices) for v in path):
        return [f"agent {agent}: unknown vertex in path"]
    if path[0] != s:
        out.append(f"agent {agent}: path starts at {path[0]}, expected {s}")
    if path[T] != g:
        out.append(f"agent {agent}: path ends at {path[T]}, expected {g}")
    for t in range(T):
        u, v = path[t], path[t + 1]
        if u != v and not instance.graph.adjacent(u, v):
            out.append(f"agent {agent}: illegal move {u}->{v} at t={t}")
    return out


def validate_plan(instance: Instance, plan: Plan) -> ValidationReport:
    report = ValidationReport()
    if plan.num_agents != instance.num_agents:
        report.violations.append(f"plan has {plan.num_agents} agents, instance has {instance.num_agents}")
        return report
    well_formed = True
    for a, p in enumerate(plan.paths):
        if p is not None:
            errs = path_violations(instance, a, p)
            report.violations.extend(errs)
            well_formed &= not any("length" in e or "unknown" in e for e in errs)
    if well_formed:
        report.collisions = all_collisions(instance, plan)
        report.violations.extend(str(c) for c in report.collisions)
    return report


# -- file formats -----------------------------------------------------------

def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_instance(text: str, name: str = "instance") -> Instance:
    lines = _lines(text)
    pos = 0

    def take(expected: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise InstanceError(f"unexpected end of file, expected '{expected}'")
        parts = lines[pos].split()
        if parts[0] != expected:
            raise InstanceError(f"line {pos + 1}: expected '{expected}', got {lines[pos]!r}")
        pos += 1
        return parts[1:]

    def ints(parts: list[str], n: int, what: str) -> list[int]:
        if len(parts) != n:
            raise InstanceError(f"{what}: expected {n} integers, got {parts}")
        try:
            return [int(x) for x in parts]
        except ValueError:
            raise InstanceError(f"{what}: expected integers, got {parts}") from None

    if take("mapfdl") != ["1"]:
        raise InstanceError("unsupported format version")
    (deadline,) = ints(take("deadline"), 1, "deadline")
    if pos >= len(lines):
        raise InstanceError("missing map or graph section")
    head = lines[pos].split()[0]
    if head == "map":
        height, width = ints(take("map"), 2, "map")
        rows = lines[pos:pos + height]
        if len(rows) != height:
            raise InstanceError("map truncated")
        pos += height
        graph = Graph.from_grid(rows)
        if graph.width != width:
            raise InstanceError(f"map width {graph.width} does not match header {width}")
    elif head == "graph":
        nv, ne = ints(take("graph"), 2, "graph")
        edges = [tuple(ints(lines[pos + k].split(), 2, "edge")) for k in range(ne)]
        if len(edges) != ne or pos + ne > len(lines):
            raise InstanceError("edge list truncated")
        pos += ne
        graph = Graph.from_edges(nv, edges)
    else:
        raise InstanceError(f"expected 'map' or 'graph', got {head!r}")
    (m,) = ints(take("agents"), 1, "agents")
    if pos + m > len(lines):
        raise InstanceError("agent list truncated")
    agents = []
    index = graph.cell_index() if graph.is_grid else None
    for k in range(m):
        parts = lines[pos + k].split()
        if index is not None:
            sr, sc, gr, gc = ints(parts, 4, f"agent {k}")
            try:
                agents.append((index[(sr, sc)], index[(gr, gc)]))
            except KeyError:
                raise InstanceError(f"agent {k}: unknown vertex (blocked or off-map cell)") from None
        else:
            s, g = ints(parts, 2, f"agent {k}")
            agents.append((s, g))
    pos += m
    if pos != len(lines):
        raise InstanceError(f"trailing content at line {pos + 1}")
    return Instance(graph, tuple(agents), deadline, name)


def load_instance(path) -> Instance:
    from pathlib import Path as _P
    p = _P(path)
    return parse_instance(p.read_text(encoding="utf-8"), name=p.stem)


def format_instance(instance: Instance) -> str:
    g = instance.graph
    out = ["mapfdl 1", f"deadline {instance.deadline}"]
    if g.is_grid:
        out.append(f"map {g.height} {g.width}")
        out.extend(g.blocked)
        out.append(f"agents {instance.num_agents}")
        for s, t in instance.agents:
            (sr, sc), (gr, gc) = g.cells[s], g.cells[t]
            out.append(f"{sr} {sc} {gr} {gc}")
    else:
        out.append(f"graph {g.n_vertices} {len(g.edges)}")
        out.extend(f"{u} {v}" for u, v in g.edges)
        out.append(f"agents {instance.num_agents}")
        out.extend(f"{s} {t}" for s, t in instance.agents)
    return "\n".join(out) + "\n"


def format_plan(instance: Instance, plan: Plan) -> str:
    out = [f"plan {plan.num_agents} {instance.deadline} {plan.cost}"]
    for a, p in enumerate(plan.paths):
        if p is None:
            out.append(f"dead {a}")
        else:
            out.append(f"path {a} " + " ".join(instance.graph.label(v) for v in p))
    return "\n".join(out) + "\n"


def parse_plan(text: str, instance: Instance) -> Plan:
    lines = _lines(text)
    if not lines or lines[0].split()[0] != "plan":
        raise InstanceError("plan file must start with 'plan'")
    try:
        m, _deadline, _cost = (int(x) for x in lines[0].split()[1:4])
    except ValueError:
        raise InstanceError("bad plan header") from None
    index = instance.graph.cell_index() if instance.graph.is_grid else None
    paths: dict[int, Optional[Path]] = {}
    for ln in lines[1:]:
        parts = ln.split()
        try:
            a = int(parts[1])
            if parts[0] == "dead":
                paths[a] = None
            elif parts[0] == "path":
                if index is not None:
                    path = tuple(index[tuple(int(x) for x in tok.split(","))] for tok in parts[2:])
                else:
                    path = tuple(int(tok) for tok in parts[2:])
                paths[a] = path
            else:
                raise InstanceError(f"unknown plan line {ln!r}")
        except (IndexError, ValueError, KeyError):
            raise InstanceError(f"malformed plan line {ln!r}") from None
    if sorted(paths) != list(range(m)):
        raise InstanceError("plan must list every agent exactly once")
    return Plan.from_mapping(m, paths)
