"""Deadline-bounded space-time search for a single agent."""
from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence

from .core import Constraint, Instance, Path


class ConstraintIndex:
    """Membership lookup for vertex and edge constraints, keyed by agent."""

    def __init__(self, constraints: Iterable[Constraint] = ()):
        self.vertex: set[tuple[int, int, int]] = set()
        self.edge: set[tuple[int, int, int, int]] = set()
        for c in constraints:
            if c.kind == "vertex":
                self.vertex.add((c.agent, c.loc[0], c.t))
            else:
                self.edge.add((c.agent, c.loc[0], c.loc[1], c.t))

    def forbids_vertex(self, agent: int, v: int, t: int) -> bool:
        return (agent, v, t) in self.vertex

    def forbids_edge(self, agent: int, u: int, v: int, t: int) -> bool:
        return (agent, u, v, t) in self.edge


def constrained_path(instance: Instance, agent: int,
                     constraints: "Iterable[Constraint] | ConstraintIndex",
                     goal_distances: Optional[Sequence] = None,
                     prune: bool = True) -> Optional[Path]:
    """Path for ``agent`` ending at its goal exactly at the deadline, or None.

    A* over (vertex, t) states with f = t + dist-to-goal, ties broken towards
    larger t and then smaller vertex id. States that cannot reach the goal by
    the deadline are never generated. ``prune=False`` disables that cut and
    exists only for differential testing.
    """
    T = instance.deadline
    s, g = instance.agents[agent]
    h = goal_distances if goal_distances is not None else instance.goal_distances(agent)
    nbrs = instance.graph.neighbors
    if not isinstance(constraints, ConstraintIndex):
        constraints = ConstraintIndex(c for c in constraints if c.agent == agent)
    vcons = constraints.vertex
    econs = constraints.edge

    if h[s] > T or (agent, s, 0) in vcons:
        return None
    parent = {(s, 0): -1}
    open_list = [(h[s] if prune else 0, 0, s)]
    while open_list:
        _, negt, v = heapq.heappop(open_list)
        t = -negt
        if t == T:
            if v != g:
                continue
            path = [v]
            while t > 0:
                v = parent[(v, t)]
                t -= 1
                path.append(v)
            return tuple(reversed(path))
        nt = t + 1
        for w in (v, *nbrs[v]):
            if (w, nt) in parent:
                continue
            hw = h[w]
            if prune and nt + hw > T:
                continue
            if (agent, w, nt) in vcons or (agent, v, w, t) in econs:
                continue
            parent[(w, nt)] = v
            f = nt + hw if prune else 0
            heapq.heappush(open_list, (f, -nt, w))
    return None
