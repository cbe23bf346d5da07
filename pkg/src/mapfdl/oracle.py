"""Exhaustive optimal solver for tiny instances.

Deliberately shares no search or collision code with the real solvers: it
walks joint configurations over time and filters collisions itself.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Iterable

from .core import Instance

MAX_SUBSET = 5
MAX_VERTICES = 64
MAX_DEADLINE = 16
MAX_STATES = 5_000_000  # joint states explored per call


class OracleTooLarge(ValueError):
    pass


def _dist_to(instance: Instance, target: int) -> dict[int, int]:
    adj = instance.graph.neighbors
    dist = {target: 0}
    todo = deque([target])
    while todo:
        u = todo.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                todo.append(w)
    return dist


def _check_size(instance: Instance, k: int) -> None:
    if k > MAX_SUBSET or instance.graph.n_vertices > MAX_VERTICES or instance.deadline > MAX_DEADLINE:
        raise OracleTooLarge(
            f"oracle limited to {MAX_SUBSET} agents, {MAX_VERTICES} vertices, deadline {MAX_DEADLINE}")


def subset_feasible(instance: Instance, subset: Iterable[int]) -> bool:
    """True iff all agents in ``subset`` can be at their goals at the deadline without colliding.

    Depth-first over joint configurations with a memo of dead (t, positions)
    pairs. Moves are assigned one agent at a time so vertex and swap
    collisions are filtered before the full joint move is built.
    """
    members = sorted(set(subset))
    if not members:
        return True
    _check_size(instance, len(members))
    T = instance.deadline
    adj = instance.graph.neighbors
    starts = tuple(instance.agents[a][0] for a in members)
    goals = tuple(instance.agents[a][1] for a in members)
    if len(set(starts)) < len(starts) or len(set(goals)) < len(goals):
        return False
    to_goal = [_dist_to(instance, g) for g in goals]
    if any(to_goal[k].get(v, T + 1) > T for k, v in enumerate(starts)):
        return False
    n = len(members)
    # per agent: moves out of v, goal-closest first
    moves = [{v: sorted((v,) + adj[v], key=lambda w, d=d: (d.get(w, T + 1), w)) for v in d} for d in to_goal]
    dead: set = set()
    explored = 0

    def extend(pos, t, k, new):
        if k == n:
            return feasible(tuple(new), t + 1)
        d = to_goal[k]
        left = T - t - 1
        here = pos[k]
        for w in moves[k][here]:
            if d.get(w, T + 1) > left:
                break
            clash = False
            for x in range(k):
                # same vertex, or agent x and k trade places
                if new[x] == w or (new[x] == here and pos[x] == w):
                    clash = True
                    break
            if clash:
                continue
            new.append(w)
            if extend(pos, t, k + 1, new):
                return True
            new.pop()
        return False

    def feasible(pos, t):
        nonlocal explored
        if pos == goals:
            return True  # everybody waits at distinct goals
        if t == T or (t, pos) in dead:
            return False
        explored += 1
        if explored > MAX_STATES:
            raise OracleTooLarge("joint state space too large")
        if extend(pos, t, 0, []):
            return True
        dead.add((t, pos))
        return False

    return feasible(starts, 0)


def brute_force_optimal(instance: Instance) -> int:
    """Minimum number of unsuccessful agents.

    Infeasible pairs are found first; every superset of one is skipped. The
    remaining subsets are tested from largest to smallest.
    """
    M = instance.num_agents
    _check_size(instance, M)
    infeasible = [frozenset(p) for p in itertools.combinations(range(M), 2) if not subset_feasible(instance, p)]
    for size in range(M, 0, -1):
        for subset in itertools.combinations(range(M), size):
            s = frozenset(subset)
            if any(bad <= s for bad in infeasible):
                continue
            if size <= 2 or subset_feasible(instance, s):
                return M - size
            infeasible.append(s)
    return M
