"""Time-expanded flow network with vertex and edge-swap capacity gadgets.

Node ids:
    in(v, t)  = 2 * (t * |V| + v)
    out(v, t) = in(v, t) + 1
    gadget nodes of edge e at step t start at 2 * |V| * (T + 1), two per gadget.
Commodity i enters at in(s_i, 0) and leaves at out(g_i, T), so both its
first and last vertex occupancy go through a unit-capacity arc.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import Instance

VERTEX = "vertex"  # in(v,t) -> out(v,t), capacity 1
WAIT = "wait"  # out(v,t) -> in(v,t+1)
ENTRY = "entry"  # out(u,t) -> gadget a
MIDDLE = "middle"  # gadget a -> gadget b, capacity 1
EXIT = "exit"  # gadget b -> in(w,t+1)

UNIT_CAPACITY = (VERTEX, MIDDLE)


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    kind: str


@dataclass
class FlowNetwork:
    """Arcs are laid out layer by layer: per step t, |V| vertex arcs, |V| wait
    arcs and five arcs per edge gadget; the last layer holds vertex arcs only.
    Arc objects are decoded from their index on demand."""

    n_vertices: int
    deadline: int
    edges: tuple[tuple[int, int], ...]

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_vertices * (self.deadline + 1) + 2 * len(self.edges) * self.deadline

    @property
    def n_arcs(self) -> int:
        return self.layer_offset(self.deadline) + self.n_vertices

    def in_node(self, v: int, t: int) -> int:
        return 2 * (t * self.n_vertices + v)

    def out_node(self, v: int, t: int) -> int:
        return 2 * (t * self.n_vertices + v) + 1

    def gadget_nodes(self, e: int, t: int) -> tuple[int, int]:
        a = 2 * self.n_vertices * (self.deadline + 1) + 2 * (t * len(self.edges) + e)
        return a, a + 1

    def node_vertex_time(self, node: int) -> tuple[int, int, str] | None:
        """(vertex, t, side) for in/out nodes, None for gadget nodes."""
        if node >= 2 * self.n_vertices * (self.deadline + 1):
            return None
        t, v = divmod(node // 2, self.n_vertices)
        return v, t, "out" if node % 2 else "in"

    def layer_offset(self, t: int) -> int:
        return t * (2 * self.n_vertices + 5 * len(self.edges))

    def vertex_arc(self, v: int, t: int) -> int:
        return self.layer_offset(t) + v

    def wait_arc(self, v: int, t: int) -> int:
        return self.layer_offset(t) + self.n_vertices + v

    def gadget_arc(self, e: int, t: int) -> int:
        """Index of the first of the edge gadget's five arcs: entry u, entry v, middle, exit u, exit v."""
        return self.layer_offset(t) + 2 * self.n_vertices + 5 * e

    def arc(self, k: int) -> Arc:
        V = self.n_vertices
        t, r = divmod(k, 2 * V + 5 * len(self.edges))
        if not 0 <= k < self.n_arcs:
            raise IndexError(k)
        if r < V:
            return Arc(self.in_node(r, t), self.out_node(r, t), VERTEX)
        if r < 2 * V:
            return Arc(self.out_node(r - V, t), self.in_node(r - V, t + 1), WAIT)
        e, j = divmod(r - 2 * V, 5)
        u, v = self.edges[e]
        a, b = self.gadget_nodes(e, t)
        if j == 0:
            return Arc(self.out_node(u, t), a, ENTRY)
        if j == 1:
            return Arc(self.out_node(v, t), a, ENTRY)
        if j == 2:
            return Arc(a, b, MIDDLE)
        return Arc(b, self.in_node(u if j == 3 else v, t + 1), EXIT)

    @property
    def arcs(self) -> list[Arc]:
        return [self.arc(k) for k in range(self.n_arcs)]

    def count(self, kind: str) -> int:
        return sum(a.kind == kind for a in self.arcs)


def build_network(instance: Instance) -> FlowNetwork:
    return FlowNetwork(instance.graph.n_vertices, instance.deadline, instance.graph.edges)


@dataclass
class ReducedNetwork:
    network: FlowNetwork
    instance: Instance
    admissible_nodes: list[frozenset] = field(default_factory=list)  # per commodity
    admissible_arcs: list[list[int]] = field(default_factory=list)  # arc indices per commodity

    def source(self, i: int) -> int:
        return self.network.in_node(self.instance.agents[i][0], 0)

    def sink(self, i: int) -> int:
        return self.network.out_node(self.instance.agents[i][1], self.network.deadline)


def reduce_network(network: FlowNetwork, instance: Instance, prune: bool = True) -> ReducedNetwork:
    """Restrict each commodity to (v, t) with dist(s, v) <= t and dist(v, g) <= T - t.

    ``prune=False`` keeps the whole network for every commodity.
    """
    T, V = network.deadline, network.n_vertices
    nbrs = instance.graph.neighbors
    edge_index = {}
    for e, (u, v) in enumerate(network.edges):
        edge_index[(u, v)] = e
        edge_index[(v, u)] = e
    red = ReducedNetwork(network, instance)
    for i in range(instance.num_agents):
        if prune:
            ds = instance.start_distances(i)
            dg = instance.goal_distances(i)
            ok = {(v, t) for v in range(V) if ds[v] + dg[v] <= T
                  for t in range(ds[v], T - dg[v] + 1)}
        else:
            ok = {(v, t) for v in range(V) for t in range(T + 1)}
        nodes = set()
        arcs = set()
        for v, t in ok:
            nodes.add(network.in_node(v, t))
            nodes.add(network.out_node(v, t))
            arcs.add(network.vertex_arc(v, t))
            if t == T:
                continue
            if (v, t + 1) in ok:
                arcs.add(network.wait_arc(v, t))
            for w in nbrs[v]:
                if (w, t + 1) not in ok:
                    continue
                e = edge_index[(v, w)]
                u0, u1 = network.edges[e]
                base = network.gadget_arc(e, t)
                nodes.update(network.gadget_nodes(e, t))
                arcs.add(base + 2)  # middle
                for k, x in enumerate((u0, u1)):
                    if (x, t) in ok:
                        arcs.add(base + k)  # entry from x
                    if (x, t + 1) in ok:
                        arcs.add(base + 3 + k)  # exit to x
        red.admissible_nodes.append(frozenset(nodes))
        red.admissible_arcs.append(sorted(arcs))
    return red
