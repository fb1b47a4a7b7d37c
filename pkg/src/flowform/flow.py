"""Min-cost maximum flow by successive shortest augmenting paths.

Ford-Fulkerson drives the outer loop; each augmenting path is the cheapest
source-to-sink path in the residual graph, found with Bellman-Ford because
backward residual arcs carry negated costs. Every edge ``k`` of a
:class:`FlowNetwork` owns two residual arcs: ``2k`` (forward, residual
``capacity - flow``, cost ``+w``) and ``2k + 1`` (backward, residual ``flow``,
cost ``-w``).

Arcs are scanned in ascending tail-node order, edge-insertion order within a
node, and a distance only improves on a strictly smaller value. Equal-cost
paths therefore always resolve the same way.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

import numpy as np
from numba import njit

from flowform.errors import NegativeCycleError, SolverError, ValidationError

log = logging.getLogger(__name__)

_REL_TOL = 1e-9


@njit(cache=True)
def _relax(ptr, arc_ids, arc_head, arc_cost, residual, dist, pred, tol):
    """In-place Bellman-Ford rounds with early exit.

    Returns the number of rounds run, or -1 if the n-th round still relaxed.
    """
    n = len(ptr) - 1
    for r in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            if du == np.inf:
                continue
            for k in range(ptr[u], ptr[u + 1]):
                a = arc_ids[k]
                if residual[a] > 0:
                    v = arc_head[a]
                    nd = du + arc_cost[a]
                    if nd < dist[v] - tol:
                        dist[v] = nd
                        pred[v] = a
                        changed = True
        if not changed:
            return r + 1
    return -1


@dataclass(frozen=True, eq=False)
class ArcTable:
    """Residual arc layout of a network, sorted for node-ordered scans."""

    tail: np.ndarray
    head: np.ndarray
    cost: np.ndarray
    ptr: np.ndarray
    order: np.ndarray
    tol: float


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed network with integer capacities and real edge costs."""

    n_nodes: int
    source: int
    sink: int
    tail: np.ndarray
    head: np.ndarray
    weight: np.ndarray
    capacity: np.ndarray

    def __post_init__(self) -> None:
        m = len(self.tail)
        if not (len(self.head) == len(self.weight) == len(self.capacity) == m):
            raise ValidationError("edge arrays differ in length")
        if not (0 <= self.source < self.n_nodes and 0 <= self.sink < self.n_nodes):
            raise ValidationError("source/sink outside node range")
        if self.source == self.sink:
            raise ValidationError("source and sink must differ")
        if m and (self.tail.min() < 0 or self.head.max() >= self.n_nodes
                  or self.head.min() < 0 or self.tail.max() >= self.n_nodes):
            raise ValidationError("edge endpoint outside node range")
        if m and self.capacity.min() < 0:
            raise ValidationError("negative capacity")

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        source: int,
        sink: int,
        edges: Iterable[tuple[int, int, int, float]],
    ) -> "FlowNetwork":
        """Build from ``(tail, head, capacity, weight)`` tuples."""
        rows = list(edges)
        arr = lambda i, dt: np.array([r[i] for r in rows], dtype=dt)  # noqa: E731
        return cls(
            n_nodes=n_nodes,
            source=source,
            sink=sink,
            tail=arr(0, np.int64),
            head=arr(1, np.int64),
            capacity=arr(2, np.int64),
            weight=arr(3, np.float64),
        )

    @property
    def edge_count(self) -> int:
        return len(self.tail)

    @cached_property
    def arcs(self) -> ArcTable:
        m = self.edge_count
        tail = np.empty(2 * m, dtype=np.int64)
        head = np.empty(2 * m, dtype=np.int64)
        cost = np.empty(2 * m, dtype=np.float64)
        tail[0::2], tail[1::2] = self.tail, self.head
        head[0::2], head[1::2] = self.head, self.tail
        cost[0::2], cost[1::2] = self.weight, -self.weight
        order = np.argsort(tail, kind="stable")
        ptr = np.searchsorted(tail[order], np.arange(self.n_nodes + 1))
        scale = float(np.abs(self.weight).max()) if m else 1.0
        return ArcTable(tail, head, cost, ptr.astype(np.int64), order, _REL_TOL * max(1.0, scale))


@dataclass(frozen=True)
class AugmentRecord:
    iteration: int
    bottleneck: int
    path_cost: float
    value: int


@dataclass(frozen=True, eq=False)
class FlowState:
    """Integral flow on every edge of ``network`` plus running totals."""

    network: FlowNetwork
    flow: np.ndarray
    value: int = 0
    cost: float = 0.0
    history: tuple[AugmentRecord, ...] = field(default=())

    @classmethod
    def zero(cls, network: FlowNetwork) -> "FlowState":
        return cls(network, np.zeros(network.edge_count, dtype=np.int64))

    @property
    def iterations(self) -> int:
        return len(self.history)

    def residual(self) -> "ResidualView":
        res = np.empty(2 * self.network.edge_count, dtype=np.int64)
        res[0::2] = self.network.capacity - self.flow
        res[1::2] = self.flow
        return ResidualView(self.network, res)


@dataclass(frozen=True, eq=False)
class ResidualView:
    """Residual capacity of every arc; arc ``2k + 1`` mirrors edge ``k`` backwards."""

    network: FlowNetwork
    capacity: np.ndarray

    def arcs(self) -> Iterable[tuple[int, int, int, float, int]]:
        """Yield ``(arc, tail, head, cost, residual)`` for arcs with positive residual."""
        t = self.network.arcs
        for a in t.order:
            if self.capacity[a] > 0:
                yield int(a), int(t.tail[a]), int(t.head[a]), float(t.cost[a]), int(self.capacity[a])


@dataclass(frozen=True)
class AugmentingPath:
    nodes: tuple[int, ...]
    arcs: tuple[int, ...]
    forward: tuple[bool, ...]
    bottleneck: int
    cost: float


def _run_bellman_ford(view: ResidualView, dist: np.ndarray) -> np.ndarray:
    t = view.network.arcs
    pred = np.full(view.network.n_nodes, -1, dtype=np.int64)
    rounds = _relax(t.ptr, t.order, t.head, t.cost, view.capacity, dist, pred, t.tol)
    if rounds < 0:
        raise NegativeCycleError()
    return pred


def bellman_ford(
    view: ResidualView, source: int | None = None, sink: int | None = None
) -> AugmentingPath | None:
    """Cheapest source-to-sink path over positive-residual arcs, or None."""
    net = view.network
    source = net.source if source is None else source
    sink = net.sink if sink is None else sink
    dist = np.full(net.n_nodes, np.inf)
    dist[source] = 0.0
    pred = _run_bellman_ford(view, dist)
    if not np.isfinite(dist[sink]):
        return None

    t = net.arcs
    arcs: list[int] = []
    v = sink
    while v != source:
        a = int(pred[v])
        if a < 0 or len(arcs) > net.n_nodes:
            raise SolverError("predecessor chain broken")
        arcs.append(a)
        v = int(t.tail[a])
    arcs.reverse()
    nodes = (source,) + tuple(int(t.head[a]) for a in arcs)
    return AugmentingPath(
        nodes=nodes,
        arcs=tuple(arcs),
        forward=tuple(a % 2 == 0 for a in arcs),
        bottleneck=int(min(view.capacity[a] for a in arcs)),
        cost=float(dist[sink]),
    )


def has_negative_cycle(view: ResidualView) -> bool:
    """True when any cycle of positive-residual arcs has negative total cost."""
    dist = np.zeros(view.network.n_nodes)
    try:
        _run_bellman_ford(view, dist)
    except NegativeCycleError:
        return True
    return False


def augment(f: FlowState, p: AugmentingPath, amount: int | None = None) -> FlowState:
    """Push ``amount`` (default: the bottleneck) units along ``p``.

    Forward arcs add to their edge's flow, backward arcs subtract from it.
    """
    b = p.bottleneck if amount is None else amount
    if b <= 0:
        raise SolverError(f"non-positive augmentation {b}")
    net = f.network
    res = f.residual().capacity
    if p.nodes[0] != net.source or p.nodes[-1] != net.sink:
        raise SolverError("augmenting path must run from source to sink")
    flow = f.flow.copy()
    cost = 0.0
    at = net.source
    for a, fwd in zip(p.arcs, p.forward):
        if (a % 2 == 0) != fwd or net.arcs.tail[a] != at:
            raise SolverError(f"arc {a} does not continue the path")
        if res[a] < b:
            raise SolverError(f"arc {a} has residual {res[a]} < {b}")
        k = a // 2
        if fwd:
            flow[k] += b
            cost += net.weight[k]
        else:
            flow[k] -= b
            cost -= net.weight[k]
        at = int(net.arcs.head[a])
    value = f.value + b
    record = AugmentRecord(len(f.history) + 1, b, float(cost), value)
    return FlowState(net, flow, value, f.cost + b * float(cost), f.history + (record,))


def _as_network(g) -> FlowNetwork:
    return g if isinstance(g, FlowNetwork) else g.network


def max_flow(
    g,
    on_augment: Callable[[FlowState, AugmentingPath], None] | None = None,
) -> FlowState:
    """Successive shortest augmenting paths until the sink is unreachable.

    ``g`` is a :class:`FlowNetwork` or anything exposing one as ``.network``.
    ``on_augment`` sees the state after each augmentation.
    """
    net = _as_network(g)
    f = FlowState.zero(net)
    while True:
        p = bellman_ford(f.residual())
        if p is None:
            return f
        f = augment(f, p)
        log.debug(
            "augmentation %d: bottleneck=%d path_cost=%g value=%d total_cost=%g",
            f.iterations, p.bottleneck, p.cost, f.value, f.cost,
        )
        if on_augment is not None:
            on_augment(f, p)


def decompose_flow(f: FlowState) -> list[list[int]]:
    """Split an integral acyclic flow into unit source-to-sink node paths."""
    net = f.network
    remaining = f.flow.copy()
    order = np.argsort(net.tail, kind="stable")
    ptr = np.searchsorted(net.tail[order], np.arange(net.n_nodes + 1))
    paths: list[list[int]] = []
    limit = net.edge_count + 1
    while True:
        start = _next_edge(net.source, remaining, order, ptr)
        if start < 0:
            break
        u = net.source
        path = [u]
        while u != net.sink:
            k = _next_edge(u, remaining, order, ptr)
            if k < 0 or len(path) > limit:
                raise SolverError("flow decomposition failed")
            remaining[k] -= 1
            u = int(net.head[k])
            path.append(u)
        paths.append(path)
    if len(paths) != f.value or remaining.any():
        raise SolverError("flow decomposition failed")
    return paths


def _next_edge(u: int, remaining: np.ndarray, order: np.ndarray, ptr: np.ndarray) -> int:
    for j in range(ptr[u], ptr[u + 1]):
        k = int(order[j])
        if remaining[k] > 0:
            return k
    return -1


def decompose_paths(g, f: FlowState) -> list[list]:
    """Cell paths of a state-graph flow; each Entry/Exit pair collapses to one cell."""
    cells_seen: set[int] = set()
    out = []
    for nodes in decompose_flow(f):
        inner = nodes[1:-1]
        cells = [g.cell_of(v) for v in inner[::2]]
        if any(g.cell_of(v) != c for v, c in zip(inner[1::2], cells)) or len(inner) % 2:
            raise SolverError("flow decomposition failed")
        linear = [g.grid.linear(c) for c in cells]
        if cells_seen.intersection(linear) or len(set(linear)) != len(linear):
            raise SolverError("flow decomposition failed: cell shared between paths")
        cells_seen.update(linear)
        out.append(cells)
    return out


def check_conservation(f: FlowState) -> list[int]:
    """Nodes (other than source/sink) where inflow differs from outflow."""
    net = f.network
    balance = np.zeros(net.n_nodes, dtype=np.int64)
    np.add.at(balance, net.head, f.flow)
    np.subtract.at(balance, net.tail, f.flow)
    bad = np.flatnonzero(balance)
    return [int(v) for v in bad if v not in (net.source, net.sink)]


def check_capacity(f: FlowState) -> list[int]:
    """Edges whose flow lies outside ``[0, capacity]``."""
    net = f.network
    return [int(k) for k in np.flatnonzero((f.flow < 0) | (f.flow > net.capacity))]


def total_cost(f: FlowState) -> float:
    return float(np.dot(f.flow, f.network.weight))
