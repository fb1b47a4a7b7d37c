"""Node-split flow network over the space graph.

Every cell ``c`` becomes an Entry node ``2c`` and an Exit node ``2c + 1``
joined by a zero-cost edge of capacity 1, so at most one agent ever passes
through a cell. Each undirected space edge {a, b} of weight w becomes the two
directed edges Exit(a) -> Entry(b) and Exit(b) -> Entry(a) of weight w. A
virtual source feeds every start Entry and every goal Exit drains into a
virtual sink. The source is node ``2 * cells`` and the sink ``2 * cells + 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from flowform.errors import ValidationError
from flowform.flow import FlowNetwork
from flowform.geometry import GridIndex, GridSpec
from flowform.space_graph import SpaceGraph


class NodeKind(enum.Enum):
    ENTRY = "entry"
    EXIT = "exit"
    SOURCE = "source"
    SINK = "sink"


@dataclass(frozen=True)
class StateNode:
    kind: NodeKind
    cell: GridIndex | None = None


@dataclass(frozen=True, eq=False)
class StateGraph:
    space: SpaceGraph
    network: FlowNetwork = field(repr=False)
    starts: tuple[GridIndex, ...]
    goals: tuple[GridIndex, ...]

    @property
    def grid(self) -> GridSpec:
        return self.space.grid

    @property
    def source(self) -> int:
        return self.network.source

    @property
    def sink(self) -> int:
        return self.network.sink

    @property
    def node_count(self) -> int:
        return self.network.n_nodes

    @property
    def edge_count(self) -> int:
        return self.network.edge_count

    def node(self, node_id: int) -> StateNode:
        if node_id == self.source:
            return StateNode(NodeKind.SOURCE)
        if node_id == self.sink:
            return StateNode(NodeKind.SINK)
        if not 0 <= node_id < self.node_count:
            raise ValidationError(f"no state node {node_id}")
        kind = NodeKind.EXIT if node_id % 2 else NodeKind.ENTRY
        return StateNode(kind, self.grid.unravel(node_id // 2))

    @property
    def nodes(self) -> list[StateNode]:
        return [self.node(i) for i in range(self.node_count)]

    def cell_of(self, node_id: int) -> GridIndex:
        if node_id in (self.source, self.sink):
            raise ValidationError("virtual nodes have no cell")
        return self.grid.unravel(node_id // 2)

    def entry(self, cell: Sequence[int]) -> int:
        return 2 * self.grid.linear(cell)

    def exit(self, cell: Sequence[int]) -> int:
        return 2 * self.grid.linear(cell) + 1

    def dump(self, fh: IO[str]) -> None:
        """Write one ``from to weight capacity`` line per edge."""
        net = self.network
        for u, v, w, c in zip(net.tail, net.head, net.weight, net.capacity):
            fh.write(f"{u} {v} {w:g} {c}\n")


def create_state_graph(
    gs: SpaceGraph, starts: Sequence[Sequence[int]], goals: Sequence[Sequence[int]]
) -> StateGraph:
    grid = gs.grid
    starts = tuple(GridIndex(*s) for s in starts)
    goals = tuple(GridIndex(*g) for g in goals)
    if not starts or len(starts) != len(goals):
        raise ValidationError(
            f"need equally many starts and goals (got {len(starts)} and {len(goals)})"
        )
    for c in starts + goals:
        if not grid.contains_index(c):
            raise ValidationError(f"out of grid: cell {tuple(c)}")
    if len(set(starts)) != len(starts):
        raise ValidationError("starts collide")
    if len(set(goals)) != len(goals):
        raise ValidationError("goals collide")
    for c in starts + goals:
        if gs.is_blocked(c):
            raise ValidationError(f"endpoint blocked: cell {tuple(c)}")

    cells = grid.cell_count
    source, sink = 2 * cells, 2 * cells + 1
    cell_ids = np.arange(cells, dtype=np.int64)
    a, b = gs.edges[:, 0], gs.edges[:, 1]
    start_ids = np.array([grid.linear(s) for s in starts], dtype=np.int64)
    goal_ids = np.array([grid.linear(g) for g in goals], dtype=np.int64)

    tail = np.concatenate([2 * cell_ids, 2 * a + 1, 2 * b + 1, 2 * goal_ids + 1,
                           np.full(len(starts), source)])
    head = np.concatenate([2 * cell_ids + 1, 2 * b, 2 * a, np.full(len(goals), sink),
                           2 * start_ids])
    weight = np.concatenate([np.zeros(cells), gs.weights, gs.weights,
                             np.zeros(len(goals)), np.zeros(len(starts))])
    # secondary key: direction rank of the hop for cross edges, input order otherwise
    rank = np.concatenate([
        np.zeros(cells),
        _direction_rank(grid, a, b),
        _direction_rank(grid, b, a),
        np.full(len(goals), 6.0),
        np.arange(len(starts), dtype=np.float64),
    ])
    order = np.lexsort((rank, tail))
    network = FlowNetwork(
        n_nodes=2 * cells + 2,
        source=source,
        sink=sink,
        tail=tail[order],
        head=head[order],
        weight=weight[order],
        capacity=np.ones(len(tail), dtype=np.int64),
    )
    return StateGraph(gs, network, starts, goals)


def _direction_rank(grid: GridSpec, frm: np.ndarray, to: np.ndarray) -> np.ndarray:
    """Index into +x, -x, +y, -y, +z, -z of the unit step ``frm -> to``."""
    _, ny, nz = grid.dims
    fx, fr = np.divmod(frm, ny * nz)
    tx, tr = np.divmod(to, ny * nz)
    fy, fz = np.divmod(fr, nz)
    ty, tz = np.divmod(tr, nz)
    rank = np.empty(len(frm), dtype=np.float64)
    for axis, (f, t) in enumerate(((fx, tx), (fy, ty), (fz, tz))):
        rank[t > f] = 2 * axis
        rank[t < f] = 2 * axis + 1
    return rank
