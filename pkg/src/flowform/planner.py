"""Scenario in, per-agent collision-free waypoint plan out."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from flowform.errors import InfeasibleError, ValidationError
from flowform.flow import decompose_paths, max_flow
from flowform.geometry import (
    DEFAULT_CELL_SIZE,
    GeoCoord,
    GridIndex,
    GridSpec,
    LocalPoint,
    cell_center,
    find_bounding_box,
    lla_to_local,
    median_anchor,
    point_to_cell,
    subdivide,
)
from flowform.space_graph import (
    DEFAULT_VERTICAL_MULTIPLIER,
    Obstacle,
    SpaceGraph,
    create_space_graph,
)
from flowform.state_graph import StateGraph, create_state_graph

log = logging.getLogger(__name__)

DEFAULT_WAYPOINTS = 10

Position = Union[GeoCoord, LocalPoint]


@dataclass(frozen=True)
class Scenario:
    """Everything the planner needs. Obstacles are always in the local frame."""

    starts: tuple[Position, ...]
    goals: tuple[Position, ...]
    obstacles: tuple[Obstacle, ...] = ()
    cell_size: float = DEFAULT_CELL_SIZE
    vertical_multiplier: float = DEFAULT_VERTICAL_MULTIPLIER
    padding: int = 0
    waypoint_count: int = DEFAULT_WAYPOINTS
    clamp_ground: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(self.starts))
        object.__setattr__(self, "goals", tuple(self.goals))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.starts:
            raise ValidationError("scenario has no starts")
        if len(self.starts) != len(self.goals):
            raise ValidationError(
                f"{len(self.starts)} starts but {len(self.goals)} goals"
            )
        kinds = {type(p) for p in self.starts + self.goals}
        if len(kinds) != 1 or not kinds <= {GeoCoord, LocalPoint}:
            raise ValidationError("starts and goals must all be GeoCoord or all LocalPoint")
        if self.waypoint_count < 1:
            raise ValidationError("waypoint_count must be at least 1")

    @property
    def geodetic(self) -> bool:
        return isinstance(self.starts[0], GeoCoord)

    @property
    def agent_count(self) -> int:
        return len(self.starts)


@dataclass(frozen=True)
class Frame:
    """A scenario resolved into the local frame and its planning grid."""

    starts: tuple[LocalPoint, ...]
    goals: tuple[LocalPoint, ...]
    grid: GridSpec
    anchor: GeoCoord | None = None


def resolve_frame(s: Scenario) -> Frame:
    """Anchor (if geodetic), project, bound and grid the scenario."""
    anchor = None
    starts, goals = s.starts, s.goals
    if s.geodetic:
        # the agents' own median position anchors the frame
        anchor = median_anchor(starts)
        starts = tuple(lla_to_local(p, anchor) for p in starts)
        goals = tuple(lla_to_local(p, anchor) for p in goals)
    box = find_bounding_box(starts + goals)
    grid = subdivide(box, s.cell_size, s.padding, s.clamp_ground)
    return Frame(starts, goals, grid, anchor)


@dataclass(frozen=True)
class AgentPlan:
    agent: int
    start_cell: GridIndex
    goal_cell: GridIndex
    cells: tuple[GridIndex, ...]
    waypoints: tuple[LocalPoint, ...]
    cost: float
    start_position: LocalPoint
    goal_position: LocalPoint


@dataclass(frozen=True)
class SolverStats:
    value: int
    cost: float
    iterations: int
    wall_time: float = field(default=0.0, compare=False)
    node_count: int = 0
    edge_count: int = 0


@dataclass(frozen=True)
class Plan:
    agents: tuple[AgentPlan, ...]
    grid: GridSpec
    vertical_multiplier: float
    stats: SolverStats
    anchor: GeoCoord | None = None

    @property
    def total_cost(self) -> float:
        return sum(a.cost for a in self.agents)


def sample_waypoints(
    path: Sequence[Sequence[int]], grid: GridSpec, n: int
) -> list[LocalPoint]:
    """``n`` points at equal arc length along the polyline of cell centers."""
    if n < 1:
        raise ValidationError("waypoint count must be at least 1")
    if not path:
        raise ValidationError("empty cell path")
    centers = np.array([cell_center(c, grid).as_tuple() for c in path])
    if len(path) == 1:
        return [LocalPoint(*centers[0])] * n
    if n < 2:
        raise ValidationError("need at least 2 waypoints for a moving path")
    seg = np.linalg.norm(np.diff(centers, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    at = np.linspace(0.0, arc[-1], n)
    pts = np.stack([np.interp(at, arc, centers[:, k]) for k in range(3)], axis=1)
    pts[0], pts[-1] = centers[0], centers[-1]
    return [LocalPoint(*map(float, p)) for p in pts]


def assign_agents(
    starts: Sequence[LocalPoint],
    paths: Sequence[Sequence[GridIndex]],
    grid: GridSpec,
) -> dict[int, Sequence[GridIndex]]:
    """Give agent ``i`` the path that begins in the cell holding ``starts[i]``."""
    by_head: dict[GridIndex, Sequence[GridIndex]] = {}
    for p in paths:
        head = GridIndex(*p[0])
        if head in by_head:
            raise ValidationError(f"two paths start in cell {tuple(head)}")
        by_head[head] = p
    out = {}
    for i, s in enumerate(starts):
        cell = point_to_cell(s, grid)
        if cell not in by_head:
            raise ValidationError(f"no path starts in the cell of agent {i}")
        out[i] = by_head.pop(cell)
    if by_head:
        raise ValidationError("paths left without an agent")
    return out


def path_cost(path: Sequence[Sequence[int]], vertical_multiplier: float) -> float:
    cost = 0.0
    for a, b in zip(path, path[1:]):
        cost += vertical_multiplier if a[2] != b[2] else 1.0
    return cost


@dataclass
class Build:
    """Intermediate products of one solve, kept for benchmarking and debugging."""

    frame: Frame
    space: SpaceGraph | None = None
    state: StateGraph | None = None
    timings: dict[str, float] = field(default_factory=dict)


def build_graphs(s: Scenario) -> Build:
    t0 = time.perf_counter()
    frame = resolve_frame(s)
    space = create_space_graph(frame.grid, s.obstacles, s.vertical_multiplier)
    starts = [point_to_cell(p, frame.grid) for p in frame.starts]
    goals = [point_to_cell(p, frame.grid) for p in frame.goals]
    state = create_state_graph(space, starts, goals)
    return Build(frame, space, state, {"graph_build": time.perf_counter() - t0})


def solve(s: Scenario, build: Build | None = None) -> Plan:
    """Plan cell-disjoint paths moving every start onto some goal.

    Raises :class:`InfeasibleError` when fewer than N disjoint paths exist.
    """
    if build is None:
        build = build_graphs(s)
    frame, state = build.frame, build.state
    grid = frame.grid
    log.info(
        "grid %s, cell %g m: %d state nodes, %d edges",
        grid.dims, grid.cell_size, state.node_count, state.edge_count,
    )

    t0 = time.perf_counter()
    flow = max_flow(state)
    t1 = time.perf_counter()
    build.timings["max_flow"] = t1 - t0
    n = s.agent_count
    if flow.value < n:
        raise InfeasibleError(flow.value, n)
    paths = decompose_paths(state, flow)
    build.timings["decomposition"] = time.perf_counter() - t1

    goal_positions = {}
    for p in frame.goals:
        goal_positions.setdefault(point_to_cell(p, grid), p)
    assignment = assign_agents(frame.starts, paths, grid)
    agents = []
    for i in range(n):
        cells = tuple(GridIndex(*c) for c in assignment[i])
        agents.append(
            AgentPlan(
                agent=i,
                start_cell=cells[0],
                goal_cell=cells[-1],
                cells=cells,
                waypoints=tuple(sample_waypoints(cells, grid, s.waypoint_count)),
                cost=path_cost(cells, s.vertical_multiplier),
                start_position=frame.starts[i],
                goal_position=goal_positions[cells[-1]],
            )
        )
    stats = SolverStats(
        value=flow.value,
        cost=flow.cost,
        iterations=flow.iterations,
        wall_time=sum(build.timings.values()),
        node_count=state.node_count,
        edge_count=state.edge_count,
    )
    return Plan(tuple(agents), grid, s.vertical_multiplier, stats, frame.anchor)
