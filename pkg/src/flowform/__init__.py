"""Collision-free formation path planning for unlabeled agents via min-cost flow."""

from flowform.errors import (
    FlowformError,
    InfeasibleError,
    NegativeCycleError,
    SolverError,
    ValidationError,
)
from flowform.geometry import (
    BoundingBox,
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
from flowform.space_graph import Obstacle, SpaceGraph, create_space_graph, neighbors
from flowform.state_graph import StateGraph, StateNode, create_state_graph
from flowform.flow import (
    AugmentingPath,
    FlowNetwork,
    FlowState,
    ResidualView,
    augment,
    bellman_ford,
    decompose_paths,
    max_flow,
)
from flowform.planner import (
    AgentPlan,
    Plan,
    Scenario,
    assign_agents,
    sample_waypoints,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AgentPlan",
    "AugmentingPath",
    "BoundingBox",
    "FlowNetwork",
    "FlowState",
    "FlowformError",
    "GeoCoord",
    "GridIndex",
    "GridSpec",
    "InfeasibleError",
    "LocalPoint",
    "NegativeCycleError",
    "Obstacle",
    "Plan",
    "ResidualView",
    "Scenario",
    "SolverError",
    "SpaceGraph",
    "StateGraph",
    "StateNode",
    "ValidationError",
    "assign_agents",
    "augment",
    "bellman_ford",
    "cell_center",
    "create_space_graph",
    "create_state_graph",
    "decompose_paths",
    "find_bounding_box",
    "lla_to_local",
    "max_flow",
    "median_anchor",
    "neighbors",
    "point_to_cell",
    "sample_waypoints",
    "solve",
    "subdivide",
]
