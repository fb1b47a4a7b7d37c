"""Seeded random scenarios small enough for the exhaustive oracle."""

from __future__ import annotations

import random

from flowform.geometry import LocalPoint, cell_center, point_to_cell
from flowform.planner import Scenario, resolve_frame
from flowform.space_graph import Obstacle


def random_scenario(
    rng: random.Random,
    max_dims: tuple[int, int, int] = (4, 4, 2),
    max_agents: int = 3,
    obstacle_rate: float = 0.35,
    vertical_multipliers: tuple[float, ...] = (1.0, 2.0, 2.5, 5.0),
) -> Scenario:
    """Draw positions uniformly in a box of at most ``max_dims`` unit cells.

    Point draws that put two starts (or two goals) in one cell are redrawn.
    Obstacles are boxes strictly inside randomly picked non-endpoint cells.
    """
    while True:
        extent = [rng.randint(min(1, m), m) for m in max_dims[:2]] + [rng.randint(0, max_dims[2])]
        n = rng.choice([k for k in range(1, max_agents + 1) for _ in range(k)])
        rate = rng.uniform(0.0, obstacle_rate)
        H = rng.choice(vertical_multipliers)

        def draw() -> LocalPoint:
            return LocalPoint(*(round(rng.uniform(0, e), 3) for e in extent))

        for _ in range(20):
            starts = [draw() for _ in range(n)]
            goals = [draw() for _ in range(n)]
            frame = resolve_frame(Scenario(starts, goals, cell_size=1.0))
            grid = frame.grid
            start_cells = {point_to_cell(p, grid) for p in frame.starts}
            goal_cells = {point_to_cell(p, grid) for p in frame.goals}
            if len(start_cells) == n and len(goal_cells) == n:
                break
        else:
            continue
        obstacles = []
        for c in grid.iter_indices():
            if c in start_cells or c in goal_cells or rng.random() >= rate:
                continue
            ctr = cell_center(c, grid)
            q = 0.25 * grid.cell_size
            obstacles.append(Obstacle(
                LocalPoint(ctr.x - q, ctr.y - q, ctr.z - q),
                LocalPoint(ctr.x + q, ctr.y + q, ctr.z + q),
            ))
        return Scenario(
            starts, goals, obstacles,
            cell_size=1.0,
            vertical_multiplier=H,
            waypoint_count=rng.randint(2, 6),
        )


def corpus(seed: int, count: int, **kwargs) -> list[Scenario]:
    rng = random.Random(seed)
    return [random_scenario(rng, **kwargs) for _ in range(count)]
