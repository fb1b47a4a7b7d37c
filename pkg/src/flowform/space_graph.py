"""Undirected 6-connected grid graph over free cells.

Horizontal moves cost 1, vertical moves cost ``H`` (the vertical movement
penalty). Cells touched by an obstacle box are blocked and carry no edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from flowform.errors import ValidationError
from flowform.geometry import GridIndex, GridSpec, LocalPoint

DEFAULT_VERTICAL_MULTIPLIER = 5.0

# +x, -x, +y, -y, +z, -z
DIRECTIONS: tuple[tuple[int, int, int], ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)

_EPS = 1e-9


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned box in the local frame."""

    min_corner: LocalPoint
    max_corner: LocalPoint

    def __post_init__(self) -> None:
        lo, hi = self.min_corner.as_tuple(), self.max_corner.as_tuple()
        if any(a > b for a, b in zip(lo, hi)):
            raise ValidationError(f"obstacle min {lo} exceeds max {hi}")


@dataclass(frozen=True, eq=False)
class SpaceGraph:
    """Grid graph with edges stored as parallel arrays.

    ``edges[k] = (a, b)`` holds linear cell numbers with ``a < b`` and
    ``weights[k]`` its cost. ``free`` is a boolean mask over linear cells.
    """

    grid: GridSpec
    vertical_multiplier: float
    free: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def node_count(self) -> int:
        return self.grid.cell_count

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def blocked(self) -> frozenset[GridIndex]:
        return frozenset(self.grid.unravel(c) for c in np.flatnonzero(~self.free))

    def is_blocked(self, idx: Sequence[int]) -> bool:
        return not self.free[self.grid.linear(idx)]

    def edge_weight(self, a: Sequence[int], b: Sequence[int]) -> float:
        """Weight of the edge between two cells; raises if they are not adjacent."""
        for nb, w in neighbors(self, a):
            if nb == tuple(b):
                return w
        raise ValidationError(f"cells {tuple(a)} and {tuple(b)} are not adjacent")

    @cached_property
    def adjacency(self) -> dict[GridIndex, list[tuple[GridIndex, float]]]:
        return {c: neighbors(self, c) for c in self.grid.iter_indices()}


def blocked_mask(grid: GridSpec, obstacles: Sequence[Obstacle]) -> np.ndarray:
    """Boolean (X, Y, Z) array, true where a cell volume meets an obstacle.

    Touching faces count as intersecting.
    """
    mask = np.zeros(grid.dims, dtype=bool)
    d = grid.cell_size
    for ob in obstacles:
        sl = []
        for o, n, a, b in zip(
            grid.origin.as_tuple(), grid.dims, ob.min_corner.as_tuple(), ob.max_corner.as_tuple()
        ):
            # cell i spans [o + i*d, o + (i+1)*d]
            lo = max(0, math.ceil((a - o) / d - 1 - _EPS))
            hi = min(n - 1, math.floor((b - o) / d + _EPS))
            sl.append(slice(lo, hi + 1) if lo <= hi else slice(0, 0))
        mask[tuple(sl)] = True
    return mask


def create_space_graph(
    grid: GridSpec,
    obstacles: Sequence[Obstacle] = (),
    vertical_multiplier: float = DEFAULT_VERTICAL_MULTIPLIER,
) -> SpaceGraph:
    if not vertical_multiplier >= 1:
        raise ValidationError(f"vertical multiplier must be >= 1, got {vertical_multiplier}")
    free3 = ~blocked_mask(grid, obstacles)
    ids = np.arange(grid.cell_count, dtype=np.int64).reshape(grid.dims)

    chunks, wchunks = [], []
    for axis, w in ((0, 1.0), (1, 1.0), (2, float(vertical_multiplier))):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        ok = free3[tuple(lo)] & free3[tuple(hi)]
        pairs = np.stack([ids[tuple(lo)][ok], ids[tuple(hi)][ok]], axis=1)
        chunks.append(pairs)
        wchunks.append(np.full(len(pairs), w))
    edges = np.concatenate(chunks).reshape(-1, 2)
    weights = np.concatenate(wchunks)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return SpaceGraph(
        grid=grid,
        vertical_multiplier=float(vertical_multiplier),
        free=free3.reshape(-1),
        edges=edges[order],
        weights=weights[order],
    )


def neighbors(g: SpaceGraph, c: Sequence[int]) -> list[tuple[GridIndex, float]]:
    """Adjacent free cells of ``c`` in the order +x, -x, +y, -y, +z, -z."""
    grid = g.grid
    if not grid.contains_index(c):
        raise ValidationError(f"cell index {tuple(c)} outside grid dims {grid.dims}")
    if not g.free[grid.linear(c)]:
        return []
    out = []
    for dx, dy, dz in DIRECTIONS:
        nb = GridIndex(c[0] + dx, c[1] + dy, c[2] + dz)
        if grid.contains_index(nb) and g.free[grid.linear(nb)]:
            out.append((nb, g.vertical_multiplier if dz else 1.0))
    return out
