"""Local frame conversion, bounding boxes and the cubic planning grid.

Positions are expressed in an east/north/up frame anchored at a reference
geodetic point. The planning volume is the tight axis-aligned box around all
start and goal positions, cut into cubic cells of side ``cell_size``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from flowform.errors import ValidationError

EARTH_RADIUS_M = 6_371_000.0
MAX_ANCHOR_OFFSET_DEG = 1.0
DEFAULT_CELL_SIZE = 2.0

# slack for floating point round-off when snapping to cell boundaries
_EPS = 1e-9


@dataclass(frozen=True)
class GeoCoord:
    latitude: float
    longitude: float
    altitude: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValidationError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValidationError(f"longitude {self.longitude} outside [-180, 180]")
        if not math.isfinite(self.altitude):
            raise ValidationError("altitude must be finite")


@dataclass(frozen=True)
class LocalPoint:
    """Meters east (x), north (y) and up (z) of the anchor."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValidationError(f"non-finite local point {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class BoundingBox:
    min_corner: LocalPoint
    extent: tuple[float, float, float]

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.extent):
            raise ValidationError(f"negative box extent {self.extent}")

    @property
    def max_corner(self) -> LocalPoint:
        lo = self.min_corner.as_tuple()
        return LocalPoint(*(a + e for a, e in zip(lo, self.extent)))

    def contains(self, p: LocalPoint) -> bool:
        lo = self.min_corner.as_tuple()
        hi = self.max_corner.as_tuple()
        return all(a - _EPS <= v <= b + _EPS for a, v, b in zip(lo, p.as_tuple(), hi))


class GridIndex(NamedTuple):
    ix: int
    iy: int
    iz: int


@dataclass(frozen=True)
class GridSpec:
    origin: LocalPoint
    cell_size: float
    dims: tuple[int, int, int]

    def __post_init__(self) -> None:
        if not self.cell_size > 0:
            raise ValidationError(f"cell_size must be positive, got {self.cell_size}")
        if len(self.dims) != 3 or any(int(d) < 1 for d in self.dims):
            raise ValidationError(f"grid dims must be three positive counts, got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def cell_count(self) -> int:
        x, y, z = self.dims
        return x * y * z

    def contains_index(self, idx: Sequence[int]) -> bool:
        return all(0 <= i < d for i, d in zip(idx, self.dims)) and len(idx) == 3

    def linear(self, idx: Sequence[int]) -> int:
        """Row-major cell number: x slowest, z fastest."""
        _, ny, nz = self.dims
        return (idx[0] * ny + idx[1]) * nz + idx[2]

    def unravel(self, linear: int) -> GridIndex:
        _, ny, nz = self.dims
        rest, iz = divmod(int(linear), nz)
        ix, iy = divmod(rest, ny)
        return GridIndex(ix, iy, iz)

    def iter_indices(self) -> Iterable[GridIndex]:
        x, y, z = self.dims
        for ix in range(x):
            for iy in range(y):
                for iz in range(z):
                    yield GridIndex(ix, iy, iz)


def median_anchor(positions: Sequence[GeoCoord]) -> GeoCoord:
    """Component-wise median of ``positions``; the lower median for even counts."""
    if not positions:
        raise ValidationError("no positions")
    k = (len(positions) - 1) // 2

    def pick(values: Iterable[float]) -> float:
        return sorted(values)[k]

    return GeoCoord(
        pick(p.latitude for p in positions),
        pick(p.longitude for p in positions),
        pick(p.altitude for p in positions),
    )


def lla_to_local(
    p: GeoCoord, anchor: GeoCoord, radius: float = EARTH_RADIUS_M
) -> LocalPoint:
    """Equirectangular projection onto the tangent plane at ``anchor``."""
    if (
        abs(p.latitude - anchor.latitude) >= MAX_ANCHOR_OFFSET_DEG
        or abs(p.longitude - anchor.longitude) >= MAX_ANCHOR_OFFSET_DEG
    ):
        raise ValidationError("anchor too far")
    rad = math.pi / 180.0
    x = (p.longitude - anchor.longitude) * rad * radius * math.cos(anchor.latitude * rad)
    y = (p.latitude - anchor.latitude) * rad * radius
    return LocalPoint(x, y, p.altitude - anchor.altitude)


def find_bounding_box(points: Sequence[LocalPoint]) -> BoundingBox:
    if not points:
        raise ValidationError("no positions")
    lo = [min(p.as_tuple()[a] for p in points) for a in range(3)]
    hi = [max(p.as_tuple()[a] for p in points) for a in range(3)]
    return BoundingBox(LocalPoint(*lo), tuple(b - a for a, b in zip(lo, hi)))


def subdivide(
    box: BoundingBox,
    cell_size: float = DEFAULT_CELL_SIZE,
    padding: int = 0,
    clamp_ground: bool = False,
) -> GridSpec:
    """Cut ``box`` into cubic cells, adding ``padding`` spare cells on every side.

    Counts round up so the grid always covers the box; an empty axis still
    gets one cell. With ``clamp_ground`` the padded origin is not pushed below
    z = 0 unless the box itself already reaches below ground.
    """
    if not cell_size > 0:
        raise ValidationError(f"cell_size must be positive, got {cell_size}")
    if padding < 0:
        raise ValidationError(f"padding must be non-negative, got {padding}")
    dims = tuple(
        max(1, math.ceil(e / cell_size - _EPS)) + 2 * padding for e in box.extent
    )
    shift = padding * cell_size
    ox, oy, oz = (v - shift for v in box.min_corner.as_tuple())
    if clamp_ground and oz < 0:
        oz = max(oz, min(0.0, box.min_corner.z))
    return GridSpec(LocalPoint(ox, oy, oz), float(cell_size), dims)


def point_to_cell(p: LocalPoint, grid: GridSpec) -> GridIndex:
    idx = []
    for v, o, n in zip(p.as_tuple(), grid.origin.as_tuple(), grid.dims):
        rel = (v - o) / grid.cell_size
        if rel < -_EPS or rel > n + _EPS:
            raise ValidationError(f"out of grid: {p.as_tuple()}")
        i = math.floor(rel + _EPS)
        idx.append(min(max(i, 0), n - 1))
    return GridIndex(*idx)


def cell_center(idx: Sequence[int], grid: GridSpec) -> LocalPoint:
    if not grid.contains_index(idx):
        raise ValidationError(f"cell index {tuple(idx)} outside grid dims {grid.dims}")
    d = grid.cell_size
    return LocalPoint(*(o + (i + 0.5) * d for o, i in zip(grid.origin.as_tuple(), idx)))
