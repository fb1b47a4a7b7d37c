"""Start layouts and goal formations.

Lattices are centered on the offset in x and y; z starts at the given
altitude. Arbitrary shapes come from a points file with one ``x y z`` line
per point; ``#`` starts a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO, Union

from flowform.errors import ValidationError
from flowform.geometry import LocalPoint

_ORIGIN = LocalPoint(0.0, 0.0, 0.0)


class PatternError(ValidationError):
    pass


@dataclass(frozen=True)
class GridPattern:
    rows: int
    cols: int
    spacing: float
    altitude: float = 0.0
    offset: LocalPoint = _ORIGIN

    def __post_init__(self) -> None:
        _check_counts(self.rows, self.cols)
        _check_spacing(self.spacing)


@dataclass(frozen=True)
class CubePattern:
    side: int
    spacing: float
    altitude: float = 0.0
    offset: LocalPoint = _ORIGIN

    def __post_init__(self) -> None:
        _check_counts(self.side)
        _check_spacing(self.spacing)


@dataclass(frozen=True)
class FilePattern:
    path: str | os.PathLike
    offset: LocalPoint = _ORIGIN


FormationSpec = Union[GridPattern, CubePattern, FilePattern]


def _check_counts(*counts: int) -> None:
    if any(int(c) != c or c < 1 for c in counts):
        raise PatternError(f"counts must be positive integers, got {counts}")


def _check_spacing(spacing: float) -> None:
    if not spacing > 0:
        raise PatternError(f"spacing must be positive, got {spacing}")


def _centered(i: int, count: int, spacing: float) -> float:
    return (i - (count - 1) / 2.0) * spacing


def generate(spec: FormationSpec) -> list[LocalPoint]:
    if isinstance(spec, GridPattern):
        raw = [
            (_centered(c, spec.cols, spec.spacing), _centered(r, spec.rows, spec.spacing), spec.altitude)
            for r in range(spec.rows)
            for c in range(spec.cols)
        ]
    elif isinstance(spec, CubePattern):
        k = spec.side
        raw = [
            (_centered(i, k, spec.spacing), _centered(j, k, spec.spacing), spec.altitude + h * spec.spacing)
            for h in range(k)
            for j in range(k)
            for i in range(k)
        ]
    elif isinstance(spec, FilePattern):
        with open(spec.path, encoding="utf-8") as fh:
            raw = [p.as_tuple() for p in read_points(fh, name=str(spec.path))]
    else:
        raise PatternError(f"unknown formation kind {type(spec).__name__}")
    ox, oy, oz = spec.offset.as_tuple()
    return [LocalPoint(x + ox, y + oy, z + oz) for x, y, z in raw]


def read_points(fh: TextIO, name: str = "<points>") -> list[LocalPoint]:
    points = []
    for lineno, line in enumerate(fh, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.replace(",", " ").split()
        if len(fields) != 3:
            raise PatternError(f"{name}:{lineno}: expected 'x y z', got {body!r}")
        try:
            points.append(LocalPoint(*(float(v) for v in fields)))
        except ValueError as exc:
            raise PatternError(f"{name}:{lineno}: {exc}") from None
    return points


def write_points(points: Iterable[LocalPoint], fh: TextIO) -> None:
    for p in points:
        fh.write(f"{p.x:.12g} {p.y:.12g} {p.z:.12g}\n")


def ground_to_cube(
    grid_rows: int,
    grid_cols: int,
    ground_spacing: float,
    side: int,
    cube_spacing: float,
    cube_altitude: float,
) -> tuple[Sequence[LocalPoint], Sequence[LocalPoint]]:
    """Launch-pad grid as starts and a cube formation overhead as goals."""
    starts = generate(GridPattern(grid_rows, grid_cols, ground_spacing, 0.0))
    goals = generate(CubePattern(side, cube_spacing, cube_altitude))
    return starts, goals
