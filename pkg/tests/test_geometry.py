import itertools
import math

import pytest
from hypothesis import given, strategies as st

from flowform.errors import ValidationError
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

coord = st.floats(-1e4, 1e4, allow_nan=False)
points = st.lists(st.builds(LocalPoint, coord, coord, coord), min_size=1, max_size=20)
geos = st.lists(
    st.builds(GeoCoord, st.floats(-60, 60), st.floats(-170, 170), st.floats(0, 500)),
    min_size=1, max_size=9,
)


class TestMedianAnchor:
    def test_single(self):
        assert median_anchor([GeoCoord(10, 20, 5)]) == GeoCoord(10, 20, 5)

    def test_componentwise_middle(self):
        got = median_anchor([GeoCoord(10, 20, 0), GeoCoord(12, 24, 2), GeoCoord(11, 22, 4)])
        assert got == GeoCoord(11, 22, 2)

    def test_lower_median_for_even_count(self):
        assert median_anchor([GeoCoord(10, 20, 0), GeoCoord(12, 24, 2)]) == GeoCoord(10, 20, 0)

    def test_empty(self):
        with pytest.raises(ValidationError, match="no positions"):
            median_anchor([])

    @given(geos, st.randoms())
    def test_permutation_invariant(self, ps, rnd):
        shuffled = list(ps)
        rnd.shuffle(shuffled)
        assert median_anchor(shuffled) == median_anchor(ps)


class TestLlaToLocal:
    def test_identity_at_anchor(self):
        a = GeoCoord(23.8, 90.4, 12.0)
        assert lla_to_local(a, a) == LocalPoint(0.0, 0.0, 0.0)

    def test_north_offset(self):
        # 0.001 deg * pi/180 * 6371000 m
        p = lla_to_local(GeoCoord(0.001, 0, 0), GeoCoord(0, 0, 0))
        assert p.y == pytest.approx(111.19492664455873, abs=1e-9)
        assert p.x == 0.0 and p.z == 0.0

    def test_altitude_only(self):
        assert lla_to_local(GeoCoord(0, 0, 10), GeoCoord(0, 0, 0)) == LocalPoint(0, 0, 10)

    def test_east_scaled_by_latitude(self):
        p = lla_to_local(GeoCoord(60, 0.001, 0), GeoCoord(60, 0, 0))
        assert p.x == pytest.approx(111.19492664455873 * 0.5, rel=1e-12)

    def test_anchor_too_far(self):
        with pytest.raises(ValidationError, match="anchor too far"):
            lla_to_local(GeoCoord(2, 0, 0), GeoCoord(0, 0, 0))

    @given(geos)
    def test_anchor_maps_to_origin(self, ps):
        a = median_anchor(ps)
        assert lla_to_local(a, a).as_tuple() == (0.0, 0.0, 0.0)

    def test_invalid_latitude(self):
        with pytest.raises(ValidationError):
            GeoCoord(91, 0, 0)


class TestBoundingBox:
    def test_two_points(self):
        b = find_bounding_box([LocalPoint(0, 0, 0), LocalPoint(10, 4, 2)])
        assert b.min_corner == LocalPoint(0, 0, 0) and b.extent == (10, 4, 2)

    def test_single_point(self):
        b = find_bounding_box([LocalPoint(5, 5, 5)])
        assert b.min_corner == LocalPoint(5, 5, 5) and b.extent == (0, 0, 0)

    def test_mixed_signs(self):
        b = find_bounding_box([LocalPoint(-1, 0, 0), LocalPoint(1, 2, 0), LocalPoint(0, -3, 4)])
        assert b.min_corner == LocalPoint(-1, -3, 0) and b.extent == (2, 5, 4)

    def test_empty(self):
        with pytest.raises(ValidationError, match="no positions"):
            find_bounding_box([])

    @given(points)
    def test_contains_all(self, ps):
        box = find_bounding_box(ps)
        assert all(box.contains(p) for p in ps)


def _box(extent):
    return BoundingBox(LocalPoint(0, 0, 0), extent)


class TestSubdivide:
    @pytest.mark.parametrize(
        "extent, d, pad, dims",
        [
            ((10, 10, 4), 2, 0, (5, 5, 2)),
            ((9, 9, 3), 2, 0, (5, 5, 2)),
            ((0, 0, 0), 2, 1, (3, 3, 3)),
            ((0.6, 0.7, 0.3), 0.1, 0, (6, 7, 3)),
        ],
    )
    def test_dims(self, extent, d, pad, dims):
        assert subdivide(_box(extent), d, pad).dims == dims

    def test_padding_shifts_origin(self):
        g = subdivide(BoundingBox(LocalPoint(1, 2, 3), (4, 4, 4)), 2.0, 1)
        assert g.origin == LocalPoint(-1, 0, 1)

    def test_clamp_ground(self):
        box = BoundingBox(LocalPoint(0, 0, 0.5), (4, 4, 4))
        assert subdivide(box, 2.0, 1).origin.z == pytest.approx(-1.5)
        assert subdivide(box, 2.0, 1, clamp_ground=True).origin.z == 0.0

    def test_clamp_never_cuts_off_points_below_ground(self):
        box = BoundingBox(LocalPoint(0, 0, -3), (4, 4, 4))
        assert subdivide(box, 2.0, 1, clamp_ground=True).origin.z == -3.0

    @pytest.mark.parametrize("d", [0, -1.0])
    def test_bad_cell_size(self, d):
        with pytest.raises(ValidationError):
            subdivide(_box((1, 1, 1)), d)

    @given(
        st.tuples(*[st.floats(0, 100)] * 3),
        st.floats(0.1, 10),
    )
    def test_covers_extent(self, extent, d):
        g = subdivide(_box(extent), d)
        assert all(n * d >= e - 1e-6 for n, e in zip(g.dims, extent))
        assert all(n >= 1 for n in g.dims)


GRID = GridSpec(LocalPoint(0, 0, 0), 2.0, (3, 4, 2))


class TestCells:
    def test_floor(self):
        assert point_to_cell(LocalPoint(3, 3, 1), GRID) == GridIndex(1, 1, 0)

    def test_origin(self):
        assert point_to_cell(LocalPoint(0, 0, 0), GRID) == GridIndex(0, 0, 0)

    def test_upper_corner_clamps(self):
        assert point_to_cell(LocalPoint(6, 8, 4), GRID) == GridIndex(2, 3, 1)

    def test_out_of_grid(self):
        with pytest.raises(ValidationError, match="out of grid"):
            point_to_cell(LocalPoint(6.5, 0, 0), GRID)
        with pytest.raises(ValidationError, match="out of grid"):
            point_to_cell(LocalPoint(-0.1, 0, 0), GRID)

    def test_centers(self):
        assert cell_center((0, 0, 0), GRID) == LocalPoint(1, 1, 1)
        assert cell_center((1, 1, 0), GRID) == LocalPoint(3, 3, 1)

    def test_center_out_of_range(self):
        with pytest.raises(ValidationError):
            cell_center((3, 0, 0), GRID)

    @pytest.mark.parametrize("grid", [
        GRID,
        GridSpec(LocalPoint(-17.3, 4.1, -0.7), 0.3, (5, 3, 4)),
        GridSpec(LocalPoint(1e3, -2e3, 15), 2.5, (2, 2, 7)),
    ])
    def test_round_trip(self, grid):
        for idx in grid.iter_indices():
            assert point_to_cell(cell_center(idx, grid), grid) == idx

    def test_linear_unravel(self):
        for n, idx in enumerate(GRID.iter_indices()):
            assert GRID.linear(idx) == n
            assert GRID.unravel(n) == idx
        assert GRID.cell_count == len(list(itertools.islice(GRID.iter_indices(), 100)))

    def test_bad_dims(self):
        with pytest.raises(ValidationError):
            GridSpec(LocalPoint(0, 0, 0), 1.0, (0, 1, 1))

    def test_non_finite_point(self):
        with pytest.raises(ValidationError):
            LocalPoint(math.inf, 0, 0)
