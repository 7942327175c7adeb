import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from aiplab.errors import (BodyFormatError, CenterOutside, DegenerateInput, EmptyClip,
                           EmptyPolytope, SingularMap, Unbounded)
from aiplab.geometry import (AffineMap, DirectionNet, HalfSpace, HPolytope, VPolytope,
                             affine_apply, affine_rank, clip, distance_to, enumerate_vertices,
                             gauge, hausdorff, polar, read_body, reduce, section_measure,
                             support, write_body)
from aiplab.geometry.bodyio import loads_body

from conftest import regular_polygon


def shoelace(poly):
    """Area and centroid of a simple polygon from its ordered boundary."""
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cr = x * ys - xs * y
    area = 0.5 * cr.sum()
    cx = ((x + xs) * cr).sum() / (6 * area)
    cy = ((y + ys) * cr).sum() / (6 * area)
    return abs(area), np.array([cx, cy])


def ccw_order(points):
    c = points.mean(axis=0)
    return points[np.argsort(np.arctan2(points[:, 1] - c[1], points[:, 0] - c[0]))]


class TestReduce:
    def test_drops_interior_and_duplicates(self):
        p = reduce([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [1, 1], [0.5, 0]])
        assert len(p) == 4
        np.testing.assert_array_equal(p.vertices, [[0, 0], [0, 1], [1, 0], [1, 1]])

    def test_order_is_canonical(self, rng):
        pts = rng.standard_normal((30, 2))
        a = reduce(pts)
        b = reduce(pts[rng.permutation(30)])
        np.testing.assert_array_equal(a.vertices, b.vertices)

    def test_collinear_rejected(self):
        with pytest.raises(DegenerateInput):
            VPolytope([[0, 0], [1, 1], [2, 2]])

    def test_nonfinite_rejected(self):
        with pytest.raises(DegenerateInput):
            VPolytope([[0, 0], [1, 0], [np.nan, 1]])


class TestMoments:
    def test_polygon_matches_shoelace(self, rng):
        for _ in range(20):
            p = VPolytope(rng.standard_normal((15, 2)))
            area, cen = shoelace(ccw_order(p.vertices))
            assert p.volume == pytest.approx(area, rel=1e-13)
            np.testing.assert_allclose(p.centroid, cen, atol=1e-13)

    def test_polyhedron_volume_matches_qhull(self, rng):
        for _ in range(10):
            pts = rng.standard_normal((25, 3))
            assert VPolytope(pts).volume == pytest.approx(ConvexHull(pts).volume, rel=1e-12)

    def test_cube_and_simplex(self, cube, tetrahedron):
        assert cube.volume == pytest.approx(1.0, rel=1e-14)
        np.testing.assert_allclose(cube.centroid, [0.5, 0.5, 0.5], atol=1e-14)
        assert tetrahedron.volume == pytest.approx(1 / 6, rel=1e-14)
        np.testing.assert_allclose(tetrahedron.centroid, [0.25] * 3, atol=1e-14)

    def test_house_decomposition(self):
        house = VPolytope([[0, 0], [2, 0], [2, 2], [1, 3], [0, 2]])
        # square [0,2]^2 (area 4, centroid (1,1)) plus triangle (area 1, centroid (1, 7/3))
        expect = (4 * np.array([1, 1]) + 1 * np.array([1, 7 / 3])) / 5
        assert house.volume == pytest.approx(5.0)
        np.testing.assert_allclose(house.centroid, expect, atol=1e-14)

    def test_second_moment_of_square(self, square):
        np.testing.assert_allclose(square.second_moment, np.eye(2) * 4 / 3, atol=1e-14)


class TestClip:
    def test_cube_corner(self, cube):
        corner = clip(cube, HalfSpace([1, 1, 1], 1.0))
        assert corner.volume == pytest.approx(1 / 6, rel=1e-13)
        assert len(corner) == 4

    def test_keeps_whole_body(self, square):
        assert clip(square, HalfSpace([1, 0], 5.0)).volume == pytest.approx(4.0)

    def test_empty(self, square):
        with pytest.raises(EmptyClip):
            clip(square, HalfSpace([1, 0], -2.0))

    def test_two_sides_sum(self, rng):
        p = VPolytope(rng.standard_normal((20, 3)))
        h = HalfSpace(rng.standard_normal(3), 0.1)
        a, b = clip(p, h), clip(p, h.opposite())
        assert a.volume + b.volume == pytest.approx(p.volume, rel=1e-12)


class TestHRepresentation:
    def test_cube_vertices(self):
        a = np.vstack([np.eye(3), -np.eye(3)])
        h = HPolytope.from_arrays(a, [1, 1, 1, 0, 0, 0])
        v = enumerate_vertices(h)
        expect = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
        np.testing.assert_allclose(v.vertices, expect, atol=1e-12)

    def test_round_trip(self, rng):
        p = VPolytope(rng.standard_normal((12, 3)))
        q = p.to_hpolytope().vpolytope
        assert hausdorff(p, q) < 1e-10

    def test_unbounded(self):
        with pytest.raises(Unbounded):
            HPolytope.from_arrays([[1, 0], [0, 1]], [1, 1])

    def test_empty(self):
        with pytest.raises(EmptyPolytope):
            HPolytope.from_arrays([[1, 0], [-1, 0], [0, 1], [0, -1]], [0, -1, 1, 1])


class TestPolar:
    def test_square_gives_cross_polytope(self, square):
        q = polar(square)
        np.testing.assert_allclose(q.vertices, [[-1, 0], [0, -1], [0, 1], [1, 0]], atol=1e-15)
        assert q.volume == pytest.approx(2.0)

    def test_involution(self, rng):
        p = VPolytope(rng.standard_normal((20, 3)))
        x = p.centroid
        assert hausdorff(polar(polar(p, x), x), p) < 1e-10

    def test_off_center_matches_definition(self, square):
        # (P - x)° + x for x = (0.5, 0): the facet x <= 1 becomes the vertex (2, 0) + x
        q = polar(square, [0.5, 0])
        assert support(q, [1, 0]) == pytest.approx(2.0 + 0.5)
        assert support(q, [-1, 0]) == pytest.approx(2 / 3 - 0.5)

    def test_center_must_be_interior(self, square):
        with pytest.raises(CenterOutside):
            polar(square, [1, 0])


class TestDistances:
    def test_shifted_square(self, square):
        assert hausdorff(square, affine_apply(AffineMap.translation_by([0.3, 0]), square)) \
            == pytest.approx(0.3)

    def test_square_and_cross(self, square):
        assert hausdorff(square, polar(square)) == pytest.approx(np.sqrt(0.5))

    def test_distance_to_cube(self, cube):
        d = distance_to(cube, [[0.5, 0.5, 0.5], [2, 0.5, 0.5], [2, 2, 0.5], [2, 2, 2]])
        np.testing.assert_allclose(d, [0, 1, np.sqrt(2), np.sqrt(3)], atol=1e-14)

    def test_hausdorff_is_symmetric_and_zero_on_self(self, rng):
        p = VPolytope(rng.standard_normal((10, 3)))
        q = VPolytope(rng.standard_normal((10, 3)))
        assert hausdorff(p, p) == 0.0
        assert hausdorff(p, q) == pytest.approx(hausdorff(q, p))

    def test_hausdorff_by_sampling(self, rng):
        # brute force: dense boundary samples of both polygons
        p = VPolytope(rng.standard_normal((8, 2)))
        q = VPolytope(rng.standard_normal((8, 2)) + 0.3)

        def boundary(poly, k=4000):
            v = ccw_order(poly.vertices)
            w = np.roll(v, -1, axis=0)
            s = np.linspace(0, 1, k // len(v), endpoint=False)[:, None, None]
            return (v + s * (w - v)).reshape(-1, 2)

        bp, bq = boundary(p), boundary(q)
        d = np.linalg.norm(bp[:, None] - bq[None], axis=2)
        # the sup over each body of the distance to the other is attained on the boundary
        inside_p = np.array([p.contains(x, 1e-12) for x in bq])
        inside_q = np.array([q.contains(x, 1e-12) for x in bp])
        one = np.where(inside_q, 0, d.min(axis=1)).max()
        two = np.where(inside_p, 0, d.min(axis=0)).max()
        assert hausdorff(p, q) == pytest.approx(max(one, two), abs=2e-3)


class TestGaugeAndSections:
    def test_gauge(self, square):
        assert gauge(square, [0, 0], [0.5, 0.2]) == pytest.approx(0.5)
        assert gauge(square, [0, 0], [0, 0]) == 0.0
        assert gauge(square, [0.5, 0], [1, 0]) == pytest.approx(1.0)
        with pytest.raises(CenterOutside):
            gauge(square, [1, 1], [0, 0])

    def test_cube_sections(self, cube):
        assert section_measure(cube, [1, 0, 0], 0.5) == pytest.approx(1.0)
        # the diagonal section through the center is a regular hexagon of side 1/sqrt(2)
        hexagon = 3 * np.sqrt(3) / 2 * 0.5
        assert section_measure(cube, [1, 1, 1], np.sqrt(3) / 2) == pytest.approx(hexagon)
        assert section_measure(cube, [1, 0, 0], 2.0) == 0.0

    def test_triangle_sections(self, triangle):
        for t in np.linspace(0.05, 0.95, 7):
            assert section_measure(triangle, [1, 0], t) == pytest.approx(1 - t)

    def test_sections_integrate_to_volume(self, rng):
        p = VPolytope(rng.standard_normal((15, 3)))
        u = np.array([0.3, -0.5, 0.8])
        u /= np.linalg.norm(u)
        h = p.vertices @ u
        t, w = np.polynomial.legendre.leggauss(200)
        # sections are piecewise quadratic, so integrate piece by piece
        knots = np.unique(h)
        total = 0.0
        for a, b in zip(knots, knots[1:]):
            xs = 0.5 * (b - a) * t + 0.5 * (a + b)
            total += 0.5 * (b - a) * np.dot(w, [section_measure(p, u, x) for x in xs])
        assert total == pytest.approx(p.volume, rel=1e-10)


class TestAffineRank:
    def test_ranks(self):
        assert affine_rank([[0, 0], [1, 1], [2, 2]]) == (1, 0.0)
        r, v = affine_rank([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert r == 3 and v == pytest.approx(1 / 6)
        assert affine_rank([[1, 2], [1, 2]])[0] == 0


class TestAffineMaps:
    def test_random_is_well_conditioned(self, rng):
        for n in (2, 3):
            for _ in range(20):
                t = AffineMap.random(n, rng)
                assert t.cond <= 10.0 + 1e-9

    def test_singular(self):
        with pytest.raises(SingularMap):
            AffineMap(np.zeros((2, 2)), np.zeros(2))

    def test_inverse_and_compose(self, rng):
        t = AffineMap.random(3, rng)
        s = AffineMap.random(3, rng)
        x = rng.standard_normal((5, 3))
        np.testing.assert_allclose(t.inverse()(t(x)), x, atol=1e-12)
        np.testing.assert_allclose(t.compose(s)(x), t(s(x)), atol=1e-12)


class TestNets:
    @pytest.mark.parametrize("size", [16, 512])
    def test_planar_mesh(self, size):
        net = DirectionNet(2, size)
        assert len(net) == size
        assert net.mesh == pytest.approx(2 * np.sin(np.pi / (2 * size)))

    def test_spatial_net_is_symmetric_and_covers(self):
        net = DirectionNet(3, 512)
        d = net.directions
        assert np.all(np.isclose(np.linalg.norm(d, axis=1), 1.0))
        # every direction has its antipode in the net
        assert np.max(np.min(np.linalg.norm(d[:, None] + d[None], axis=2), axis=1)) < 1e-12
        probe = np.random.default_rng(0).standard_normal((5000, 3))
        probe /= np.linalg.norm(probe, axis=1, keepdims=True)
        worst = np.max(np.min(np.linalg.norm(probe[:, None] - d[None], axis=2), axis=1))
        assert worst <= net.mesh + 1e-12


class TestBodyIO:
    def test_round_trip_is_exact(self, tmp_path, rng):
        p = VPolytope(rng.standard_normal((9, 3)))
        path = tmp_path / "body.json"
        write_body(p, path)
        np.testing.assert_array_equal(read_body(path).vertices, p.vertices)

    def test_hpolytope(self):
        doc = {"dim": 2, "kind": "hpolytope", "halfspaces": [
            {"normal": [1, 0], "offset": 1}, {"normal": [-1, 0], "offset": 1},
            {"normal": [0, 1], "offset": 1}, {"normal": [0, -1], "offset": 1}]}
        h = loads_body(json.dumps(doc))
        assert h.vpolytope.volume == pytest.approx(4.0)

    @pytest.mark.parametrize("text, field", [
        ('{"dim": 2, "kind": "vpolytope"}', "vertices"),
        ('{"dim": 2, "kind": "ball", "vertices": [[0, 0]]}', "kind"),
        ('{"dim": 2, "kind": "vpolytope", "vertices": [[0, 0], [1, 0], [2, 0]]}', "vertices"),
        ('{"dim": 2, "kind": "vpolytope", "vertices": [[0, 0], [1], [0, 1]]}', "vertices[1]"),
        ('{"dim": 2', "line 1"),
    ])
    def test_errors_name_the_field(self, text, field):
        with pytest.raises(BodyFormatError) as info:
            loads_body(text)
        assert field in str(info.value)


# ------------------------------------------------------------------ properties


def planar_bodies():
    coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(coords, coords), min_size=3, max_size=25).filter(
        lambda pts: affine_rank(np.array(pts))[0] == 2 and affine_rank(np.array(pts))[1] > 1e-3)


@settings(max_examples=60, deadline=None)
@given(planar_bodies(), st.integers(0, 2 ** 32 - 1))
def test_volume_and_centroid_transform(points, seed):
    p = VPolytope(points)
    t = AffineMap.random(2, np.random.default_rng(seed))
    q = affine_apply(t, p)
    assert q.volume == pytest.approx(abs(t.det) * p.volume, rel=1e-9)
    np.testing.assert_allclose(q.centroid, t(p.centroid), atol=1e-9 * q.diameter)


@settings(max_examples=60, deadline=None)
@given(planar_bodies())
def test_vertices_are_extreme(points):
    p = VPolytope(points)
    pts = np.array(points)
    assert np.all(p.slack(pts.mean(axis=0)) >= -1e-12)
    for i in range(len(p)):
        others = np.delete(p.vertices, i, axis=0)
        if len(others) >= 3 and affine_rank(others)[0] == 2:
            assert VPolytope(others).volume < p.volume


def test_regular_polygon_area():
    for k in (3, 6, 100):
        p = regular_polygon(k)
        assert p.volume == pytest.approx(0.5 * k * np.sin(2 * np.pi / k))
