import cvxpy as cp
import numpy as np
import pytest

from aiplab.ellipsoids import (Ellipsoid, john_ellipsoid, john_point, loewner_ellipsoid,
                               loewner_point, mie, mvee, unit_ball_volume)
from aiplab.errors import DegenerateInput
from aiplab.geometry import AffineMap, HPolytope, VPolytope, affine_apply


def cvx_mvee(points):
    """Enclosing ellipsoid {x : |A x + b| <= 1} of maximal log det A^{-1}."""
    m, n = points.shape
    a = cp.Variable((n, n), PSD=True)
    b = cp.Variable(n)
    cons = [cp.norm(a @ x + b) <= 1 for x in points]
    cp.Problem(cp.Maximize(cp.log_det(a)), cons).solve(solver=cp.CLARABEL)
    av = a.value
    return Ellipsoid(-np.linalg.solve(av, b.value), av.T @ av)


def cvx_mie(normals, offsets):
    """Inscribed ellipsoid d + B(ball) of maximal log det B."""
    n = normals.shape[1]
    bm = cp.Variable((n, n), PSD=True)
    d = cp.Variable(n)
    cons = [cp.norm(bm @ u) + u @ d <= c for u, c in zip(normals, offsets)]
    cp.Problem(cp.Maximize(cp.log_det(bm)), cons).solve(solver=cp.CLARABEL)
    return Ellipsoid.from_factor(bm.value, d.value)


def regular_simplex(n):
    """Regular simplex centered at 0 with circumradius 1."""
    e = np.eye(n + 1) - 1.0 / (n + 1)
    _, _, vt = np.linalg.svd(e)
    v = e @ vt[:n].T
    return v / np.linalg.norm(v[0])


class TestEllipsoid:
    def test_volume_and_radii(self):
        e = Ellipsoid([1, 2], np.diag([1 / 4, 1 / 9]))
        np.testing.assert_allclose(e.radii, [2, 3])
        assert e.volume == pytest.approx(6 * np.pi)

    def test_factor_reproduces_shape(self, rng):
        a = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        e = Ellipsoid.from_factor(a, np.zeros(3))
        np.testing.assert_allclose(e.factor @ e.factor.T, a @ a.T, atol=1e-10)
        # boundary points lie on the quadric
        u = rng.standard_normal((10, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        np.testing.assert_allclose(e.quad(e.boundary(u)), 1.0, atol=1e-10)

    def test_not_positive_definite(self):
        with pytest.raises(DegenerateInput):
            Ellipsoid([0, 0], [[1, 0], [0, -1]])

    def test_ball_volumes(self):
        assert unit_ball_volume(1) == pytest.approx(2.0)
        assert unit_ball_volume(2) == pytest.approx(np.pi)
        assert unit_ball_volume(3) == pytest.approx(4 * np.pi / 3)


class TestMVEE:
    def test_square(self, square):
        e, rep = mvee(square.vertices)
        assert rep.converged
        np.testing.assert_allclose(e.center, 0, atol=1e-12)
        np.testing.assert_allclose(e.radii, [np.sqrt(2)] * 2, rtol=1e-7)

    @pytest.mark.parametrize("n", [2, 3])
    def test_regular_simplex_circumball(self, n):
        e, _ = mvee(regular_simplex(n))
        np.testing.assert_allclose(e.center, 0, atol=1e-9)
        np.testing.assert_allclose(e.radii, 1.0, rtol=1e-6)

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_convex_program(self, rng, n):
        for _ in range(3):
            pts = rng.standard_normal((15, n))
            e, rep = mvee(pts)
            ref = cvx_mvee(pts)
            assert rep.relative_gap <= 1e-6
            np.testing.assert_allclose(e.center, ref.center, atol=1e-5)
            assert e.volume == pytest.approx(ref.volume, rel=1e-5)
            assert np.max(e.quad(pts)) == pytest.approx(1.0, abs=1e-12)

    def test_equivariance(self, rng):
        pts = rng.standard_normal((20, 3))
        t = AffineMap.random(3, rng)
        e, _ = mvee(pts)
        f, _ = mvee(t(pts))
        np.testing.assert_allclose(f.center, t(e.center), atol=1e-6)
        assert f.volume == pytest.approx(abs(t.det) * e.volume, rel=1e-5)

    def test_flat_input(self):
        with pytest.raises(DegenerateInput):
            mvee(np.array([[0, 0], [1, 1], [2, 2.0]]))

    def test_bad_tolerance(self, square):
        with pytest.raises(ValueError):
            mvee(square.vertices, tol=0.5)


class TestMIE:
    def test_square(self, square):
        e, rep = john_ellipsoid(square)
        assert rep.converged
        np.testing.assert_allclose(e.center, 0, atol=1e-7)
        np.testing.assert_allclose(e.radii, 1.0, rtol=1e-6)

    @pytest.mark.parametrize("n", [2, 3])
    def test_regular_simplex_inball(self, n):
        e, _ = john_ellipsoid(VPolytope(regular_simplex(n)))
        np.testing.assert_allclose(e.center, 0, atol=1e-6)
        # the inradius of a regular simplex is 1/n of its circumradius
        np.testing.assert_allclose(e.radii, 1.0 / n, rtol=1e-5)

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_convex_program(self, rng, n):
        for _ in range(3):
            p = VPolytope(rng.standard_normal((12, n)))
            h = p.to_hpolytope()
            e, rep = mie(h)
            ref = cvx_mie(h.normals, h.offsets)
            np.testing.assert_allclose(e.center, ref.center, atol=1e-5)
            assert e.volume == pytest.approx(ref.volume, rel=1e-5)
            # inscribed: support of E stays below every facet offset
            assert np.all(e.support(h.normals) <= h.offsets + 1e-9)

    def test_redundant_halfspaces_do_not_matter(self):
        base = np.array([[1, 0], [-1, 0], [0, 1], [0, -1.0]])
        h1 = HPolytope.from_arrays(base, [1, 1, 1, 1])
        h2 = HPolytope.from_arrays(np.vstack([base, [[1, 1]]]), [1, 1, 1, 1, 5])
        np.testing.assert_allclose(mie(h1)[0].center, mie(h2)[0].center, atol=1e-7)

    def test_equivariance(self, rng, tetrahedron):
        t = AffineMap.random(3, rng)
        np.testing.assert_allclose(john_point(affine_apply(t, tetrahedron)),
                                   t(john_point(tetrahedron)), atol=1e-5)


def test_centers_of_simplex_are_centroid(triangle, tetrahedron):
    # every affine invariant point of a simplex is its centroid
    for body in (triangle, tetrahedron):
        np.testing.assert_allclose(john_point(body), body.centroid, atol=1e-6)
        np.testing.assert_allclose(loewner_point(body), body.centroid, atol=1e-6)


def test_loewner_contains_john(rng):
    p = VPolytope(rng.standard_normal((20, 2)))
    outer, _ = loewner_ellipsoid(p)
    inner, _ = john_ellipsoid(p)
    # John's theorem in the plane: vol ratio at most n^n = 4
    assert inner.volume <= p.volume <= outer.volume
    assert outer.volume <= 4.0 * inner.volume * (1 + 1e-6)
