"""Polytope algebra on vertex and halfspace representations.

Hulls and halfspace intersections go through Qhull (``scipy.spatial``); volumes,
centroids and moments are computed here by fan triangulation from the vertex
average, so they are exact up to rounding for any convex polytope.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

from ..errors import (CenterOutside, DegenerateInput, DimensionMismatch, EmptyClip,
                      EmptyPolytope, Unbounded, UnsupportedDimension)
from .affine import AffineMap

MERGE_RTOL = 1e-12
RANK_RTOL = 1e-10
EXACT_DIMS = (2, 3)


def _require_exact_dim(n):
    if n not in EXACT_DIMS:
        raise UnsupportedDimension(f"exact polytope algebra needs n in {EXACT_DIMS}, got {n}")


def _as_points(points) -> np.ndarray:
    p = np.array(points, dtype=float)
    if p.ndim != 2:
        raise DegenerateInput(f"expected an (m, n) array of points, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DegenerateInput("non-finite coordinates")
    return p


def _lexsort_rows(p):
    return np.lexsort(p.T[::-1])


def merge_close(points, rtol: float = MERGE_RTOL) -> np.ndarray:
    """Collapse points closer than ``rtol * diam``; keeps the lexicographically first."""
    p = _as_points(points)
    p = p[_lexsort_rows(p)]
    if len(p) < 2:
        return p
    span = float(np.max(np.ptp(p, axis=0)))
    if span == 0.0:
        return p[:1]
    pairs = cKDTree(p).query_pairs(rtol * span, output_type="ndarray")
    if len(pairs) == 0:
        return p
    keep = np.ones(len(p), dtype=bool)
    parent = np.arange(len(p))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            lo, hi = min(ri, rj), max(ri, rj)
            parent[hi] = lo
            keep[hi] = False
    return p[keep]


def affine_rank(points, rtol: float = RANK_RTOL):
    """Affine rank of a point set and, for rank n, the volume of what it spans.

    With exactly n+1 points the volume is that of the simplex; with more it is
    the volume of their convex hull.
    """
    p = _as_points(points)
    m, n = p.shape
    rank = _rank(p, rtol)
    if rank < n:
        return rank, 0.0
    if m == n + 1:
        return rank, abs(float(np.linalg.det(p[1:] - p[0]))) / factorial(n)
    return rank, VPolytope(p).volume


def _rank(p, rtol=RANK_RTOL):
    if len(p) == 1:
        return 0
    d = p[1:] - p[0]
    scale = float(np.max(np.abs(d)))
    if scale == 0.0:
        return 0
    s = np.linalg.svd(d, compute_uv=False)
    return int(np.sum(s > rtol * scale))


@dataclass(frozen=True)
class HalfSpace:
    """The set {x : <x, normal> <= offset}; the normal is stored unit length."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        u = np.array(self.normal, dtype=float).reshape(-1)
        nrm = np.linalg.norm(u)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise DegenerateInput("halfspace normal must be finite and nonzero")
        u = u / nrm
        u.setflags(write=False)
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", float(self.offset) / nrm)

    def contains(self, x, tol: float = 0.0) -> bool:
        return float(np.dot(x, self.normal)) <= self.offset + tol

    def opposite(self) -> "HalfSpace":
        return HalfSpace(-self.normal, -self.offset)


class HPolytope:
    """Bounded intersection of halfspaces with nonempty interior."""

    def __init__(self, halfspaces, check: bool = True):
        hs = list(halfspaces)
        if not hs:
            raise EmptyPolytope("no halfspaces")
        self.halfspaces = tuple(h if isinstance(h, HalfSpace) else HalfSpace(*h) for h in hs)
        self.dim = self.halfspaces[0].normal.size
        if any(h.normal.size != self.dim for h in self.halfspaces):
            raise DimensionMismatch("halfspaces of mixed dimension")
        if check:
            self.vpolytope  # noqa: B018  validates boundedness and interior

    @classmethod
    def from_arrays(cls, normals, offsets, check: bool = True) -> "HPolytope":
        return cls([HalfSpace(a, b) for a, b in zip(np.asarray(normals, float),
                                                   np.asarray(offsets, float))], check)

    @property
    def normals(self) -> np.ndarray:
        return np.array([h.normal for h in self.halfspaces])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([h.offset for h in self.halfspaces])

    @cached_property
    def vpolytope(self) -> "VPolytope":
        return enumerate_vertices(self)


def chebyshev_center(normals, offsets):
    """Largest inscribed ball of {Ax <= b} (unit rows): (center, radius)."""
    a = np.asarray(normals, float)
    b = np.asarray(offsets, float)
    n = a.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([a, np.ones((len(a), 1))])
    res = linprog(c, A_ub=a_ub, b_ub=b, bounds=[(None, None)] * n + [(0, None)],
                  method="highs")
    if res.status == 3:
        raise Unbounded("halfspace system admits arbitrarily large balls")
    if res.status != 0:
        raise EmptyPolytope(f"Chebyshev LP failed: {res.message}")
    return res.x[:n], float(res.x[-1])


def _check_bounded(normals, offsets):
    n = normals.shape[1]
    for i in range(n):
        for sgn in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sgn
            res = linprog(c, A_ub=normals, b_ub=offsets, bounds=[(None, None)] * n,
                          method="highs")
            if res.status == 3:
                raise Unbounded(f"unbounded along {'+' if sgn > 0 else '-'}e{i + 1}")
            if res.status == 2:
                raise EmptyPolytope("infeasible halfspace system")


def enumerate_vertices(h: HPolytope) -> "VPolytope":
    """Extreme points of a bounded H-polytope (n = 2, 3)."""
    _require_exact_dim(h.dim)
    a, b = h.normals, h.offsets
    _check_bounded(a, b)
    center, radius = chebyshev_center(a, b)
    scale = max(1.0, float(np.max(np.abs(b))))
    if radius <= 1e-12 * scale:
        raise EmptyPolytope("halfspace intersection has empty interior")
    return intersect_halfspaces(a, b, center)


def intersect_halfspaces(normals, offsets, interior_point) -> "VPolytope":
    a = np.asarray(normals, float)
    b = np.asarray(offsets, float)
    x0 = np.asarray(interior_point, float)
    if np.min(b - a @ x0) <= 0.0:
        raise CenterOutside("interior point violates a halfspace")
    try:
        hsi = HalfspaceIntersection(np.hstack([a, -b[:, None]]), x0)
    except QhullError as exc:
        raise EmptyPolytope(f"halfspace intersection failed: {exc}") from None
    pts = hsi.intersections
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    return VPolytope(pts)


class _Hull:
    """Facet data of a reduced vertex set, indices into the owning vertex array."""

    __slots__ = ("simplices", "normals", "offsets", "facet_normals", "facet_offsets")

    def __init__(self, simplices, equations):
        self.simplices = simplices
        self.normals = equations[:, :-1] + 0.0
        self.offsets = 0.0 - equations[:, -1]
        key = np.hstack([self.normals, self.offsets[:, None] /
                         max(1.0, float(np.max(np.abs(self.offsets))))])
        pairs = cKDTree(key).query_pairs(1e-10, output_type="ndarray")
        keep = np.ones(len(key), dtype=bool)
        for i, j in pairs:
            if keep[i]:
                keep[j] = False
        self.facet_normals = self.normals[keep]
        self.facet_offsets = self.offsets[keep]


class VPolytope:
    """Convex polytope stored by its extreme points in lexicographic order.

    The constructor reduces: interior and duplicate points are dropped, so
    ``VPolytope(points)`` is the canonical body of ``conv(points)``.
    """

    def __init__(self, points):
        p = merge_close(points)
        m, n = p.shape if p.ndim == 2 else (0, 0)
        if n < 1:
            raise DegenerateInput("empty point set")
        if m < n + 1:
            raise DegenerateInput(f"need at least {n + 1} points in R^{n}, got {m}")
        rank = _rank(p)
        if rank < n:
            raise DegenerateInput(f"affine rank {rank} < {n}")
        try:
            hull = ConvexHull(p)
        except QhullError as exc:
            raise DegenerateInput(f"qhull rejected the points: {exc}") from None
        idx = np.asarray(hull.vertices)
        verts = p[idx]
        order = _lexsort_rows(verts)
        verts = np.ascontiguousarray(verts[order])
        remap = np.empty(len(p), dtype=np.intp)
        remap[idx[order]] = np.arange(len(idx))
        verts.setflags(write=False)
        self.vertices = verts
        self._hull = _Hull(remap[hull.simplices], hull.equations)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"VPolytope(dim={self.dim}, vertices={len(self)})"

    @property
    def simplices(self) -> np.ndarray:
        return self._hull.simplices

    @property
    def facet_normals(self) -> np.ndarray:
        """Unit outward normals, one per geometric facet."""
        return self._hull.facet_normals

    @property
    def facet_offsets(self) -> np.ndarray:
        return self._hull.facet_offsets

    def to_hpolytope(self) -> HPolytope:
        return HPolytope.from_arrays(self.facet_normals, self.facet_offsets, check=False)

    @cached_property
    def edges(self) -> np.ndarray:
        s = self.simplices
        if self.dim == 2:
            e = np.sort(s, axis=1)
        else:
            k = s.shape[1]
            e = np.sort(np.vstack([s[:, [i, j]] for i in range(k) for j in range(i + 1, k)]),
                        axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def _moments(self):
        return _fan_moments(self.vertices, self.simplices)

    @property
    def volume(self) -> float:
        return self._moments[0]

    @property
    def centroid(self) -> np.ndarray:
        vol, first, _ = self._moments
        return first / vol

    @property
    def second_moment(self) -> np.ndarray:
        """Integral of x x^T over the body (about the origin)."""
        return self._moments[2]

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        best = 0.0
        for start in range(0, len(v), 512):
            blk = v[start:start + 512]
            d2 = np.sum((blk[:, None, :] - v[None, :, :]) ** 2, axis=2)
            best = max(best, float(np.max(d2)))
        return best ** 0.5

    def slack(self, x) -> np.ndarray:
        """Facet slacks b - <a, x>; all positive iff x is interior."""
        return self.facet_offsets - np.asarray(x, float) @ self.facet_normals.T

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.min(self.slack(x)) >= -tol)

    def is_interior(self, x, rtol: float = 1e-12) -> bool:
        return bool(np.min(self.slack(x)) > rtol * max(self.diameter, 1e-300))


def reduce(points) -> VPolytope:
    """Hull of ``points`` keeping only extreme points, canonically ordered."""
    return VPolytope(points)


def _fan_moments(vertices, simplices):
    """Volume, first moment and second moment by fan triangulation."""
    n = vertices.shape[1]
    c = vertices.mean(axis=0)
    tri = vertices[simplices] - c                      # (F, n, n)
    vols = np.abs(np.linalg.det(tri)) / factorial(n)
    vol = float(np.sum(vols))
    if not vol > 0.0:
        raise DegenerateInput("zero volume")
    # simplex with vertices c, c + tri[k]: centroid c + sum(tri)/(n+1)
    sums = tri.sum(axis=1)
    first_local = (vols[:, None] * sums).sum(axis=0) / (n + 1)
    first = first_local + vol * c
    # second moment of a simplex with vertices a_0..a_n:
    #   vol/((n+1)(n+2)) * (sum a_i a_i^T + (sum a_i)(sum a_i)^T)
    outer = np.einsum("fki,fkj->fij", tri, tri) + np.einsum("fi,fj->fij", sums, sums)
    second_local = np.einsum("f,fij->ij", vols, outer) / ((n + 1) * (n + 2))
    second = (second_local + np.outer(first_local, c) + np.outer(c, first_local)
              + vol * np.outer(c, c))
    return vol, first, second


def volume(p: VPolytope) -> float:
    return p.volume


def centroid(p: VPolytope) -> np.ndarray:
    return p.centroid


def support(p: VPolytope, u) -> float:
    return float(np.max(p.vertices @ np.asarray(u, float)))


def affine_apply(t: AffineMap, p: VPolytope) -> VPolytope:
    if t.dim != p.dim:
        raise DimensionMismatch(f"map of dim {t.dim} on body of dim {p.dim}")
    return VPolytope(t(p.vertices))


def translate(p: VPolytope, x) -> VPolytope:
    return affine_apply(AffineMap.translation_by(x), p)


def clip(p: VPolytope, h: HalfSpace) -> VPolytope:
    """Exact ``P ∩ {<x,u> <= a}`` (n = 2, 3)."""
    _require_exact_dim(p.dim)
    if h.normal.size != p.dim:
        raise DimensionMismatch("halfspace and body differ in dimension")
    v = p.vertices
    heights = v @ h.normal - h.offset
    keep = v[heights <= 0.0]
    e = p.edges
    ha, hb = heights[e[:, 0]], heights[e[:, 1]]
    cross = (ha < 0.0) & (hb > 0.0) | (ha > 0.0) & (hb < 0.0)
    if np.any(cross):
        ea, eb = v[e[cross, 0]], v[e[cross, 1]]
        lam = (ha[cross] / (ha[cross] - hb[cross]))[:, None]
        keep = np.vstack([keep, ea + lam * (eb - ea)])
    if len(keep) < p.dim + 1:
        raise EmptyClip("halfspace removes the body")
    try:
        return VPolytope(keep)
    except DegenerateInput:
        raise EmptyClip("clip leaves no interior") from None


def polar(p: VPolytope, x=None) -> VPolytope:
    """Polar body with respect to ``x``: ``(P - x)° + x``.

    The vertices of the polar are the facet normals of ``P - x`` divided by
    their offsets, so no vertex enumeration is needed.
    """
    _require_exact_dim(p.dim)
    x = np.zeros(p.dim) if x is None else np.asarray(x, float)
    slack = p.slack(x)
    if np.min(slack) <= 1e-12 * p.diameter:
        raise CenterOutside("polar center is not interior")
    return VPolytope(p.facet_normals / slack[:, None] + x)


def gauge(p: VPolytope, x0, y) -> float:
    """Minkowski functional of ``P - x0`` evaluated at ``y - x0``."""
    x0 = np.asarray(x0, float)
    slack = p.slack(x0)
    if np.min(slack) <= 1e-12 * p.diameter:
        raise CenterOutside("gauge center is not interior")
    val = (p.facet_normals @ (np.asarray(y, float) - x0)) / slack
    return max(0.0, float(np.max(val)))


def _perp_basis(u):
    """Orthonormal basis of u-perp as rows."""
    u = np.asarray(u, float)
    _, _, vt = np.linalg.svd(u[None, :])
    return vt[1:]


def section_measure(p: VPolytope, u, t: float) -> float:
    """(n-1)-volume of ``P ∩ {<x,u> = t}`` (closed section, n = 2, 3)."""
    _require_exact_dim(p.dim)
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    v = p.vertices
    hgt = v @ u - t
    tol = 1e-13 * max(p.diameter, 1.0)
    on = v[np.abs(hgt) <= tol]
    e = p.edges
    ha, hb = hgt[e[:, 0]], hgt[e[:, 1]]
    cross = ((ha < -tol) & (hb > tol)) | ((ha > tol) & (hb < -tol))
    ea, eb = v[e[cross, 0]], v[e[cross, 1]]
    lam = (ha[cross] / (ha[cross] - hb[cross]))[:, None]
    pts = np.vstack([on, ea + lam * (eb - ea)])
    if len(pts) < p.dim:
        return 0.0
    w = pts @ _perp_basis(u).T
    if p.dim == 2:
        return float(np.ptp(w[:, 0]))
    w = merge_close(w)
    if len(w) < 3 or _rank(w) < 2:
        return 0.0
    return float(ConvexHull(w).volume)


def _point_segment_dist(x, a, b):
    """Distances from points x (m, n) to segments [a, b] (k, n): (m, k)."""
    d = b - a
    dd = np.einsum("ki,ki->k", d, d)
    rel = x[:, None, :] - a[None, :, :]
    s = np.clip(np.einsum("mki,ki->mk", rel, d) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    diff = rel - s[:, :, None] * d[None, :, :]
    return np.sqrt(np.einsum("mki,mki->mk", diff, diff))


def _point_triangle_dist(x, tri):
    """Distances from points x (m, 3) to triangles tri (k, 3, 3): (m, k)."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    nrm = np.cross(b - a, c - a)
    nn = np.linalg.norm(nrm, axis=1)
    nrm = nrm / np.where(nn > 0, nn, 1.0)[:, None]
    rel = x[:, None, :] - a[None]
    plane = np.einsum("mki,ki->mk", rel, nrm)
    proj = rel - plane[:, :, None] * nrm[None]
    e0, e1 = b - a, c - a
    d00 = np.einsum("ki,ki->k", e0, e0)
    d01 = np.einsum("ki,ki->k", e0, e1)
    d11 = np.einsum("ki,ki->k", e1, e1)
    d20 = np.einsum("mki,ki->mk", proj, e0)
    d21 = np.einsum("mki,ki->mk", proj, e1)
    den = d00 * d11 - d01 * d01
    den = np.where(den > 0, den, 1.0)
    bv = (d11 * d20 - d01 * d21) / den
    bw = (d00 * d21 - d01 * d20) / den
    inside = (bv >= 0) & (bw >= 0) & (bv + bw <= 1) & (nn > 0)
    edge = np.minimum(np.minimum(_point_segment_dist(x, a, b), _point_segment_dist(x, b, c)),
                      _point_segment_dist(x, c, a))
    return np.where(inside, np.abs(plane), edge)


def distance_to(p: VPolytope, x) -> np.ndarray:
    """Euclidean distance from each row of ``x`` to ``P`` (0 inside)."""
    _require_exact_dim(p.dim)
    x = np.atleast_2d(np.asarray(x, float))
    out = np.empty(len(x))
    faces = p.vertices[p.simplices]
    for start in range(0, len(x), 256):
        blk = x[start:start + 256]
        if p.dim == 2:
            d = _point_segment_dist(blk, faces[:, 0], faces[:, 1])
        else:
            d = _point_triangle_dist(blk, faces)
        dist = np.min(d, axis=1)
        inside = np.max(blk @ p.facet_normals.T - p.facet_offsets, axis=1) <= 0.0
        out[start:start + 256] = np.where(inside, 0.0, dist)
    return out


def hausdorff(p: VPolytope, q: VPolytope) -> float:
    """Hausdorff distance; distance to a convex body is convex, so vertices suffice."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"dimensions {p.dim} and {q.dim}")
    return float(max(np.max(distance_to(q, p.vertices)), np.max(distance_to(p, q.vertices))))
