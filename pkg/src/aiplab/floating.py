"""Convex floating bodies, floating centroids and the Schütt-Werner functional.

Cut volumes ``V(t) = vol(P ∩ {<x,u> >= t})`` are evaluated in closed form:
with the origin ``o`` placed on the cutting plane, the divergence theorem gives

    V(t) = (1/n) * sum_F (b_F - <o, nu_F>) * area_F * frac_F(t)

over the boundary simplices F of P, where ``frac_F(t)`` is the fraction of F
lying above the plane (linear along a segment, piecewise quadratic on a
triangle). Taking ``o`` below the highest vertex keeps every term of the
size of the cap itself, so tiny caps do not suffer cancellation. ``V`` and ``V'`` are cheap for many directions at once, which
makes a safeguarded Newton iteration the natural root finder.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ._parallel import ordered_map
from .ellipsoids import unit_ball_volume
from .errors import (CenterOutside, DegenerateDifference, DimensionMismatch,
                     EmptyFloatingBody, EmptyPolytope, InadmissibleParameters)
from .geometry.nets import DirectionNet
from .geometry.polytope import (VPolytope, _require_exact_dim,
                                chebyshev_center, intersect_halfspaces, section_measure)

DEFAULT_VOL_TOL = 1e-9
MAX_ITER = 200
CHUNK = 1_000_000
DEFAULT_NET_SIZE = {2: 512, 3: 2048}


def delta_bound(n: int) -> float:
    """Upper end of the admissible range for delta."""
    return (n / (n + 1.0)) ** n


def default_net(n: int) -> DirectionNet:
    return DirectionNet(n, DEFAULT_NET_SIZE[n])


@dataclass(frozen=True, eq=False)
class FloatingParams:
    """Floating body parameters.

    Parameters
    ----------
    delta : float
        Fraction of the volume cut off by each halfspace, in
        ``(0, (n/(n+1))^n)``.
    net : DirectionNet
        Directions of the cutting halfspaces.
    vol_tol : float
        Relative accuracy of each cut volume.
    """

    delta: float
    net: DirectionNet
    vol_tol: float = DEFAULT_VOL_TOL

    def __post_init__(self):
        n = self.net.dim
        if not 0.0 < self.delta < delta_bound(n):
            raise InadmissibleParameters(
                f"delta={self.delta!r} outside (0, {delta_bound(n):.6g}) for n={n}")
        if not 0.0 < self.vol_tol <= 1e-6:
            raise InadmissibleParameters(f"vol_tol={self.vol_tol!r} outside (0, 1e-6]")

    def with_net(self, net: DirectionNet) -> "FloatingParams":
        return FloatingParams(self.delta, net, self.vol_tol)

    def with_delta(self, delta: float) -> "FloatingParams":
        return FloatingParams(delta, self.net, self.vol_tol)


class _CutData:
    """Boundary simplices of P in coordinates centered at its centroid."""

    def __init__(self, p: VPolytope):
        _require_exact_dim(p.dim)
        self.n = p.dim
        self.shift = p.centroid
        self.verts = p.vertices - self.shift
        self.simplices = p.simplices
        hull = p._hull
        self.normals = hull.normals
        self.offsets = hull.offsets - self.normals @ self.shift
        faces = self.verts[self.simplices]
        if self.n == 2:
            self.areas = np.linalg.norm(faces[:, 1] - faces[:, 0], axis=1)
        else:
            self.areas = 0.5 * np.linalg.norm(
                np.cross(faces[:, 1] - faces[:, 0], faces[:, 2] - faces[:, 0]), axis=1)
        self.volume = p.volume
        self.scale = p.diameter

    def chunk(self, dirs):
        hv = self.verts @ dirs.T                           # (V, D)
        hs = np.sort(hv[self.simplices], axis=1)           # (F, k, D)
        cos = self.normals @ dirs.T                        # (F, D)
        top = np.argmax(hv, axis=0)
        htop = hv[top, np.arange(len(dirs))]
        # b_F - <v_top, nu_F>: zero on the facets through the top vertex
        rel = self.offsets[:, None] - self.normals @ self.verts[top].T
        return hv, (hs, cos, rel, htop)

    def evaluate(self, hs, cos, rel, htop, t):
        """Cut volume and its derivative for each direction at levels ``t``."""
        lo, hi = hs[:, 0], hs[:, -1]
        tt = t[None, :]
        if self.n == 2:
            w = hi - lo
            safe = np.where(w > 0, w, 1.0)
            frac = np.where(w > 0, np.clip((hi - tt) / safe, 0.0, 1.0), (tt < lo) * 1.0)
            dfrac = np.where((lo < tt) & (tt < hi), -1.0 / safe, 0.0)
        else:
            mid = hs[:, 1]
            w = hi - lo
            upper = (hi - lo) * (hi - mid)
            lower = (hi - lo) * (mid - lo)
            su = np.where(upper > 0, upper, 1.0)
            sl = np.where(lower > 0, lower, 1.0)
            above = (tt >= mid) & (tt < hi)
            below = (tt > lo) & (tt < mid)
            frac = np.where(tt >= hi, 0.0, np.where(tt <= lo, 1.0, 0.0))
            frac = np.where(above, (hi - tt) ** 2 / su, frac)
            frac = np.where(below, 1.0 - (tt - lo) ** 2 / sl, frac)
            dfrac = np.where(above, -2.0 * (hi - tt) / su, 0.0)
            dfrac = np.where(below, -2.0 * (tt - lo) / sl, dfrac)
            frac = np.where(w > 0, frac, (tt < lo) * 1.0)
        dist = rel + (htop - t)[None, :] * cos
        wa = self.areas[:, None]
        vol = np.sum(dist * wa * frac, axis=0) / self.n
        dvol = np.sum(wa * (dist * dfrac - cos * frac), axis=0) / self.n
        return vol, dvol


def _solve_chunk(data: _CutData, dirs, target, vol_tol):
    hv, (hs, cos, rel, htop) = data.chunk(dirs)
    lo = hv.min(axis=0)
    hi = hv.max(axis=0)
    t = 0.5 * (lo + hi)
    # volume above is decreasing in t: keep V(lo) >= target >= V(hi)
    goal = 1e-3 * vol_tol * data.volume
    width_floor = 8.0 * np.finfo(float).eps * max(data.scale, 1e-300)
    active = np.ones(len(dirs), dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        v, dv = data.evaluate(hs[:, :, idx], cos[:, idx], rel[:, idx], htop[idx], t[idx])
        err = v - target
        above = err > 0.0
        lo[idx] = np.where(above, t[idx], lo[idx])
        hi[idx] = np.where(above, hi[idx], t[idx])
        done = (np.abs(err) <= goal) | (hi[idx] - lo[idx] <= width_floor)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t[idx] - err / dv
        ok = np.isfinite(newton) & (newton > lo[idx]) & (newton < hi[idx])
        nxt = np.where(ok, newton, 0.5 * (lo[idx] + hi[idx]))
        t[idx] = np.where(done, t[idx], nxt)
        active[idx[done]] = False
    return t


def cut_offsets(p: VPolytope, directions, delta: float, vol_tol: float = DEFAULT_VOL_TOL,
                data: _CutData | None = None) -> np.ndarray:
    """Levels ``a(u)`` with ``vol(P ∩ {<x,u> >= a(u)}) = delta * vol(P)`` for many u."""
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    if dirs.shape[1] != p.dim:
        raise DimensionMismatch("directions and body differ in dimension")
    if not 0.0 < delta < 1.0:
        raise InadmissibleParameters(f"delta={delta!r} outside (0, 1)")
    data = data or _CutData(p)
    target = delta * data.volume
    per = max(1, CHUNK // max(len(data.simplices), 1))
    chunks = [dirs[i:i + per] for i in range(0, len(dirs), per)]
    parts = ordered_map(lambda d: _solve_chunk(data, d, target, vol_tol), chunks)
    return np.concatenate(parts) + dirs @ data.shift


def cut_offset(p: VPolytope, u, delta: float, vol_tol: float = DEFAULT_VOL_TOL) -> float:
    """The level ``a_delta(u)`` cutting off the fraction ``delta`` of ``vol(P)``."""
    return float(cut_offsets(p, np.asarray(u, float)[None, :], delta, vol_tol)[0])


def cut_volume(p: VPolytope, u, t: float) -> float:
    """``vol(P ∩ {<x,u> >= t})`` in closed form."""
    data = _CutData(p)
    u = np.asarray(u, float)[None, :]
    u = u / np.linalg.norm(u)
    _, parts = data.chunk(u)
    v, _ = data.evaluate(*parts, np.array([t - float(u[0] @ data.shift)]))
    return float(v[0])


def floating_body(p: VPolytope, params: FloatingParams) -> VPolytope:
    """Intersection of P with the halfspaces ``{<x,u> <= a_delta(u)}``, u in the net."""
    _require_exact_dim(p.dim)
    if params.net.dim != p.dim:
        raise DimensionMismatch("net and body differ in dimension")
    dirs = params.net.directions
    a = cut_offsets(p, dirs, params.delta, params.vol_tol)
    normals = np.vstack([p.facet_normals, dirs])
    offsets = np.concatenate([p.facet_offsets, a])
    x0 = p.centroid
    slack = offsets - normals @ x0
    scale = max(p.diameter, 1e-300)
    if np.min(slack) <= 1e-12 * scale:
        try:
            x0, rho = chebyshev_center(normals, offsets)
        except EmptyPolytope:
            raise EmptyFloatingBody("net halfspaces have empty intersection") from None
        if rho <= 1e-12 * scale:
            raise EmptyFloatingBody("net floating body has empty interior")
    try:
        return intersect_halfspaces(normals, offsets, x0)
    except (EmptyPolytope, CenterOutside) as exc:
        raise EmptyFloatingBody(str(exc)) from None


@dataclass(frozen=True, eq=False)
class FloatingSplit:
    """``K`` split into ``K_delta`` and the rim ``K minus K_delta``."""

    body: VPolytope
    volume: float
    centroid: np.ndarray
    rest_volume: float
    rest_centroid: np.ndarray


def floating_split(p: VPolytope, params: FloatingParams) -> FloatingSplit:
    kd = floating_body(p, params)
    vol, g = p.volume, p.centroid
    vd, gd = kd.volume, kd.centroid
    diff = vol - vd
    if diff <= 10.0 * params.vol_tol * vol:
        raise DegenerateDifference(
            f"|K| - |K_delta| = {diff:.3g} is below the cut-volume resolution")
    return FloatingSplit(kd, vd, gd, diff, (vol * g - vd * gd) / diff)


def floating_centroid(p: VPolytope, params: FloatingParams) -> np.ndarray:
    """Centroid ``g_delta(K)`` of ``K minus K_delta``."""
    return floating_split(p, params).rest_centroid


def sw_constant(n: int) -> float:
    return 2.0 * (unit_ball_volume(n - 1) / (n + 1)) ** (2.0 / (n + 1))


def sw_functional(p: VPolytope, delta: float, params: FloatingParams | None = None) -> float:
    """``c_n (|K| - |K_delta|) / (delta |K|)^{2/(n+1)}``."""
    n = p.dim
    params = (params or FloatingParams(delta, default_net(n))).with_delta(delta)
    kd = floating_body(p, params)
    vol = p.volume
    return sw_constant(n) * (vol - kd.volume) / (delta * vol) ** (2.0 / (n + 1))


@dataclass(frozen=True)
class SWEstimate:
    deltas: tuple
    values: tuple
    extrapolated: float
    order: int = 2


def richardson(deltas, values, exponent: float, order: int = 2) -> float:
    """Eliminate corrections ``delta^(k*exponent)``, k = 1..order, and return the limit.

    This is Neville's scheme in the variable ``x = delta^exponent``: level k
    combines entries k apart as
    ``(x_i v_{i+1} - x_{i+k} v_i) / (x_i - x_{i+k})``, which is exact for
    polynomials of degree ``order`` in x on any grid.
    """
    x = np.asarray(deltas, float) ** exponent
    v = np.asarray(values, float)
    if order < 0 or order >= len(x):
        raise ValueError(f"order {order} needs more than {order} grid points")
    for k in range(1, order + 1):
        a, b = x[:-k], x[k:]
        v = (a * v[1:] - b * v[:-1]) / (a - b)
    return float(v[-1])


def sw_limit(p: VPolytope, delta_grid, net: DirectionNet | None = None,
             vol_tol: float = DEFAULT_VOL_TOL, order: int = 2) -> SWEstimate:
    """Schütt-Werner functional on a decreasing grid plus its extrapolated limit."""
    grid = [float(x) for x in delta_grid]
    if len(grid) < 4:
        raise InadmissibleParameters("delta grid needs at least 4 points")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise InadmissibleParameters("delta grid must be strictly decreasing")
    n = p.dim
    net = net or default_net(n)
    params = FloatingParams(grid[0], net, vol_tol)
    vals = [sw_functional(p, d, params) for d in grid]
    ext = richardson(grid, vals, 2.0 / (n + 1), order)
    return SWEstimate(tuple(grid), tuple(vals), ext, order)


def max_section(p: VPolytope, u) -> float:
    """``max_t |P ∩ {<x,u> = t}|``; the square root (n = 3) or the section (n = 2) is concave."""
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    hts = np.unique(p.vertices @ u)
    vals = np.array([section_measure(p, u, t) for t in hts])
    k = int(np.argmax(vals))
    best = float(vals[k])
    if p.dim == 2:
        return best
    lo = hts[max(k - 1, 0)]
    hi = hts[min(k + 1, len(hts) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -section_measure(p, u, t), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12 * max(hi - lo, 1e-300)})
        best = max(best, -float(res.fun))
    return best


def lemma_fa_check(p: VPolytope, u, delta: float, vol_tol: float = DEFAULT_VOL_TOL):
    """Both sides of ``f(a_delta(u)) >= delta^{(n-1)/n} max_t f(t)``."""
    if not 0.0 < delta < 0.5:
        raise InadmissibleParameters("delta must lie in (0, 1/2)")
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    n = p.dim
    a = cut_offset(p, u, delta, vol_tol)
    lhs = section_measure(p, u, a)
    rhs = delta ** ((n - 1) / n) * max_section(p, u)
    return lhs, rhs


def net_error_bound(p: VPolytope, net: DirectionNet) -> float:
    """Hausdorff slack between the net and the exact floating body of P.

    If x lies in the net body and y is its nearest point of a convex ``C``
    of diameter D, some net vector u is within angle theta of ``(x-y)/|x-y|``;
    then ``|x-y| cos(theta) <= h_C(u) - <y,u> <= D * mesh``.
    """
    theta = net.angle
    if theta >= np.pi / 2:
        return np.inf
    return float(p.diameter * net.mesh / np.cos(theta))


__all__ = ["FloatingParams", "FloatingSplit", "SWEstimate", "cut_offset", "cut_offsets",
           "cut_volume", "delta_bound", "default_net", "floating_body", "floating_centroid",
           "floating_split", "lemma_fa_check", "max_section", "net_error_bound", "richardson",
           "sw_constant", "sw_functional", "sw_limit"]
