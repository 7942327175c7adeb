"""Explicit bodies and the two construction experiments.

Builders for the triangle examples (John, Löwner and centroid points in
general position), the bodies ``K(h)`` whose floating centroids do not
converge uniformly, the cap-rounding step that pulls a floating centroid
towards a chosen vertex, and the cascade that pulls ``n + 1`` floating
centroids towards ``n + 1`` affinely independent vertices.

Free parameters that the constructions only constrain ("choose b1 close to
a", sampling densities, search grids) live in :data:`CONFIG`.
"""
from __future__ import annotations

import math
from copy import deepcopy
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.spatial.transform import Rotation

from ._parallel import ordered_map, worker_count
from .ellipsoids import john_point, loewner_point
from .errors import (ConstructionFailed, DegenerateDifference, EmptyFloatingBody, EtaTooLarge,
                     InadmissibleParameters, SearchExhausted)
from .floating import DEFAULT_VOL_TOL, FloatingParams, delta_bound, floating_centroid
from .geometry.nets import DirectionNet
from .geometry.polytope import (HalfSpace, VPolytope, _require_exact_dim, affine_rank,
                                chebyshev_center, clip, hausdorff)
from .points import santalo_point

SQRT3 = math.sqrt(3.0)

CONFIG = {
    "example1": {
        "lam": 0.5,
        "gamma": 0.5,
        # witness search for the second cut
        "grid": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        "min_simplex_volume": 1e-4,
    },
    "example2": {
        # b1 = a + s (b - a); c1 = c' + frac (c'' - c')
        "s": 0.05,
        "frac": 0.5,
    },
    "kh": {
        # arc samples per unit of 1/h: max(16, ceil(cap_density / h)) in the plane,
        # and that many rings on the spherical cap in space
        "cap_density": 64.0,
        "circle_points": 128,
    },
    "theorem3": {
        "eta_margin": 0.99,         # eta_1 = margin * eta / (n + 2)
        # epsilon_k = ratio * eta_k; a finer ratio is tried when the delta-search fails
        "epsilon_ratios": [0.5, 0.02, 0.002],
        "next_eta_ratio": 0.5,      # eta_{k+1} = ratio * epsilon_k
        "delta_floor_exp": 40,      # delta in {2^-1, ..., 2^-40}
        "max_backtracks": 4,
        "max_net_points": {2: 20000, 3: 6000},
        "base_net": {2: 2048, 3: 2048},
        "refine": {2: 4, 3: 1},
    },
    "separation": {
        "m": 8,
        "h_grid": [0.5, 0.3, 0.2, 0.1, 0.05, 0.025],
        "ell_max": 2 ** 20,
        "target_gap": 0.1,
        "net_size": 2048,
    },
}


def config(section: str) -> dict:
    """Copy of the defaults of one construction."""
    return deepcopy(CONFIG[section])


def _small_delta_params(delta, net):
    """Cut accuracy scaled with delta so the rim stays resolvable."""
    return FloatingParams(delta, net, min(DEFAULT_VOL_TOL, 1e-4 * delta))


def simplex_volume(points) -> float:
    """Volume of the simplex spanned by ``n + 1`` points in R^n."""
    p = np.asarray(points, dtype=float)
    return abs(float(np.linalg.det(p[1:] - p[0]))) / math.factorial(p.shape[1])


# ------------------------------------------------------------------ Example 1


def _triangle():
    return np.array([[2.0, 0.0], [-1.0, SQRT3], [-1.0, -SQRT3]])


def example1_bodies(lam: float | None = None, gamma: float | None = None):
    """The triangle ``S`` with incircle ``B^2``, and two successive corner cuts.

    ``S1`` keeps ``x1 <= 1 + lam``; ``S2`` additionally keeps
    ``<x, u> <= 1 + gamma`` with ``u = (-1, sqrt 3)/2``. Both cut lines cross
    the interior and miss the unit disk exactly when ``0 < lam, gamma < 1``.

    Returns
    -------
    tuple of VPolytope
        ``(S, S1, S2)``.
    """
    cfg = CONFIG["example1"]
    lam = cfg["lam"] if lam is None else float(lam)
    gamma = cfg["gamma"] if gamma is None else float(gamma)
    for name, v in (("lam", lam), ("gamma", gamma)):
        if not 0.0 < v < 1.0:
            raise InadmissibleParameters(
                f"{name}={v!r}: the cut must cross the interior and miss the unit disk, "
                "which needs 0 < value < 1")
    s = VPolytope(_triangle())
    s1 = clip(s, HalfSpace([1.0, 0.0], 1.0 + lam))
    u = np.array([-1.0, SQRT3]) / 2.0
    s2 = clip(s1, HalfSpace(u, 1.0 + gamma))
    return s, s1, s2


@dataclass(frozen=True)
class Example1Witness:
    lam: float
    gamma: float
    j: np.ndarray
    g: np.ndarray
    s: np.ndarray
    simplex_volume: float


def example1_witness(grid=None, tol: float | None = None) -> Example1Witness:
    """Search ``(lam, gamma)`` for the largest triangle spanned by ``(j, g, s)(S2)``.

    Stops at the first grid cell, in row-major order, whose simplex volume
    exceeds the configured threshold.
    """
    cfg = CONFIG["example1"]
    grid = cfg["grid"] if grid is None else list(grid)
    best = None
    for lam in grid:
        for gamma in grid:
            s2 = example1_bodies(lam, gamma)[2]
            j = john_point(s2, tol)
            g = s2.centroid
            s = santalo_point(s2)
            w = Example1Witness(lam, gamma, j, g, s, simplex_volume([j, g, s]))
            if best is None or w.simplex_volume > best.simplex_volume:
                best = w
            if w.simplex_volume > cfg["min_simplex_volume"]:
                return w
    return best


# ------------------------------------------------------------------ Example 2


def _segment_origin_distance(p, q) -> float:
    d = q - p
    t = np.clip(-(p @ d) / (d @ d), 0.0, 1.0)
    return float(np.linalg.norm(p + t * d))


def _on_segment(x, a, b, tol=1e-9):
    """Parameter of x on [a, b], or None."""
    d = b - a
    t = float((x - a) @ d / (d @ d))
    if np.linalg.norm(a + t * d - x) > tol * max(1.0, np.linalg.norm(d)):
        return None
    if t < -tol or t > 1.0 + tol:
        return None
    return t


def triangle_loewner(vertices):
    """Löwner ellipse of a triangle as ``(center, A)`` with ``(x-c)^T A (x-c) <= 1``."""
    v = np.asarray(vertices, dtype=float)
    m = v.mean(axis=0)
    d = v - m
    cov = d.T @ d / 3.0
    return m, 0.5 * np.linalg.inv(cov)


@dataclass(frozen=True)
class Example2Parameters:
    """Vertices of the quadrangle and the admissible range of ``c1``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    b1: np.ndarray
    c_prime: np.ndarray
    c_second: np.ndarray
    c1: np.ndarray


def example2_parameters(b1=None, c1=None) -> Example2Parameters:
    """Validate ``(b1, c1)`` and compute the admissible segment ``[c', c'']``.

    ``c'`` is the second intersection of the Löwner ellipse of
    ``T = conv(b1, b, c)`` with the segment ``[a, c]``; ``c''`` is the last
    point of ``[c', c]`` for which ``[b1, c1]`` still misses the unit disk.

    Raises
    ------
    InadmissibleParameters
        Naming the violated constraint.
    """
    a, b, c = _triangle()
    cfg = CONFIG["example2"]
    if b1 is None:
        b1 = a + cfg["s"] * (b - a)
    b1 = np.asarray(b1, dtype=float)
    s = _on_segment(b1, a, b)
    if s is None:
        raise InadmissibleParameters("b1 must lie on the segment [a, b]")
    if s <= 1e-12:
        raise InadmissibleParameters("b1 must differ from a (otherwise l(P) = 0)")
    if s >= 1.0 - 1e-12:
        raise InadmissibleParameters("b1 must differ from b")
    m, A = triangle_loewner([b1, b, c])
    d = c - a
    # (a + t d - m)^T A (a + t d - m) = 1 has the root t = 1 (the vertex c)
    qa = d @ A @ d
    qb = 2.0 * (a - m) @ A @ d
    qc = (a - m) @ A @ (a - m) - 1.0
    t_prime = qc / qa          # product of the roots is qc/qa, one root is 1
    if not 0.0 <= t_prime < 1.0:
        raise InadmissibleParameters("the Löwner ellipse of T does not meet [a, c) twice")
    assert abs(qa + qb + qc) <= 1e-9 * max(1.0, abs(qa))
    c_prime = a + t_prime * d

    def miss(t):
        return _segment_origin_distance(b1, a + t * d) - 1.0

    if miss(t_prime) <= 0.0:
        raise InadmissibleParameters(
            "segment [b1, c'] meets the unit disk; move b1 closer to a")
    t_second = brentq(miss, t_prime, 1.0, xtol=1e-15) if miss(1.0) < 0.0 else 1.0
    # keep the segment strictly away from the disk
    t_second = t_prime + (t_second - t_prime) * (1.0 - 1e-9)
    c_second = a + t_second * d
    if c1 is None:
        c1 = c_prime + cfg["frac"] * (c_second - c_prime)
    c1 = np.asarray(c1, dtype=float)
    t1 = _on_segment(c1, a, c)
    if t1 is None:
        raise InadmissibleParameters("c1 must lie on the segment [a, c]")
    if (c1 - m) @ A @ (c1 - m) > 1.0 + 1e-12:
        raise InadmissibleParameters("c1 must lie in the Löwner ellipse of T = conv(b1, b, c)")
    if _segment_origin_distance(b1, c1) <= 1.0:
        raise InadmissibleParameters("segment [b1, c1] meets the unit disk")
    return Example2Parameters(a, b, c, b1, c_prime, c_second, c1)


def example2_bodies(b1=None, c1=None):
    """The quadrangle ``P(c1) = conv(b, b1, c1, c)`` and ``T = conv(b1, b, c)``.

    Defaults for ``b1`` and ``c1`` come from :data:`CONFIG`.
    """
    prm = example2_parameters(b1, c1)
    quad = VPolytope([prm.b, prm.b1, prm.c1, prm.c])
    tri = VPolytope([prm.b1, prm.b, prm.c])
    return quad, tri


# ---------------------------------------------------------------------- K(h)


def kh_geometry(h: float):
    """Center abscissa and radius of the ball whose cap closes ``K(h)``."""
    return (h * h + 2.0 * h - 1.0) / (2.0 * h), (1.0 + h * h) / (2.0 * h)


def _cap_fibonacci(k, theta0):
    """About ``k`` points spread uniformly over the spherical cap around e1."""
    i = np.arange(k) + 0.5
    z = 1.0 - (1.0 - math.cos(theta0)) * i / k
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([z, rho * np.cos(phi), rho * np.sin(phi)])


def kh_body(h: float, net: DirectionNet | None = None, n: int = 2,
            cap_density: float | None = None) -> VPolytope:
    """Polytope approximation of ``K(h) = ([-1, 1] x B^{n-1}) ∪ C(h)``.

    ``C(h)`` is the part beyond ``x1 = 1`` of the ball of radius
    ``(1 + h^2)/(2h)`` centered at ``((h^2 + 2h - 1)/(2h)) e1``; its base is the
    unit ball at ``x1 = 1`` and its apex is ``(1 + h) e1``.

    Parameters
    ----------
    h : float
        Cap height in ``(0, 1]``.
    net : DirectionNet, optional
        Extra sphere directions; those pointing into the cap are added as cap
        samples. Its dimension overrides ``n``.
    n : int
        Dimension when no net is given.
    cap_density : float, optional
        Samples scale as ``cap_density / h``; see :data:`CONFIG`.
    """
    if not 0.0 < h <= 1.0:
        raise InadmissibleParameters(f"h={h!r} outside (0, 1]")
    if net is not None:
        n = net.dim
    _require_exact_dim(n)
    cfg = CONFIG["kh"]
    density = cfg["cap_density"] if cap_density is None else float(cap_density)
    k = max(16, math.ceil(density / h))
    xc, rad = kh_geometry(h)
    theta0 = math.atan2(1.0, 1.0 - xc)       # angle of the base rim seen from the center
    if n == 2:
        th = np.linspace(-theta0, theta0, k + 1)
        cap = np.column_stack([xc + rad * np.cos(th), rad * np.sin(th)])
        cyl = np.array([[-1.0, -1.0], [-1.0, 1.0]])
    else:
        m = max(cfg["circle_points"], k)
        ang = 2.0 * np.pi * np.arange(m) / m
        circle = np.column_stack([np.cos(ang), np.sin(ang)])
        cyl = np.vstack([np.column_stack([-np.ones(m), circle]),
                         np.column_stack([np.ones(m), circle])])
        dirs = _cap_fibonacci(k * k, theta0)
        cap = np.array([xc, 0.0, 0.0]) + rad * dirs
    pts = [cyl, cap]
    if net is not None:
        d = net.directions
        inside = d[:, 0] >= math.cos(theta0)
        if np.any(inside):
            pts.append(np.array([xc] + [0.0] * (n - 1)) + rad * d[inside])
    return VPolytope(np.vstack(pts))


def kh_hausdorff_bound(h: float, n: int = 2, cap_density: float | None = None) -> float:
    """Sagitta of the cap sampling: an upper bound for ``d_H`` to the exact ``K(h)``."""
    cfg = CONFIG["kh"]
    density = cfg["cap_density"] if cap_density is None else float(cap_density)
    k = max(16, math.ceil(density / h))
    xc, rad = kh_geometry(h)
    theta0 = math.atan2(1.0, 1.0 - xc)
    if n == 2:
        step = 2.0 * theta0 / k
        cap_err = rad * (1.0 - math.cos(step / 2.0))
        return cap_err
    m = max(cfg["circle_points"], k)
    circ_err = 1.0 - math.cos(math.pi / m)
    # Fibonacci cap spacing is about sqrt(4 pi area / N) in angle
    area = 2.0 * math.pi * (1.0 - math.cos(theta0))
    step = 2.0 * math.sqrt(area / (k * k))
    return max(circ_err, rad * (1.0 - math.cos(step)))


# ------------------------------------------------------------ cap rounding


@dataclass(frozen=True)
class CapRoundingStep:
    """Data of one rounded vertex: ball ``B(z, r)``, its net, the chosen delta."""

    vertex_index: int
    z: np.ndarray
    r: float
    eta: float
    epsilon_net: float
    delta: float | None = None
    distance: float | None = None

    def __post_init__(self):
        if not 0.0 < self.r <= self.eta:
            raise InadmissibleParameters(f"ball radius {self.r!r} outside (0, eta]")
        if not self.epsilon_net < self.eta:
            raise InadmissibleParameters("epsilon_net must be smaller than eta")


def _sphere_net(n, r, epsilon, seed, max_points):
    """Unit vectors whose scaled copies form an epsilon-net of a radius-r sphere."""
    rng = np.random.default_rng(seed)
    if epsilon >= 2.0 * r:
        size = 4 if n == 2 else 14
    elif n == 2:
        size = math.ceil(math.pi / (2.0 * math.asin(epsilon / (2.0 * r))))
    else:
        size = 14
        while True:
            size = max(size, 2 * size)
            if size > max_points:
                break
            if DirectionNet(3, size).mesh * r <= epsilon:
                break
    if size > max_points:
        raise ConstructionFailed(
            f"net too coarse: an {epsilon:.3g}-net of a radius {r:.3g} sphere needs more "
            f"than {max_points} points")
    if n == 2:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        ang = phase + 2.0 * np.pi * np.arange(size) / size
        return np.column_stack([np.cos(ang), np.sin(ang)])
    rot = Rotation.random(random_state=rng)
    return rot.apply(DirectionNet(3, size).directions)


def cap_round(p: VPolytope, vertex_index: int, eta: float, epsilon_net: float,
              seed: int = 0, max_net_points: int | None = None):
    """Replace a vertex by a small ball, sampled by an epsilon-net.

    A hyperplane ``H`` is chosen orthogonal to the mean outward normal at
    ``v``, close enough to ``v`` that every point of ``P`` on the side of
    ``v`` lies within ``eta`` of it. ``B(z, r)`` is the largest ball inside
    that piece, with ``r <= eta``. The result is the hull of an
    ``epsilon_net``-net of the sphere ``∂B(z, r)`` with the other vertices.

    Parameters
    ----------
    seed : int
        Rotates the net, so distinct seeds give distinct but reproducible nets.

    Returns
    -------
    tuple
        ``(Q, CapRoundingStep)``.

    Raises
    ------
    EtaTooLarge
        When no admissible ``(z, r)`` exists.
    """
    n = p.dim
    _require_exact_dim(n)
    verts = p.vertices
    if not 0 <= vertex_index < len(verts):
        raise InadmissibleParameters(f"vertex index {vertex_index} outside 0..{len(verts) - 1}")
    if not eta > 0.0:
        raise InadmissibleParameters("eta must be positive")
    if not 0.0 < epsilon_net < eta:
        raise InadmissibleParameters("epsilon_net must lie in (0, eta)")
    v = verts[vertex_index]
    others = np.delete(verts, vertex_index, axis=0)
    active = np.abs(p.facet_normals @ v - p.facet_offsets) <= 1e-9 * p.diameter
    w = p.facet_normals[active].sum(axis=0)
    w /= np.linalg.norm(w)
    gap = float(np.min((v - others) @ w))
    if gap <= 0.0:
        raise EtaTooLarge("vertex is not exposed by its mean normal")
    s = min(gap, eta) * 0.999
    for _ in range(200):
        piece = clip(p, HalfSpace(-w, -(v @ w - s)))
        if np.max(np.linalg.norm(piece.vertices - v, axis=1)) < eta:
            break
        s *= 0.5
    else:
        raise EtaTooLarge(f"no separating hyperplane within eta={eta!r} of the vertex")
    z, rho = chebyshev_center(piece.facet_normals, piece.facet_offsets)
    r = min(rho * (1.0 - 1e-9), eta)
    if not r > 0.0:
        raise EtaTooLarge("the piece near the vertex has empty interior")
    if max_net_points is None:
        max_net_points = CONFIG["theorem3"]["max_net_points"][n]
    dirs = _sphere_net(n, r, epsilon_net, seed, max_net_points)
    q = VPolytope(np.vstack([z + r * dirs, others]))
    if hausdorff(q, p) > eta:
        raise EtaTooLarge("the rounded body is farther than eta from P")
    kept = [_vertex_position(q, x) for x in others]
    if any(k is None for k in kept):
        raise EtaTooLarge("a remaining vertex stopped being extreme")
    return q, CapRoundingStep(vertex_index, z, float(r), float(eta), float(epsilon_net))


def _vertex_position(q: VPolytope, x, rtol=1e-12):
    d = np.linalg.norm(q.vertices - x, axis=1)
    i = int(np.argmin(d))
    return i if d[i] <= rtol * q.diameter else None


# ------------------------------------------------------------------ Theorem 3


def adapted_net(p: VPolytope, base_size: int, refine: int = 1) -> DirectionNet:
    """Directions resolving the normal cones of ``P`` as well as the sphere.

    Contains a uniform net, every facet normal, and (in space) the mean
    normal at every vertex. In the plane each angular gap is split into
    ``refine`` equal parts. Small caps near a finely sampled sphere have
    normal cones narrower than any uniform net, so tiny-delta floating
    bodies need these directions.
    """
    n = p.dim
    base = DirectionNet(n, base_size).directions
    if n == 2:
        fn = p.facet_normals
        ang = np.unique(np.concatenate([np.arctan2(fn[:, 1], fn[:, 0]),
                                        np.arctan2(base[:, 1], base[:, 0])]))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * np.pi]]))
        frac = np.arange(max(1, int(refine))) / max(1, int(refine))
        full = (ang[:, None] + gaps[:, None] * frac[None, :]).ravel()
        return DirectionNet.from_directions(np.column_stack([np.cos(full), np.sin(full)]))
    simp = p.simplices
    normals = p._hull.normals
    acc = np.zeros_like(p.vertices)
    np.add.at(acc, simp.ravel(), np.repeat(normals, simp.shape[1], axis=0))
    acc /= np.linalg.norm(acc, axis=1, keepdims=True)
    d = np.vstack([base, p.facet_normals, acc])
    return DirectionNet.from_directions(d)


def _select_vertices(verts, n):
    """Greedy choice of n + 1 vertices spanning a simplex of maximal volume."""
    c = verts.mean(axis=0)
    idx = [int(np.argmax(np.linalg.norm(verts - c, axis=1)))]
    for _ in range(n):
        base = verts[idx]
        best, best_i = -1.0, None
        for i in range(len(verts)):
            if i in idx:
                continue
            d = np.vstack([base[1:] - base[0], verts[i] - base[0]])
            vol = math.sqrt(max(0.0, np.linalg.det(d @ d.T)))
            if vol > best:
                best, best_i = vol, i
        idx.append(best_i)
    return idx


@dataclass
class Theorem3Result:
    """Outcome of the cascade: the body, its rounding steps and the n+1 points."""

    Q: VPolytope
    steps: list
    points: list
    bound: float
    vertices: list = field(default_factory=list)
    log: list = field(default_factory=list)

    @property
    def distances(self):
        return [float(np.linalg.norm(v - x)) for v, x in zip(self.vertices, self.points)]

    @property
    def rank(self) -> int:
        return affine_rank(np.asarray(self.points))[0]


def _gdelta(q, delta, cfg):
    n = q.dim
    net = adapted_net(q, cfg["base_net"][n], cfg["refine"][n])
    return floating_centroid(q, _small_delta_params(delta, net))


def _delta_search(q, v, target, cfg, log, stage):
    best = (math.inf, None, None)
    for k in range(1, cfg["delta_floor_exp"] + 1):
        delta = 2.0 ** -k
        if delta >= delta_bound(q.dim):
            continue
        try:
            g = _gdelta(q, delta, cfg)
        except (DegenerateDifference, EmptyFloatingBody) as exc:
            log.append({"stage": stage, "delta": delta, "distance": math.nan, "note": str(exc)})
            continue
        dist = float(np.linalg.norm(g - v))
        log.append({"stage": stage, "delta": delta, "distance": dist, "note": ""})
        if dist < best[0]:
            best = (dist, delta, g)
        if dist <= target:
            return delta, g, dist
    raise ConstructionFailed(
        f"delta-search exhausted at 2^-{cfg['delta_floor_exp']}: closest floating centroid "
        f"{best[0]:.4g} from the vertex (delta={best[1]}), target {target:.4g}", stage)


def _round_and_search(q, v, eta_k, cfg, seed, stage, log):
    """Round ``v`` with successively finer nets until the delta-search succeeds."""
    n = q.dim
    idx = _vertex_position(q, v)
    if idx is None:
        raise ConstructionFailed("selected vertex is no longer extreme", stage)
    failure = None
    for ratio in cfg["epsilon_ratios"]:
        eps_k = ratio * eta_k
        try:
            q_new, step = cap_round(q, idx, eta_k, eps_k, seed + stage, cfg["max_net_points"][n])
        except ConstructionFailed as exc:
            raise ConstructionFailed(f"{exc.detail}; previous attempt: {failure}", stage) from None
        except EtaTooLarge as exc:
            raise ConstructionFailed(f"cap rounding: {exc}", stage) from None
        log.append({"stage": stage, "delta": math.nan, "distance": math.nan,
                    "note": f"eta={eta_k:.6g} epsilon={eps_k:.6g} vertices={len(q_new)}"})
        try:
            delta, _, dist = _delta_search(q_new, v, 3.0 * eta_k, cfg, log, stage)
            return q_new, step, eps_k, delta, dist
        except ConstructionFailed as exc:
            failure = exc.detail
    raise ConstructionFailed(f"{failure} with the finest net (epsilon={eps_k:.3g})", stage)


def theorem3_construct(p, eta: float, seed: int = 0, settings: dict | None = None) -> Theorem3Result:
    """Round ``n + 1`` vertices so that ``n + 1`` floating centroids span R^n.

    Stage ``k`` rounds vertex ``v_k`` with radius and net bounds ``eta_k``,
    ``epsilon_k``, then searches ``delta_k`` in ``2^-1, 2^-2, ...`` until the
    centroid of ``Q minus Q_{delta_k}`` is within ``3 eta_k`` of ``v_k``. If a
    later stage pulls an earlier centroid outside the final bound, the stage
    is repeated with ``eta_k`` halved. The final bound is
    ``(n + 2) eta_1 < eta``.

    Parameters
    ----------
    p : VPolytope or array_like
        The polytope (or its points; rank-deficient inputs are reported as a
        failed stage 0).
    eta : float
        Hausdorff budget.
    seed : int
        Seeds the sphere nets.
    settings : dict, optional
        Overrides of ``CONFIG["theorem3"]``.

    Raises
    ------
    ConstructionFailed
        With the stage index and the failed bound.
    """
    cfg = config("theorem3")
    cfg.update(settings or {})
    if not isinstance(p, VPolytope):
        pts = np.asarray(p, dtype=float)
        rank, _ = affine_rank(pts)
        if rank < pts.shape[1]:
            raise ConstructionFailed(
                f"needs {pts.shape[1] + 1} affinely independent vertices, affine rank is {rank}", 0)
        p = VPolytope(pts)
    n = p.dim
    _require_exact_dim(n)
    if not eta > 0.0:
        raise InadmissibleParameters("eta must be positive")
    eta1 = cfg["eta_margin"] * eta / (n + 2)
    bound = (n + 2) * eta1
    chosen = [p.vertices[i].copy() for i in _select_vertices(p.vertices, n)]
    log = []
    try:
        return _cascade(p, chosen, eta1, bound, cfg, seed, log)
    except ConstructionFailed as exc:
        exc.log = log
        raise


def _cascade(p, chosen, eta1, bound, cfg, seed, log):
    n = p.dim
    q = p
    steps = []
    eta_k = eta1
    for stage in range(1, n + 2):
        v = chosen[stage - 1]
        for attempt in range(cfg["max_backtracks"] + 1):
            q_new, step, eps_k, delta, dist = _round_and_search(q, v, eta_k, cfg, seed, stage, log)
            earlier = [float(np.linalg.norm(_gdelta(q_new, s.delta, cfg) - u))
                       for s, u in zip(steps, chosen)]
            if all(d <= bound for d in earlier):
                break
            log.append({"stage": stage, "delta": delta, "distance": max(earlier),
                        "note": "earlier centroid moved; halving eta"})
            eta_k *= 0.5
        else:
            raise ConstructionFailed("earlier centroids kept moving after backtracking", stage)
        steps.append(replace(step, delta=delta, distance=dist))
        q = q_new
        eta_k = cfg["next_eta_ratio"] * eps_k
    points = [_gdelta(q, s.delta, cfg) for s in steps]
    res = Theorem3Result(q, steps, points, bound, chosen, log)
    worst = max(res.distances)
    if worst > bound:
        raise ConstructionFailed(f"final distance {worst:.4g} exceeds (n+2) eta_1 = {bound:.4g}",
                                 n + 1)
    if res.rank != n:
        raise ConstructionFailed(f"points have affine rank {res.rank}, expected {n}", n + 1)
    return res


# ------------------------------------------------------------------ Theorem 1


@dataclass(frozen=True)
class SeparationResult:
    h: float
    m: int
    ell: int
    gap: float
    g_m: np.ndarray
    g_ell: np.ndarray
    frontier: tuple = ()


def _kh_gdelta(body, delta, net):
    return floating_centroid(body, _small_delta_params(delta, net))


def theorem1_separation(h: float | None = None, m: int | None = None,
                        net: DirectionNet | None = None, ell_max: int | None = None,
                        h_grid=None, target_gap: float | None = None) -> SeparationResult:
    """Find ``ell > m`` with ``||g_{1/ell}(K(h)) - g_{1/m}(K(h))|| >= 1/10``.

    With ``h`` unset, the first value of the configured grid with
    ``||g_{1/m}(K(h))|| <= 1/10`` is used. The ``ell`` grid is
    ``m * 2^j`` up to ``ell_max``; cells are evaluated in batches of the worker
    count and reduced in grid order, so the answer does not depend on
    threading.

    Raises
    ------
    SearchExhausted
        With the best gap and every evaluated ``(h, ell, gap)``.
    """
    cfg = CONFIG["separation"]
    m = cfg["m"] if m is None else int(m)
    ell_max = cfg["ell_max"] if ell_max is None else int(ell_max)
    target = cfg["target_gap"] if target_gap is None else float(target_gap)
    net = net or DirectionNet(2, cfg["net_size"])
    if 1.0 / m >= delta_bound(net.dim):
        raise InadmissibleParameters(f"1/m = {1.0 / m:.4g} is not an admissible delta")
    if ell_max <= m:
        raise SearchExhausted(f"no ell in ({m}, {ell_max}]", best_gap=0.0, frontier=[])
    hs = [h] if h is not None else list(cfg["h_grid"] if h_grid is None else h_grid)
    frontier = []
    best = 0.0
    ells = []
    ell = 2 * m
    while ell <= ell_max:
        ells.append(ell)
        ell *= 2
    for hh in hs:
        body = kh_body(hh, n=net.dim)
        g_m = _kh_gdelta(body, 1.0 / m, net)
        if np.linalg.norm(g_m) > 0.1:
            frontier.append((hh, m, float(np.linalg.norm(g_m))))
            continue
        batch = max(1, worker_count())
        for i in range(0, len(ells), batch):
            chunk = ells[i:i + batch]
            gs = ordered_map(lambda e: _kh_gdelta(body, 1.0 / e, net), chunk)
            for e, g in zip(chunk, gs):
                gap = float(np.linalg.norm(g - g_m))
                frontier.append((hh, e, gap))
                best = max(best, gap)
                if gap >= target:
                    return SeparationResult(hh, m, e, gap, g_m, g, tuple(frontier))
    raise SearchExhausted(f"no (h, ell) reached gap {target}; best {best:.4g}",
                          best_gap=best, frontier=frontier)
