"""Affine invariant points, set maps built from them, and the equivariance harness.

Maps take a body and an :class:`EvalContext`. The context carries solver
tolerances, the base direction net, and the linear part ``M`` of the affine
map the body has been pushed through. Net-based maps use the net transported
by ``M`` (normals go to ``M^{-T}u``), which is the exact form of the identity
``(TK)_delta = T(K_delta)``; maps evaluated on a polar body use the dual
context with ``M^{-T}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .ellipsoids import default_tol, john_point, loewner_point, mie
from .errors import DegenerateInput, InadmissibleParameters, NoConvergence, ZeroDirection
from .floating import DEFAULT_NET_SIZE, FloatingParams, floating_body, floating_centroid
from .geometry.affine import AffineMap
from .geometry.nets import DirectionNet
from .geometry.polytope import HalfSpace, VPolytope, affine_apply, clip, gauge, polar

SANTALO_TOL = 1e-10


# --------------------------------------------------------------------- Santaló


def _polar_data(p: VPolytope, x):
    """Polar of ``P - x`` about the origin, or None when x is not interior."""
    slack = p.slack(x)
    if np.min(slack) <= 1e-12 * p.diameter:
        return None
    return VPolytope(p.facet_normals / slack[:, None])


def polar_volume(p: VPolytope, x) -> float:
    """``vol((P - x)°)``; +inf outside the interior."""
    q = _polar_data(p, x)
    return np.inf if q is None else q.volume


def santalo_point(p: VPolytope, tol: float = SANTALO_TOL, max_iter: int = 100) -> np.ndarray:
    """Minimizer of ``x -> vol((P - x)°)`` over the interior of P.

    Damped Newton with exact derivatives. With ``L = (P - x)°`` and
    ``F(x) = vol(L)``,

        grad F = (n+1) * int_L y dy,    hess F = (n+1)(n+2) * int_L y y^T dy,

    both read off the fan triangulation of the polar. Steps are backtracked
    until the iterate stays interior and F decreases; the loop ends when the
    step is below ``tol * diam(P)``. A golden-section coordinate search takes
    over if Newton fails.
    """
    if p.dim not in (2, 3):
        raise DegenerateInput("Santaló point is implemented for n = 2, 3")
    try:
        return _santalo_newton(p, tol, max_iter)
    except NoConvergence:
        return _santalo_coordinate(p, tol)


def _santalo_newton(p, tol, max_iter):
    n = p.dim
    x = p.centroid.copy()
    diam = p.diameter
    for _ in range(max_iter):
        q = _polar_data(p, x)
        f = q.volume
        grad = (n + 1) * f * q.centroid
        hess = (n + 1) * (n + 2) * q.second_moment
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular Hessian") from None
        s = 1.0
        while s > 1e-12:
            y = x + s * step
            fy = polar_volume(p, y)
            if fy <= f + 1e-4 * s * float(grad @ step):
                break
            if np.isfinite(fy) and s * np.linalg.norm(step) <= tol * diam:
                break  # the decrease is below rounding; accept the tiny step
            s *= 0.5
        else:
            raise NoConvergence("line search failed")
        x = y
        if s * np.linalg.norm(step) <= tol * diam:
            return x
    raise NoConvergence(f"no Newton convergence in {max_iter} steps")


def _santalo_coordinate(p, tol, sweeps: int = 200):
    x = p.centroid.copy()
    n = p.dim
    for _ in range(sweeps):
        moved = 0.0
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            # chord of P through x along e_i
            a, b = p.facet_normals @ e, p.slack(x)
            hi = np.min(b[a > 0] / a[a > 0])
            lo = -np.min(b[a < 0] / -a[a < 0])
            res = minimize_scalar(lambda s: polar_volume(p, x + s * e),
                                  bounds=(lo * (1 - 1e-9), hi * (1 - 1e-9)), method="bounded",
                                  options={"xatol": tol * p.diameter})
            x = x + res.x * e
            moved = max(moved, abs(res.x))
        if moved <= tol * p.diameter:
            return x
    raise NoConvergence("Santaló coordinate search did not settle")


# ------------------------------------------------------------ evaluation context


@dataclass(frozen=True, eq=False)
class EvalContext:
    """Tolerances and net state for map evaluation.

    Parameters
    ----------
    tol : float or None
        Ellipsoid solver tolerance; None picks the per-dimension default.
    santalo_tol : float
        Step-size tolerance of the Santaló solver.
    net_size : dict
        Base net size per dimension.
    vol_tol : float
        Relative cut-volume tolerance for floating bodies.
    matrix : array or None
        Linear part of the accumulated affine map (None is the identity).
    transport : bool
        If False, nets are used untransported (fixed-net mode).
    """

    tol: float | None = None
    santalo_tol: float = SANTALO_TOL
    net_size: dict = field(default_factory=lambda: dict(DEFAULT_NET_SIZE))
    vol_tol: float = 1e-9
    matrix: np.ndarray | None = None
    transport: bool = True

    def solver_tol(self, n: int) -> float:
        return default_tol(n) if self.tol is None else self.tol

    def net(self, n: int) -> DirectionNet:
        base = _base_net(n, self.net_size[n])
        if self.matrix is None or not self.transport:
            return base
        return base.transported(AffineMap.linear(self.matrix))

    def transformed(self, t: AffineMap) -> "EvalContext":
        m = t.matrix if self.matrix is None else t.matrix @ self.matrix
        return replace(self, matrix=m)

    def dual(self) -> "EvalContext":
        if self.matrix is None:
            return self
        return replace(self, matrix=np.linalg.inv(self.matrix).T)


_NETS: dict = {}


def _base_net(n, size):
    key = (n, int(size))
    if key not in _NETS:
        _NETS[key] = DirectionNet(n, size)
    return _NETS[key]


# --------------------------------------------------------------------- registry


@dataclass(frozen=True, eq=False)
class PointMap:
    """Named affine invariant point map ``K -> p(K)``."""

    name: str
    params: tuple
    evaluator: Callable

    def __call__(self, p: VPolytope, ctx: EvalContext | None = None) -> np.ndarray:
        x = np.asarray(self.evaluator(p, ctx or EvalContext()), dtype=float)
        if not np.all(np.isfinite(x)):
            raise NoConvergence(f"map {self.name} produced a non-finite point")
        return x


@dataclass(frozen=True, eq=False)
class SetMap:
    """Named affine invariant set map ``K -> A(K)``."""

    name: str
    params: tuple
    evaluator: Callable

    def __call__(self, p: VPolytope, ctx: EvalContext | None = None) -> VPolytope:
        return self.evaluator(p, ctx or EvalContext())


@dataclass(frozen=True)
class CapParams:
    """Parameters of the cap map: level ``epsilon`` and the map used on the polar."""

    epsilon: float
    direction_source: PointMap

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InadmissibleParameters(f"epsilon={self.epsilon!r} outside (0, 1)")


def _g(p, ctx):
    return p.centroid


def _s(p, ctx):
    return santalo_point(p, ctx.santalo_tol)


def _j(p, ctx):
    return john_point(p, ctx.solver_tol(p.dim))


def _l(p, ctx):
    return loewner_point(p, ctx.solver_tol(p.dim))


def _float_params(p, ctx, delta):
    return FloatingParams(delta, ctx.net(p.dim), ctx.vol_tol)


def gdelta_map(delta: float) -> PointMap:
    FloatingParams(delta, _base_net(2, 4))  # validate early (the bound is loosest for n = 2)
    return PointMap(f"gdelta:{delta:g}", (("delta", delta),),
                    lambda p, ctx: floating_centroid(p, _float_params(p, ctx, delta)))


def floating_map(delta: float) -> SetMap:
    return SetMap(f"float:{delta:g}", (("delta", delta),),
                  lambda p, ctx: floating_body(p, _float_params(p, ctx, delta)))


def cap_direction(p: VPolytope, source: PointMap, ctx: EvalContext):
    """``d = source((K - g(K))°)`` and ``g(K)``; ZeroDirection if d vanishes."""
    g = p.centroid
    dual = polar(p, g)
    dual = VPolytope(dual.vertices - g)
    d = source(dual, ctx.dual())
    floor = max(1e-9, 100.0 * ctx.solver_tol(p.dim)) * dual.diameter
    if np.linalg.norm(d) <= floor:
        raise ZeroDirection(
            f"{source.name} of the centered polar is {np.linalg.norm(d):.3g}, below {floor:.3g}")
    return d, g


def cap_map(p: VPolytope, cap: CapParams, ctx: EvalContext | None = None) -> VPolytope:
    """``{x in K : <x - g, d> >= (1 - eps) sup_y <y - g, d>}`` with ``d = p((K - g)°)``.

    Measuring from the centroid keeps the map equivariant under translations.
    """
    ctx = ctx or EvalContext()
    d, g = cap_direction(p, cap.direction_source, ctx)
    top = float(np.max((p.vertices - g) @ d))
    level = (1.0 - cap.epsilon) * top + float(g @ d)
    return clip(p, HalfSpace(-d, -level))


def cap_qp_map(p: VPolytope, q: PointMap, cap: CapParams,
               ctx: EvalContext | None = None) -> VPolytope:
    """Variant thresholded by a proper point: ``<x - g, d> >= (1 - eps) <q(K) - g, d>``."""
    ctx = ctx or EvalContext()
    d, g = cap_direction(p, cap.direction_source, ctx)
    level = (1.0 - cap.epsilon) * float((q(p, ctx) - g) @ d) + float(g @ d)
    return clip(p, HalfSpace(-d, -level))


def cap_set_map(epsilon: float, source: PointMap) -> SetMap:
    cap = CapParams(epsilon, source)
    return SetMap(f"cap:{epsilon:g}/{source.name}", (("epsilon", epsilon),),
                  lambda p, ctx: cap_map(p, cap, ctx))


def compose(pm: PointMap, sm: SetMap) -> PointMap:
    """``p o A``."""
    return PointMap(f"{pm.name}@{sm.name}", pm.params + sm.params,
                    lambda p, ctx: pm(sm(p, ctx), ctx))


def affine_combination(pm: PointMap, qm: PointMap, lam: float) -> PointMap:
    """``(1 - lam) p + lam q``; again an affine invariant point map."""
    return PointMap(f"comb:{lam:g}:{pm.name}:{qm.name}", (("lambda", lam),),
                    lambda p, ctx: (1.0 - lam) * pm(p, ctx) + lam * qm(p, ctx))


BASE_MAPS = {
    "g": PointMap("g", (), _g),
    "s": PointMap("s", (), _s),
    "j": PointMap("j", (), _j),
    "l": PointMap("l", (), _l),
}
DEFAULT_MAP_NAMES = ("g", "s", "j", "l", "gdelta:0.1")
EXACT_MAPS = ("g",)


def _parse_base(tok: str) -> PointMap:
    name, _, arg = tok.partition(":")
    if name in BASE_MAPS and not arg:
        return BASE_MAPS[name]
    if name == "comb":
        # comb:LAMBDA:P+Q
        lam, _, pair = arg.partition(":")
        left, plus, right = pair.partition("+")
        if not plus:
            raise InadmissibleParameters(f"expected comb:LAMBDA:P+Q, got {tok!r}")
        try:
            return affine_combination(_parse_base(left), _parse_base(right), float(lam))
        except ValueError:
            raise InadmissibleParameters(f"bad lambda in {tok!r}") from None
    if name == "gdelta":
        try:
            return gdelta_map(float(arg or "0.1"))
        except ValueError:
            raise InadmissibleParameters(f"bad delta in {tok!r}") from None
    raise InadmissibleParameters(f"unknown point map {tok!r}")


def _parse_set(tok: str) -> SetMap:
    name, _, arg = tok.partition(":")
    try:
        if name == "float":
            return floating_map(float(arg))
        if name == "cap":
            eps, _, src = arg.partition("/")
            return cap_set_map(float(eps), _parse_base(src or "g"))
    except ValueError:
        raise InadmissibleParameters(f"bad parameter in {tok!r}") from None
    raise InadmissibleParameters(f"unknown set map {tok!r}")


def parse_map(spec: str) -> PointMap:
    """Build a map from text such as ``g``, ``gdelta:0.1``, ``g@float:0.05`` or
    ``l@cap:0.5/gdelta:0.1`` (a point map, then set maps applied right to left)."""
    parts = spec.strip().split("@")
    pm = _parse_base(parts[0])
    # p@A@B means p(A(B(K)))
    for tok in parts[1:]:
        pm = compose(pm, _parse_set(tok))
    return PointMap(spec.strip(), pm.params, pm.evaluator)


def registry(names=DEFAULT_MAP_NAMES) -> dict:
    return {name: parse_map(name) for name in names}


def evaluate(pm: PointMap | str, p: VPolytope, ctx: EvalContext | None = None) -> np.ndarray:
    if isinstance(pm, str):
        pm = parse_map(pm)
    return pm(p, ctx)


@dataclass(frozen=True, eq=False)
class EquivarianceResidual:
    body_id: str
    map_name: str
    transform: AffineMap
    residual: float


def equivariance_residual(pm: PointMap | str, p: VPolytope, t: AffineMap,
                          ctx: EvalContext | None = None, body_id: str = "") -> EquivarianceResidual:
    """``|p(TK) - T p(K)| / diam(TK)``."""
    if isinstance(pm, str):
        pm = parse_map(pm)
    ctx = ctx or EvalContext()
    tp = affine_apply(t, p)
    x0 = pm(p, ctx)
    x1 = pm(tp, ctx.transformed(t))
    res = float(np.linalg.norm(x1 - t(x0)) / tp.diameter)
    return EquivarianceResidual(body_id, pm.name, t, res)


def phi_gauge(pm: PointMap, qm: PointMap, p: VPolytope, ctx: EvalContext | None = None) -> float:
    """Gauge of ``q(K)`` in ``K`` seen from ``p(K)``."""
    ctx = ctx or EvalContext()
    return gauge(p, pm(p, ctx), qm(p, ctx))


# ------------------------------------------------------------------ random bodies


def john_normalize(p: VPolytope, tol: float | None = None, linear_only: bool = False) -> VPolytope:
    """Affine image of P whose John ellipsoid is the unit ball (so ``B ⊆ K ⊆ nB``)."""
    ell, _ = mie(p.to_hpolytope(), tol)
    a = ell.factor
    c = np.zeros(p.dim) if linear_only else ell.center
    return VPolytope(np.linalg.solve(a, (p.vertices - c).T).T)


def _ball_points(n, k, rng):
    z = rng.standard_normal((k, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * rng.uniform(0.0, 1.0, size=(k, 1)) ** (1.0 / n)


def random_polytope(n: int, rng: np.random.Generator, k: int | None = None,
                    normalize: bool = True) -> VPolytope:
    """Hull of ``k`` uniform points of the unit ball, ``k`` in [n+2, 40], in John position."""
    while True:
        kk = int(rng.integers(n + 2, 41)) if k is None else int(k)
        try:
            body = VPolytope(_ball_points(n, kk, rng))
        except DegenerateInput:
            continue
        if body.volume > 1e-3:
            break
    return john_normalize(body) if normalize else body


def random_symmetric(n: int, rng: np.random.Generator, k: int | None = None,
                     normalize: bool = True) -> VPolytope:
    """Hull of ``±x_i``; centrally symmetric about 0, linearly John-normalized."""
    while True:
        kk = int(rng.integers(n, 21)) if k is None else int(k)
        pts = _ball_points(n, kk, rng)
        try:
            body = VPolytope(np.vstack([pts, -pts]))
        except DegenerateInput:
            continue
        if body.volume > 1e-3:
            break
    return john_normalize(body, linear_only=True) if normalize else body


def vnorm_estimate(pm: PointMap | str, samples: int, seed: int, n: int = 2,
                   ctx: EvalContext | None = None) -> float:
    """Running max of ``|p(K) - g(K)|`` over random bodies in John position."""
    if samples < 1:
        raise InadmissibleParameters("samples must be >= 1")
    if isinstance(pm, str):
        pm = parse_map(pm)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        body = random_polytope(n, rng)
        best = max(best, float(np.linalg.norm(pm(body, ctx) - body.centroid)))
    return best


__all__ = [
    "BASE_MAPS", "CapParams", "DEFAULT_MAP_NAMES", "EquivarianceResidual", "EvalContext",
    "PointMap", "SetMap", "affine_combination", "cap_direction", "cap_map", "cap_qp_map",
    "cap_set_map", "compose", "equivariance_residual", "evaluate", "floating_map", "gdelta_map",
    "john_normalize", "parse_map", "phi_gauge", "polar_volume", "random_polytope",
    "random_symmetric", "registry", "santalo_point", "vnorm_estimate",
]
