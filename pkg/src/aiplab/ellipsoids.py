"""Löwner (minimum-volume enclosing) and John (maximum-volume inscribed) ellipsoids."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

from .errors import DegenerateInput, NoConvergence, Unbounded
from .geometry.polytope import HPolytope, VPolytope, _rank, chebyshev_center

MAX_ITER = 1_000_000


def default_tol(n: int) -> float:
    return 1e-7 if n <= 2 else 1e-6


def unit_ball_volume(n: int) -> float:
    return pi ** (n / 2) / gamma(n / 2 + 1)


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """The set {x : (x - c)^T E (x - c) <= 1}."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.array(self.center, dtype=float).reshape(-1)
        e = np.array(self.shape, dtype=float)
        e = 0.5 * (e + e.T)
        if e.shape != (c.size, c.size):
            raise ValueError(f"shape {e.shape} does not match center of size {c.size}")
        if not np.min(np.linalg.eigvalsh(e)) > 0.0:
            raise DegenerateInput("ellipsoid shape matrix is not positive definite")
        c.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", e)

    @classmethod
    def from_factor(cls, factor, center) -> "Ellipsoid":
        """Ellipsoid ``center + factor @ B``; the shape is ``(factor factor^T)^{-1}``."""
        f = np.asarray(factor, float)
        return cls(center, np.linalg.inv(f @ f.T))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def factor(self) -> np.ndarray:
        """Lower-triangular ``A`` with the ellipsoid equal to ``center + A B``."""
        return np.linalg.cholesky(np.linalg.inv(self.shape))

    @property
    def radii(self) -> np.ndarray:
        """Semi-axis lengths in increasing order."""
        return np.sort(1.0 / np.sqrt(np.linalg.eigvalsh(self.shape)))

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) / np.sqrt(np.linalg.det(self.shape))

    def quad(self, x) -> np.ndarray:
        d = np.atleast_2d(np.asarray(x, float)) - self.center
        return np.einsum("ij,jk,ik->i", d, self.shape, d)

    def support(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, float))
        a = self.factor
        return u @ self.center + np.linalg.norm(u @ a, axis=1)

    def boundary(self, directions) -> np.ndarray:
        return self.center + np.asarray(directions, float) @ self.factor.T

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "shape": self.shape.tolist()}


@dataclass(frozen=True)
class SolverReport:
    iterations: int
    relative_gap: float
    converged: bool
    weights: np.ndarray | None = field(default=None, repr=False, compare=False)


def _khachiyan(q, d, target, max_iter):
    """Weighted Khachiyan iteration with away steps on lifted points ``q`` (m, d)."""
    m = len(q)
    u = np.full(m, 1.0 / m)
    it = 0
    while True:
        x = q.T @ (u[:, None] * q)
        mm = np.einsum("ij,jk,ik->i", q, np.linalg.inv(x), q)
        j = int(np.argmax(mm))
        if mm[j] <= target:
            return u, mm, it
        if it >= max_iter:
            return u, mm, it
        it += 1
        active = u > 0.0
        k = int(np.flatnonzero(active)[np.argmin(mm[active])])
        if mm[j] - d >= d - mm[k]:
            step = (mm[j] - d) / (d * (mm[j] - 1.0))
            u *= 1.0 - step
            u[j] += step
        else:
            step = (d - mm[k]) / (d * (mm[k] - 1.0))
            cap = u[k] / (1.0 - u[k])
            if step >= cap:
                step = cap
                u *= 1.0 + step
                u[k] = 0.0
            else:
                u *= 1.0 + step
                u[k] -= step
        if it % 64 == 0 and mm[j] <= d * (1.0 + 1e-3):
            polished = _polish(q, u, d)
            if polished is not None:
                u = polished


def _polish(q, u, d):
    """Newton on the support conditions M_i(u) = d; None if it does not certify."""
    sup = np.flatnonzero(u > 1e-8 * np.max(u))
    w = u[sup].copy()
    qs = q[sup]
    for _ in range(30):
        x = qs.T @ (w[:, None] * qs)
        xi = np.linalg.inv(x)
        g = qs @ xi @ qs.T
        res = np.diag(g) - d
        if np.max(np.abs(res)) < 1e-14 * d:
            break
        jac = -(g ** 2)
        try:
            dw = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return None
        w = w + dw
        if np.any(w <= 0.0):
            return None
    full = np.zeros_like(u)
    full[sup] = w / np.sum(w)
    return full


def mvee(points, tol: float | None = None, max_iter: int = MAX_ITER):
    """Minimum-volume ellipsoid enclosing ``points``.

    Parameters
    ----------
    points : (m, n) array_like
    tol : float, optional
        Requested bound on ``max_i (v_i - c)^T E (v_i - c) - 1`` before the
        final rescaling; defaults to 1e-7 in the plane and 1e-6 in space.

    Returns
    -------
    Ellipsoid, SolverReport
        The returned ellipsoid is rescaled so every point satisfies the
        quadratic form bound with the largest value exactly 1; the report
        carries the dual weights, which certify near-optimality.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or not np.all(np.isfinite(p)):
        raise DegenerateInput("points must be a finite (m, n) array")
    m, n = p.shape
    if m < n + 1 or _rank(p) < n:
        raise DegenerateInput("points do not span the space")
    tol = default_tol(n) if tol is None else float(tol)
    if not 0.0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    # center the data for conditioning; the answer is shifted back at the end
    shift = p.mean(axis=0)
    scale = float(np.max(np.abs(p - shift)))
    x = (p - shift) / scale
    d = n + 1
    q = np.hstack([x, np.ones((m, 1))])
    inner = min(tol, 1e-10)
    u, mm, it = _khachiyan(q, d, d + n * inner, max_iter)
    c = u @ x
    sigma = x.T @ (u[:, None] * x) - np.outer(c, c)
    e = np.linalg.inv(sigma) / n
    quad = np.einsum("ij,jk,ik->i", x - c, e, x - c)
    worst = float(np.max(quad))
    gap = worst - 1.0
    if it >= max_iter and gap > tol:
        raise NoConvergence(f"mvee hit the iteration cap with gap {gap:.3g}")
    e = e / worst
    ell = Ellipsoid(shift + scale * c, e / scale ** 2)
    return ell, SolverReport(it, gap, gap <= tol, u)


def _tril_index(n):
    return np.tril_indices(n)


def mie(h: HPolytope, tol: float | None = None, max_newton: int = 500):
    """Maximum-volume ellipsoid inscribed in ``h`` by a barrier method.

    The ellipsoid is ``c + L B`` with ``L`` lower triangular and positive on
    the diagonal. The constraints ``|L^T u_i| <= b_i - <u_i, c>`` carry the
    second-order-cone barrier ``-log((b_i - <u_i,c>)^2 - |L^T u_i|^2)``, and
    the central path is followed until the duality gap bound ``2m / t``
    falls well below ``tol``.
    """
    a = h.normals
    b = h.offsets
    m, n = a.shape
    tol = default_tol(n) if tol is None else float(tol)
    if not 0.0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    h.vpolytope  # noqa: B018  raises Unbounded / EmptyPolytope early
    c0, rho = chebyshev_center(a, b)
    if rho <= 0.0:
        raise Unbounded("no interior")
    # normalize: center at the Chebyshev center, unit inradius
    b = (b - a @ c0) / rho
    rows, cols = _tril_index(n)
    nl = len(rows)
    nv = nl + n
    diag = np.flatnonzero(rows == cols)
    # w_i = L^T u_i is linear in the packed entries: d w_i[k] / d L[r, k] = u_i[r]
    lin_w = np.zeros((m, n, nv))
    for idx, (r, k) in enumerate(zip(rows, cols)):
        lin_w[:, k, idx] = a[:, r]
    lin = np.zeros((m, n + 1, nv))
    lin[:, 0, nl:] = -a
    lin[:, 1:, :] = lin_w

    def residual(z):
        r = np.einsum("mkv,v->mk", lin, z)
        r[:, 0] += b
        return r

    def barrier(z, t):
        r = residual(z)
        s = r[:, 0]
        g = s * s - np.einsum("mk,mk->m", r[:, 1:], r[:, 1:])
        ld = z[diag]
        if np.any(s <= 0.0) or np.any(g <= 0.0) or np.any(ld <= 0.0):
            return np.inf
        return -t * np.sum(np.log(ld)) - np.sum(np.log(g))

    z = np.zeros(nv)
    z[diag] = 0.5
    t = 1.0
    mu = 20.0
    inner = tol * 1e-2
    total = 0
    while True:
        last = np.inf
        for _ in range(max_newton):
            r = residual(z)
            jr = r.copy()
            jr[:, 1:] *= -1.0
            g = np.einsum("mk,mk->m", r, jr)
            grad = -2.0 * np.einsum("mkv,mk->v", lin, jr / g[:, None])
            hj = 4.0 * np.einsum("mk,ml->mkl", jr, jr) / (g ** 2)[:, None, None]
            hj[:, 0, 0] -= 2.0 / g
            idx = np.arange(1, n + 1)
            hj[:, idx, idx] += 2.0 / g[:, None]
            hess = np.einsum("mkv,mkl,mlw->vw", lin, hj, lin)
            ld = z[diag]
            grad[diag] -= t / ld
            hess[diag, diag] += t / ld ** 2
            step = -np.linalg.solve(hess, grad)
            dec = float(-grad @ step)
            total += 1
            # the decrement is affine invariant; 1e-9 leaves the iterate far
            # closer to the central path than the remaining gap 2m/t
            if dec / 2.0 <= 1e-9 or np.max(np.abs(step)) <= 1e-14 * np.max(np.abs(z)):
                break
            if dec < 1e-6 and dec >= last:
                break  # rounding floor reached
            last = dec
            f0 = barrier(z, t)
            s = 1.0
            while True:
                f1 = barrier(z + s * step, t)
                if f1 <= f0 - 0.25 * s * dec:
                    break
                s *= 0.5
                if s < 1e-14:
                    break
            if s < 1e-14:
                break
            z = z + s * step
        else:
            raise NoConvergence("mie centering did not converge")
        if 2.0 * m / t <= inner:
            break
        t *= mu
    lmat = np.zeros((n, n))
    lmat[rows, cols] = z[:nl]
    center = c0 + rho * z[nl:]
    factor = rho * lmat
    gap = float(np.expm1(2.0 * m / t))
    return Ellipsoid.from_factor(factor, center), SolverReport(total, gap, gap <= tol)


def _as_vpolytope(body) -> VPolytope:
    if isinstance(body, HPolytope):
        return body.vpolytope
    return body


def john_ellipsoid(body, tol=None):
    h = body if isinstance(body, HPolytope) else body.to_hpolytope()
    return mie(h, tol)


def loewner_ellipsoid(body, tol=None):
    return mvee(_as_vpolytope(body).vertices, tol)


def john_point(body, tol=None) -> np.ndarray:
    """Center j(K) of the maximal inscribed ellipsoid."""
    return john_ellipsoid(body, tol)[0].center


def loewner_point(body, tol=None) -> np.ndarray:
    """Center l(K) of the minimal enclosing ellipsoid."""
    return loewner_ellipsoid(body, tol)[0].center


__all__ = ["Ellipsoid", "SolverReport", "mvee", "mie", "john_point", "loewner_point",
           "john_ellipsoid", "loewner_ellipsoid", "default_tol", "unit_ball_volume"]
