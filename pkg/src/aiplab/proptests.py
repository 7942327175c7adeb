"""Randomized invariant suites behind ``aiplab proptest`` and the acceptance tests.

Each trial draws its body from ``numpy.random.default_rng(seed + i)``, so a
failing trial is replayed from its seed alone. Dimensions alternate between
2 and 3 with the parity of the trial seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .ellipsoids import unit_ball_volume
from .errors import InadmissibleParameters
from .floating import FloatingParams, default_net, floating_body, lemma_fa_check, net_error_bound
from .geometry.affine import AffineMap
from .geometry.polytope import VPolytope, affine_apply, section_measure
from .points import EvalContext, parse_map, random_polytope

EQUIVARIANCE_TOLERANCES = {"g": 1e-7, "gdelta:0.1": 1e-7, "s": 1e-4, "j": 1e-4, "l": 1e-4}
MAPS_PER_BODY = 5


@dataclass(frozen=True)
class Trial:
    """Residuals of one seed, keyed by property name (positive = worse)."""

    seed: int
    residuals: dict


@dataclass(frozen=True)
class PropertySummary:
    suite: str
    name: str
    trials: int
    max_residual: float
    tolerance: float
    violations: int
    min_failing_seed: int | None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def trial_dimension(seed: int) -> int:
    return 2 + seed % 2


# ------------------------------------------------------------------ oracles


def surface_moments(p: VPolytope):
    """Volume and first moment of P from boundary integrals only.

    Uses ``|P| = (1/n) ∮ <x, nu>`` and ``∫_P x_i = (1/2) ∮ x_i^2 nu_i``, with
    the exact integral of a quadratic over a simplex, so it shares nothing
    with the fan triangulation behind :attr:`VPolytope.volume`.
    """
    n = p.dim
    simp = p.vertices[p.simplices]                 # (F, n, n)
    nu = p._hull.normals
    if n == 2:
        area = np.linalg.norm(simp[:, 1] - simp[:, 0], axis=1)
    else:
        area = 0.5 * np.linalg.norm(np.cross(simp[:, 1] - simp[:, 0], simp[:, 2] - simp[:, 0]),
                                    axis=1)
    mean = simp.mean(axis=1)
    vol = float(np.sum(area * np.einsum("fi,fi->f", mean, nu))) / n
    # ∫_T x^2 over a (n-1)-simplex T with n vertices: |T| (sum v^2 + (sum v)^2) / (n (n+1))
    sq = (np.sum(simp ** 2, axis=1) + np.sum(simp, axis=1) ** 2) / (n * (n + 1))
    first = 0.5 * np.sum(area[:, None] * sq * nu, axis=0)
    return vol, first


# ------------------------------------------------------------------ suites


def _equivariance_trial(seed, tolerances, maps_per_body):
    rng = np.random.default_rng(seed)
    n = trial_dimension(seed)
    body = random_polytope(n, rng)
    ctx = EvalContext()
    res = {}
    maps = {name: parse_map(name) for name in tolerances}
    base = {name: pm(body, ctx) for name, pm in maps.items()}
    transforms = [AffineMap.random(n, rng) for _ in range(maps_per_body)]
    for t in transforms:
        tb = affine_apply(t, body)
        tctx = ctx.transformed(t)
        for name, pm in maps.items():
            r = float(np.linalg.norm(pm(tb, tctx) - t(base[name])) / tb.diameter)
            res[name] = max(res.get(name, 0.0), r)
    return res


def _inclusion_trial(seed):
    rng = np.random.default_rng(seed)
    n = trial_dimension(seed)
    body = random_polytope(n, rng)
    delta = float(rng.uniform(0.01, 0.2))
    net = default_net(n)
    k1 = floating_body(body, FloatingParams(delta, net))
    k2 = floating_body(body, FloatingParams(delta / 2.0, net))
    slack_bound = net_error_bound(body, net)

    def outside(inner, outer):
        s = outer.facet_offsets[None, :] - inner.vertices @ outer.facet_normals.T
        return float(-np.min(s))

    # K_delta ⊆ K_{delta/2} ⊆ K up to the net error
    nested = max(outside(k1, k2), outside(k2, body)) - slack_bound
    vol, first = surface_moments(body)
    vd, fd = surface_moments(k1)
    rim_first = first - fd
    lhs = k1.volume * k1.centroid + rim_first
    scale = body.volume * max(1.0, float(np.max(np.abs(body.vertices))))
    recon = float(np.linalg.norm(lhs - body.volume * body.centroid)) / scale
    return {"nested": max(0.0, nested), "reconstruction": recon}


def _brunn_minkowski_trial(seed, midpoints=20):
    rng = np.random.default_rng(seed)
    n = trial_dimension(seed)
    body = random_polytope(n, rng)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    h = body.vertices @ u
    lo, hi = float(h.min()), float(h.max())
    worst = 0.0
    power = 1.0 / (n - 1)

    def f(t):
        return section_measure(body, u, t) ** power

    for _ in range(midpoints):
        t1, t2 = np.sort(rng.uniform(lo, hi, 2))
        gap = 0.5 * (f(t1) + f(t2)) - f(0.5 * (t1 + t2))
        worst = max(worst, gap)
    return {"concavity": worst}


def boule_bound(p: VPolytope) -> float:
    """Lower bound ``|P| / ((n+1) D^{n-1} |B^{n-1}|)`` on the inradius about g(P)."""
    n = p.dim
    g = p.centroid
    d_out = float(np.max(np.linalg.norm(p.vertices - g, axis=1)))
    return p.volume / ((n + 1) * d_out ** (n - 1) * unit_ball_volume(n - 1))


def centered_inradius(p: VPolytope) -> float:
    return float(np.min(p.slack(p.centroid)))


def _boule_trial(seed):
    rng = np.random.default_rng(seed)
    body = random_polytope(trial_dimension(seed), rng)
    return {"inradius": max(0.0, boule_bound(body) - centered_inradius(body))}


def _lemma31_trial(seed, samples=1):
    rng = np.random.default_rng(seed)
    n = trial_dimension(seed)
    body = random_polytope(n, rng)
    worst = -math.inf
    for _ in range(samples):
        u = rng.standard_normal(n)
        delta = float(rng.uniform(0.0, 0.5))
        while delta <= 0.0:
            delta = float(rng.uniform(0.0, 0.5))
        lhs, rhs = lemma_fa_check(body, u, delta)
        worst = max(worst, rhs - lhs)
    return {"section": max(0.0, worst)}


SUITES = {
    "equivariance": (lambda s: _equivariance_trial(s, EQUIVARIANCE_TOLERANCES, MAPS_PER_BODY),
                     EQUIVARIANCE_TOLERANCES),
    "inclusion": (_inclusion_trial, {"nested": 0.0, "reconstruction": 1e-8}),
    "brunn-minkowski": (_brunn_minkowski_trial, {"concavity": 1e-8}),
    "boule": (_boule_trial, {"inradius": 0.0}),
    "lemma31": (_lemma31_trial, {"section": 1e-8}),
}


def run_trials(suite: str, trials: int, seed: int) -> list:
    """Raw per-seed residuals of a suite, in seed order."""
    if suite not in SUITES:
        raise InadmissibleParameters(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if trials < 1:
        raise InadmissibleParameters("trials must be >= 1")
    fn, _ = SUITES[suite]
    seeds = [seed + i for i in range(trials)]
    return [Trial(s, r) for s, r in zip(seeds, ordered_map(fn, seeds))]


def summarize(suite: str, results: list, tol: float | None = None) -> list:
    """One summary per property; ``tol`` overrides every default tolerance."""
    _, tolerances = SUITES[suite]
    out = []
    for name, default in tolerances.items():
        limit = default if tol is None else float(tol)
        vals = [(t.residuals[name], t.seed) for t in results]
        failing = [s for v, s in vals if not v <= limit]
        out.append(PropertySummary(suite, name, len(results), max(v for v, _ in vals), limit,
                                   len(failing), min(failing) if failing else None))
    return out


def run_suite(suite: str, trials: int, seed: int, tol: float | None = None) -> list:
    return summarize(suite, run_trials(suite, trials, seed), tol)
