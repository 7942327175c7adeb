"""Invertible affine maps x -> Mx + t."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularMap

DET_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class AffineMap:
    matrix: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        t = np.array(self.translation, dtype=float).reshape(-1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != t.shape[0]:
            raise ValueError(f"incompatible shapes {m.shape} and {t.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(t))):
            raise SingularMap("non-finite affine map")
        if abs(np.linalg.det(m)) <= DET_FLOOR or not np.isfinite(np.linalg.cond(m)):
            raise SingularMap(f"|det M| = {abs(np.linalg.det(m)):.3g} <= {DET_FLOOR}")
        m.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    @property
    def cond(self) -> float:
        return float(np.linalg.cond(self.matrix))

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(np.eye(n), np.zeros(n))

    @classmethod
    def translation_by(cls, t) -> "AffineMap":
        t = np.asarray(t, dtype=float)
        return cls(np.eye(t.size), t)

    @classmethod
    def linear(cls, m) -> "AffineMap":
        m = np.asarray(m, dtype=float)
        return cls(m, np.zeros(m.shape[0]))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, max_cond: float = 10.0,
               shift: float = 1.0) -> "AffineMap":
        """Random map with condition number at most ``max_cond``.

        Built from two Haar rotations around log-uniform singular values, so the
        bound holds by construction rather than by rejection.
        """
        q1 = _haar(n, rng)
        q2 = _haar(n, rng)
        logs = rng.uniform(0.0, np.log(max_cond), size=n)
        logs[0], logs[-1] = 0.0, rng.uniform(0.0, np.log(max_cond))
        scale = np.exp(rng.uniform(-0.5, 0.5))
        m = scale * (q1 * np.exp(logs)) @ q2
        return cls(m, rng.uniform(-shift, shift, size=n))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.matrix.T + self.translation

    def linear_part(self, v):
        return np.asarray(v, dtype=float) @ self.matrix.T

    def inverse(self) -> "AffineMap":
        minv = np.linalg.inv(self.matrix)
        return AffineMap(minv, -minv @ self.translation)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self o other``."""
        return AffineMap(self.matrix @ other.matrix,
                         self.matrix @ other.translation + self.translation)

    def push_directions(self, directions):
        """Image of unit normals under the map: u -> M^{-T}u / |M^{-T}u|.

        A halfspace <x,u> <= a is carried by the map onto a halfspace with this
        normal, which is how direction nets are transported.
        """
        d = np.linalg.solve(self.matrix.T, np.asarray(directions, dtype=float).T).T
        return d / np.linalg.norm(d, axis=1, keepdims=True)


def _haar(n, rng):
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))
