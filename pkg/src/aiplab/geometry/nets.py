"""Finite direction sets covering the unit sphere."""
from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.spatial import SphericalVoronoi

from ..errors import UnsupportedDimension


class DirectionNet:
    """Unit vectors covering S^{n-1}, with covering radius ``mesh`` (chordal).

    Every unit vector lies within Euclidean distance ``mesh`` of some net
    vector, equivalently within angle ``arccos(1 - mesh**2 / 2)``.

    Parameters
    ----------
    dim : int
        Ambient dimension, 2 or 3.
    size : int
        Requested number of directions. In the plane it is rounded up to a
        multiple of 4 so that the coordinate directions are included; in space
        the six vectors ``±e_i`` are added to a Fibonacci lattice of about
        ``size - 6`` points. That lattice covers one hemisphere and is
        mirrored, so every spatial net is symmetric under ``u -> -u``.
    """

    def __init__(self, dim: int, size: int):
        if dim == 2:
            size = max(4, 4 * (-(-int(size) // 4)))
            ang = 2.0 * np.pi * np.arange(size) / size
            d = np.column_stack([np.cos(ang), np.sin(ang)])
            # pin the axis directions exactly
            q = size // 4
            d[0], d[q], d[2 * q], d[3 * q] = [1, 0], [0, 1], [-1, 0], [0, -1]
            self._mesh = 2.0 * np.sin(np.pi / (2 * size))
        elif dim == 3:
            k = max((int(size) - 6) // 2, 4)
            i = np.arange(k) + 0.5
            z = 1.0 - i / k
            phi = np.pi * (3.0 - np.sqrt(5.0)) * i
            rho = np.sqrt(1.0 - z * z)
            fib = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
            axes = np.vstack([np.eye(3), -np.eye(3)])
            d = np.vstack([axes, fib, -fib])
            d /= np.linalg.norm(d, axis=1, keepdims=True)
            self._mesh = None
        else:
            raise UnsupportedDimension(f"direction nets are built for n = 2, 3, got {dim}")
        d.setflags(write=False)
        self.dim = dim
        self.directions = d

    @classmethod
    def from_directions(cls, directions, mesh=None) -> "DirectionNet":
        """Wrap an explicit direction set, e.g. one transported by an affine map."""
        d = np.array(directions, dtype=float)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        d.setflags(write=False)
        net = cls.__new__(cls)
        net.dim = d.shape[1]
        net.directions = d
        net._mesh = mesh
        return net

    def __len__(self):
        return len(self.directions)

    def __repr__(self):
        return f"DirectionNet(dim={self.dim}, size={len(self)})"

    @cached_property
    def mesh(self) -> float:
        if self._mesh is not None:
            return float(self._mesh)
        return _covering_radius(self.directions)

    @property
    def angle(self) -> float:
        """Angular covering radius."""
        return float(2.0 * np.arcsin(min(1.0, self.mesh / 2.0)))

    def transported(self, t) -> "DirectionNet":
        """Normals of the halfspaces carried by the affine map ``t``."""
        return DirectionNet.from_directions(t.push_directions(self.directions))

    def sphere_points(self, center=None, radius: float = 1.0) -> np.ndarray:
        c = np.zeros(self.dim) if center is None else np.asarray(center, float)
        return c + radius * self.directions


def _covering_radius(d) -> float:
    if d.shape[1] == 2:
        ang = np.sort(np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * np.pi))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * np.pi]]))
        return float(2.0 * np.sin(np.max(gaps) / 4.0))
    sv = SphericalVoronoi(d, radius=1.0, center=np.zeros(3))
    worst = 0.0
    for gen, region in enumerate(sv.regions):
        worst = max(worst, float(np.max(np.linalg.norm(sv.vertices[region] - d[gen], axis=1))))
    return worst
