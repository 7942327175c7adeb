"""Exact polytope algebra in the plane and in space."""
from .affine import AffineMap
from .bodyio import read_body, write_body
from .nets import DirectionNet
from .polytope import (HalfSpace, HPolytope, VPolytope, affine_apply, affine_rank, centroid,
                       chebyshev_center, clip, distance_to, enumerate_vertices, gauge, hausdorff,
                       polar, reduce, section_measure, support, translate, volume)

__all__ = [
    "AffineMap", "DirectionNet", "HalfSpace", "HPolytope", "VPolytope", "affine_apply",
    "affine_rank", "centroid", "chebyshev_center", "clip", "distance_to", "enumerate_vertices",
    "gauge", "hausdorff", "polar", "read_body", "reduce", "section_measure", "support",
    "translate", "volume", "write_body",
]
