"""Affine invariant points of convex polytopes in the plane and in space."""
__version__ = "0.1.0"

from .errors import LabError
from .geometry import AffineMap, DirectionNet, HPolytope, VPolytope, read_body, write_body
from .ellipsoids import john_ellipsoid, john_point, loewner_ellipsoid, loewner_point
from .floating import FloatingParams, floating_body, floating_centroid, sw_functional, sw_limit
from .points import EvalContext, evaluate, parse_map, santalo_point

__all__ = [
    "AffineMap", "DirectionNet", "EvalContext", "FloatingParams", "HPolytope", "LabError",
    "VPolytope", "evaluate", "floating_body", "floating_centroid", "john_ellipsoid",
    "john_point", "loewner_ellipsoid", "loewner_point", "parse_map", "read_body",
    "santalo_point", "sw_functional", "sw_limit", "write_body",
]
