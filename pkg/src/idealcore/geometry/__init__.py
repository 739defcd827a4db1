"""Convex-geometry kernel: LP, polytopes, hull membership, Hausdorff distance."""

from .hull import (
    HullMembership,
    Separation,
    distance_to_hull,
    hausdorff_distance,
    hull_membership,
    min_norm_point,
)
from .lp import LPResult, LPSizeError, lp_solve
from .polytope import Halfspace, Polytope, affine_frame, convex_hull_vertices, support_value

__all__ = [
    "Halfspace",
    "HullMembership",
    "LPResult",
    "LPSizeError",
    "Polytope",
    "Separation",
    "affine_frame",
    "convex_hull_vertices",
    "distance_to_hull",
    "hausdorff_distance",
    "hull_membership",
    "lp_solve",
    "min_norm_point",
    "support_value",
]
