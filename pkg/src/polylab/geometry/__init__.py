"""d-dimensional convex geometry: hulls, volumes, distances, bodies, affine maps."""

from .affine import AffineMap, affine_map, random_affine, random_shear
from .bodies import Ball, Box, ConvexBody, Ellipsoid, PolytopeBody, Simplex
from .distance import distance_to_convex, hausdorff_distance, symmetric_difference_volume
from .hull import convex_hull, default_tolerance
from .polytope import Polytope, contains, polytope_volume
from .steiner import SteinerConstants, ball_volume, sphere_area, steiner_ball_constants


def boundary_distance(K, x):
    """Distance from a point of K (or rows of an array) to the boundary of K."""
    return K.boundary_distance(x)


def john_ellipsoid_analytic(K):
    """(center, shape) of the maximum-volume inscribed ellipsoid {center + shape u : |u| <= 1}.

    Closed forms only (ball, ellipsoid, box, simplex); Unsupported otherwise.
    Dilating the returned ellipsoid by the dimension d about its center covers K.
    """
    return K.john_ellipsoid()


__all__ = [
    "AffineMap", "Ball", "Box", "ConvexBody", "Ellipsoid", "Polytope", "PolytopeBody",
    "Simplex", "SteinerConstants", "affine_map", "ball_volume", "boundary_distance",
    "contains", "convex_hull", "default_tolerance", "distance_to_convex",
    "hausdorff_distance", "john_ellipsoid_analytic", "polytope_volume", "random_affine",
    "random_shear", "sphere_area", "steiner_ball_constants", "symmetric_difference_volume",
]
