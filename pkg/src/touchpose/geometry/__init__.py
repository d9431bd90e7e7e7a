"""Geometric substrate: clouds, poses, meshes, ray casting, PLY input."""
from .core import (
    Aabb,
    Ray,
    RigidPose,
    as_cloud,
    as_point,
    bounding_box,
    nearest_neighbor,
    transform_cloud,
)
from .mesh import TriangleMesh, ray_mesh_intersect, sample_surface_points, surface_distance
from .ply import load_mesh
from .rotation import (
    IDENTITY_QUAT,
    geodesic_angle,
    quat_from_axis_angle,
    quat_from_euler_xyz,
    quat_multiply,
    quat_normalize,
    quat_to_matrix,
    rotation_seeds,
)

__all__ = [
    "Aabb",
    "Ray",
    "RigidPose",
    "TriangleMesh",
    "IDENTITY_QUAT",
    "as_cloud",
    "as_point",
    "bounding_box",
    "geodesic_angle",
    "load_mesh",
    "nearest_neighbor",
    "quat_from_axis_angle",
    "quat_from_euler_xyz",
    "quat_multiply",
    "quat_normalize",
    "quat_to_matrix",
    "ray_mesh_intersect",
    "rotation_seeds",
    "sample_surface_points",
    "surface_distance",
    "transform_cloud",
]
