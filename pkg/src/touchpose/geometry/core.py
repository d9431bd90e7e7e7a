"""Points, clouds, rigid poses, boxes, rays and the basic queries on them.

A point is a length-3 float ndarray; a point cloud is an (N, 3) ndarray whose
row order is stable (indices are identities). All operations are pure.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from .rotation import (
    IDENTITY_QUAT,
    geodesic_angle,
    quat_conjugate,
    quat_multiply,
    quat_normalize,
    quat_to_matrix,
)

UNIT_TOL = 1e-9


def as_point(p):
    p = np.asarray(p, dtype=np.float64).reshape(3)
    if not np.isfinite(p).all():
        raise InvalidInputError("point has non-finite coordinates")
    return p


def as_cloud(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInputError(f"expected (N, 3) point array, got {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidInputError("cloud has non-finite coordinates")
    return pts


@dataclass(frozen=True)
class RigidPose:
    """Rotation (unit quaternion, scalar-first) plus translation in meters."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=np.float64).reshape(4)
        t = as_point(self.translation)
        if abs(np.linalg.norm(q) - 1.0) > UNIT_TOL:
            raise InvalidInputError("rotation quaternion is not unit length")
        object.__setattr__(self, "rotation", q)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls):
        return cls(IDENTITY_QUAT.copy(), np.zeros(3))

    def matrix(self):
        return quat_to_matrix(self.rotation)

    def apply(self, points):
        """R p + t for a single point or an (N, 3) cloud."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.matrix().T + self.translation

    def compose(self, other):
        """self ∘ other: apply `other` first, then `self`."""
        q = quat_normalize(quat_multiply(self.rotation, other.rotation))
        t = self.apply(other.translation)
        return RigidPose(q, t)

    def inverse(self):
        q_inv = quat_conjugate(self.rotation)
        R_inv = quat_to_matrix(q_inv)
        return RigidPose(q_inv, -(R_inv @ self.translation))

    def rotation_angle_to(self, other):
        """Geodesic rotation angle (radians) between two poses."""
        return geodesic_angle(self.rotation, other.rotation)


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        lo, hi = as_point(self.min), as_point(self.max)
        if (lo > hi).any():
            raise InvalidInputError("box min exceeds max")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    def inflate(self, margin):
        return Aabb(self.min - margin, self.max + margin)

    @property
    def extent(self):
        return self.max - self.min


@dataclass(frozen=True)
class Ray:
    """Half-line with unit direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = as_point(self.origin)
        d = as_point(self.direction)
        if abs(np.linalg.norm(d) - 1.0) > UNIT_TOL:
            raise InvalidInputError("ray direction is not unit length")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)

    def at(self, t):
        return self.origin + t * self.direction


def transform_cloud(cloud, pose):
    """Apply a rigid pose to every point, preserving order."""
    return pose.apply(as_cloud(cloud))


def bounding_box(cloud):
    """Componentwise extrema of a non-empty cloud."""
    pts = as_cloud(cloud)
    if len(pts) == 0:
        raise InvalidInputError("bounding box of an empty cloud")
    return Aabb(pts.min(axis=0), pts.max(axis=0))


def nearest_neighbor(query, cloud):
    """Index and distance of the closest cloud point (ties: lowest index)."""
    pts = as_cloud(cloud)
    if len(pts) == 0:
        raise InvalidInputError("nearest neighbor in an empty cloud")
    q = as_point(query)
    d2 = np.einsum("ij,ij->i", pts - q, pts - q)
    idx = int(np.argmin(d2))
    return idx, float(np.sqrt(d2[idx]))
