"""Triangle meshes, ray casting and surface sampling.

Ray-triangle tests use the Moller-Trumbore parametric form, vectorized over
faces, with the determinant cutoff at 1e-12 and hits closer than 1e-9 along
the ray discarded (probes start outside the object by construction).
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import InvalidInputError
from .core import Ray, RigidPose, as_cloud

DET_EPS = 1e-12
MIN_HIT_T = 1e-9


@dataclass(frozen=True)
class TriangleMesh:
    """Immutable triangle surface: (V, 3) float vertices, (F, 3) int faces."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        verts = as_cloud(self.vertices)
        faces = np.asarray(self.faces, dtype=np.int64)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise InvalidInputError(f"expected (F, 3) face array, got {faces.shape}")
        if len(faces) == 0:
            raise InvalidInputError("mesh has no faces")
        if faces.min() < 0 or faces.max() >= len(verts):
            raise InvalidInputError("face index out of range")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "faces", faces)

    @classmethod
    def from_arrays(cls, vertices, faces):
        """Build a mesh, dropping degenerate (zero-area) faces."""
        verts = as_cloud(vertices)
        faces = np.asarray(faces, dtype=np.int64)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise InvalidInputError(f"expected (F, 3) face array, got {faces.shape}")
        if len(faces) and (faces.min() < 0 or faces.max() >= len(verts)):
            raise InvalidInputError("face index out of range")
        a, b, c = (verts[faces[:, k]] for k in range(3))
        area2 = np.linalg.norm(np.cross(b - a, c - a), axis=1)
        return cls(verts, faces[area2 > 0.0])

    @cached_property
    def _mt_arrays(self):
        # per-face v0 / edge1 / edge2, precomputed once for ray casting
        v0 = self.vertices[self.faces[:, 0]]
        e1 = self.vertices[self.faces[:, 1]] - v0
        e2 = self.vertices[self.faces[:, 2]] - v0
        return v0, e1, e2

    @cached_property
    def face_areas(self):
        _, e1, e2 = self._mt_arrays
        return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)

    def __len__(self):
        return len(self.faces)


def _ray_hits(origin, direction, mesh):
    """Per-face hit parameter t (inf where missed)."""
    v0, e1, e2 = mesh._mt_arrays
    pvec = np.cross(direction, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) > DET_EPS
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = origin - v0
    u = np.einsum("ij,ij->i", tvec, pvec) * inv_det
    qvec = np.cross(tvec, e1)
    v = qvec @ direction * inv_det
    t = np.einsum("ij,ij->i", e2, qvec) * inv_det
    hit = ok & (u >= 0.0) & (u <= 1.0) & (v >= 0.0) & (u + v <= 1.0) & (t >= MIN_HIT_T)
    return np.where(hit, t, np.inf)


def ray_mesh_intersect(ray, mesh, pose=None):
    """Nearest intersection of a world-frame ray with a posed mesh.

    Returns (point, distance) in the world frame, or None on miss. The ray is
    pulled back into the model frame (rigid transforms preserve the ray
    parameter), so the mesh arrays are never copied.
    """
    if pose is None:
        pose = RigidPose.identity()
    R = pose.matrix()
    origin = R.T @ (ray.origin - pose.translation)
    direction = R.T @ ray.direction
    t = _ray_hits(origin, direction, mesh)
    i = int(np.argmin(t))
    if not np.isfinite(t[i]):
        return None
    return ray.at(t[i]), float(t[i])


def sample_surface_points(mesh, count, seed=0):
    """Uniform-by-area points on the mesh surface, deterministic per seed.

    Used to densify the correspondence cloud beyond the vertex set.
    """
    if count <= 0:
        return np.empty((0, 3))
    rng = np.random.default_rng(seed)
    v0, e1, e2 = mesh._mt_arrays
    areas = mesh.face_areas
    fi = rng.choice(len(mesh.faces), size=count, p=areas / areas.sum())
    u = rng.random(count)
    v = rng.random(count)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    return v0[fi] + u[:, None] * e1[fi] + v[:, None] * e2[fi]


def surface_distance(points, mesh, pose=None):
    """Distance from each point to the nearest point on the posed mesh.

    Exact point-triangle distances (Ericson's region test), vectorized over
    faces; O(N_points * F). Intended for oracles and contact validation, not
    hot loops.
    """
    if pose is None:
        pose = RigidPose.identity()
    pts = pose.inverse().apply(as_cloud(points))
    v0, e1, e2 = mesh._mt_arrays
    out = np.empty(len(pts))
    for k, p in enumerate(pts):
        cp = _closest_on_triangles(p, v0, e1, e2)
        out[k] = np.sqrt(np.einsum("ij,ij->i", cp - p, cp - p).min())
    return out


def _closest_on_triangles(p, a, ab, ac):
    """Closest point to p on each triangle (a, a+ab, a+ac)."""
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = ap - ab
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = ap - ac
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = d1 / (d1 - d3)
        w_ac = d2 / (d2 - d6)
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        denom = va + vb + vc
        v_in = vb / denom
        w_in = vc / denom

    conds = [
        (d1 <= 0) & (d2 <= 0),                      # vertex a
        (d3 >= 0) & (d4 <= d3),                     # vertex b
        (d6 >= 0) & (d5 <= d6),                     # vertex c
        (vc <= 0) & (d1 >= 0) & (d3 <= 0),          # edge ab
        (vb <= 0) & (d2 >= 0) & (d6 <= 0),          # edge ac
        (va <= 0) & (d4 >= d3) & (d5 >= d6),        # edge bc
    ]
    v = np.select(conds, [0.0, 1.0, 0.0, v_ab, 0.0, 1.0 - w_bc], default=v_in)
    w = np.select(conds, [0.0, 0.0, 1.0, 0.0, w_ac, w_bc], default=w_in)
    return a + v[:, None] * ab + w[:, None] * ac
