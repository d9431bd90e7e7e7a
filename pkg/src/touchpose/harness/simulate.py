"""Ground-truth sampling and the simulated touch probe."""
import numpy as np

from ..errors import SimulationError
from ..geometry.core import RigidPose, bounding_box
from ..geometry.mesh import ray_mesh_intersect
from ..geometry.rotation import quat_from_euler_xyz
from .config import GroundTruth

MAX_CONSECUTIVE_MISSES = 1000


def sample_ground_truth(config, seed):
    """Random true pose: translation uniform in ±range, Euler xyz in ±range."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(-config.translation_range, config.translation_range, 3)
    lim = np.deg2rad(config.rotation_range_deg)
    angles = rng.uniform(-lim, lim, 3)
    return GroundTruth(RigidPose(quat_from_euler_xyz(*angles), t))


def touch_with_correspondence(ray, mesh, truth, noise_std, rng):
    """Probe the true-posed mesh along a ray.

    Returns (noisy world contact, exact model-frame contact point) or None on
    miss. Gaussian noise with std noise_std is added per coordinate; the
    model-frame point is the sim-side ground-truth correspondence.
    """
    hit = ray_mesh_intersect(ray, mesh, truth.pose)
    if hit is None:
        return None
    point, _ = hit
    noisy = point + rng.normal(0.0, noise_std, 3) if noise_std > 0 else point.copy()
    return noisy, truth.pose.inverse().apply(point)


def simulate_touch(ray, mesh, truth, noise_std, rng):
    """Noisy contact of a ray with the true-posed mesh, or None on miss."""
    out = touch_with_correspondence(ray, mesh, truth, noise_std, rng)
    return None if out is None else out[0]


def _random_box_ray(box, rng):
    # same face-sampling scheme as the planner, on an arbitrary box
    from ..active import _sample_face_actions
    return _sample_face_actions(box, 1, rng)[0].ray


def random_true_touch(mesh, truth, config, rng):
    """Random probe rays around the true pose until one yields a contact."""
    box = bounding_box(truth.pose.apply(mesh.vertices)).inflate(config.box_inflation)
    for _ in range(MAX_CONSECUTIVE_MISSES):
        ray = _random_box_ray(box, rng)
        out = touch_with_correspondence(ray, mesh, truth, config.noise_std, rng)
        if out is not None:
            return ray, out
    raise SimulationError(
        f"no contact in {MAX_CONSECUTIVE_MISSES} random probes")


def bootstrap_with_correspondences(mesh, truth, config, rng):
    """Initial random contacts: (scene (B,3), model (B,3)) arrays."""
    scene, model_pts = [], []
    while len(scene) < config.bootstrap_touches:
        _, (noisy, model_pt) = random_true_touch(mesh, truth, config, rng)
        scene.append(noisy)
        model_pts.append(model_pt)
    return np.array(scene), np.array(model_pts)


def bootstrap(mesh, truth, config, rng):
    """Initial random noisy contacts collected around the true pose."""
    scene, _ = bootstrap_with_correspondences(mesh, truth, config, rng)
    return scene
