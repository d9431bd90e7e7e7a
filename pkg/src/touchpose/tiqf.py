"""Translation-invariant quaternion Kalman filter.

The filter state is the unnormalized rotation quaternion x (scalar-first),
believed Gaussian with mean x̄ and 4x4 covariance Σ. Each correspondence pair
(i, j) yields a skew-symmetric pseudo-measurement matrix H with H x = 0 for
the true rotation; the Kalman update pulls the state toward the null space of
the accumulated constraints. Translation is recovered separately from the
rotated centroids, which is what makes the rotation estimate
translation-invariant.

Two consumption regimes are provided:

* ``run_tiqf`` registers a batch of contacts, iterating nearest-neighbor
  correspondence and a full sweep of pair updates until the pose stops
  moving (ICP-style). The covariance restarts from the prior at each outer
  iteration so every re-matching gets a full-weight re-fit; optional
  deterministic rotation restarts escape local basins.
* ``incorporate_contact`` consumes a single new contact into a running
  belief, once. This is the sequential filtering mode used by the
  experiment harness and the lookahead planner.

Difference vectors are normalized to unit length before building H: the
quaternion constraint carries direction information only, and unnormalized
vectors make H generically full rank under noise (its Pfaffian is
|b|^2 - |r|^2), which annihilates the state. The measurement noise scale is
divided by the pair's baseline lengths, propagating the contact noise
through that normalization.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegeneratePairError, InvalidInputError, NumericalError
from .geometry.core import RigidPose, as_cloud, as_point
from .geometry.rotation import (
    IDENTITY_QUAT,
    geodesic_angle,
    quat_to_matrix,
    rotation_seeds,
)

_I4 = np.eye(4)
_COINCIDENT_EPS = 1e-12


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class BeliefState:
    """Gaussian belief over the 4-vector quaternion state."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=np.float64).reshape(4)
        c = np.asarray(self.covariance, dtype=np.float64).reshape(4, 4)
        if not (np.isfinite(m).all() and np.isfinite(c).all()):
            raise InvalidInputError("belief has non-finite entries")
        object.__setattr__(self, "mean", _frozen(m))
        object.__setattr__(self, "covariance", _frozen(c))

    @classmethod
    def initial(cls, covariance_scale, mean=None):
        if mean is None:
            mean = IDENTITY_QUAT
        return cls(mean, covariance_scale * _I4)


@dataclass(frozen=True)
class Correspondence:
    """Scene point paired with its model point (both meters)."""

    scene: np.ndarray
    model: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scene", _frozen(as_point(self.scene)))
        object.__setattr__(self, "model", _frozen(as_point(self.model)))


@dataclass(frozen=True)
class FilterConfig:
    rho: float = 1e-4
    max_outer_iterations: int = 100
    convergence_threshold_rotation: float = 1e-4  # rad
    convergence_threshold_translation: float = 1e-5  # m
    covariance_jitter: float = 1e-12

    def __post_init__(self):
        for name in ("rho", "max_outer_iterations", "convergence_threshold_rotation",
                     "convergence_threshold_translation", "covariance_jitter"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be positive")


@dataclass(frozen=True)
class PoseEstimate:
    pose: RigidPose
    belief: BeliefState


def _skew(v):
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def _pair_h(b, r):
    """H = [[0, -(b-r)^T], [(b-r), (b+r)^x]]."""
    d = b - r
    s = b + r
    H = np.empty((4, 4))
    H[0, 0] = 0.0
    H[0, 1:] = -d
    H[1:, 0] = d
    H[1:, 1:] = _skew(s)
    return H


def pair_difference_measurement(c_i, c_j):
    """Pseudo-measurement matrix from two correspondences.

    With b = s_j - s_i and r = o_j - o_i the returned H satisfies
    H q = 0 for the quaternion q of the true rotation on exact data.
    """
    b = c_j.scene - c_i.scene
    r = c_j.model - c_i.model
    if np.linalg.norm(b) < _COINCIDENT_EPS or np.linalg.norm(r) < _COINCIDENT_EPS:
        raise DegeneratePairError("coincident correspondence pair")
    return _pair_h(b, r)


def measurement_noise(belief, rho):
    """State-dependent pseudo-measurement covariance.

    Σʰ = ¼ ρ [ tr(x̄ x̄ᵀ + Σ) I - (x̄ x̄ᵀ + Σ) ], PSD for any PSD Σ.
    """
    M = np.outer(belief.mean, belief.mean) + belief.covariance
    return 0.25 * rho * (np.trace(M) * _I4 - M)


def normalize_belief(belief):
    """Rescale onto the unit sphere: mean / |mean|, covariance / |mean|^2."""
    n = float(np.linalg.norm(belief.mean))
    if n < 1e-12:
        raise NumericalError("cannot normalize near-zero quaternion mean")
    return BeliefState(belief.mean / n, belief.covariance / (n * n))


def _kalman_step(mean, cov, H, rho_eff, jitter):
    """One measurement update; returns (mean, cov) with mean renormalized."""
    M = np.outer(mean, mean) + cov
    Sh = 0.25 * rho_eff * (np.trace(M) * _I4 - M)
    S = H @ cov @ H.T + Sh
    S[np.diag_indices_from(S)] += jitter
    PHt = cov @ H.T
    try:
        K = np.linalg.solve(S.T, PHt.T).T
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"innovation covariance not invertible: {e}") from None
    mean = mean - K @ (H @ mean)
    cov = (_I4 - K @ H) @ cov
    n = np.linalg.norm(mean)
    if n < 1e-12:
        raise NumericalError("state annihilated by inconsistent measurement")
    return mean / n, cov


def kalman_update(belief, H, config, normalize=True):
    """Spec-form Kalman update with the zero pseudo-measurement target.

    x ← x̄ - K (H x̄), Σ ← (I - K H) Σ̄, K = Σ̄ Hᵀ (H Σ̄ Hᵀ + Σʰ)⁻¹.
    The result is renormalized via normalize_belief unless ``normalize`` is
    False (used by tests asserting the pre-normalization covariance trace).
    """
    Sh = measurement_noise(belief, config.rho)
    S = H @ belief.covariance @ H.T + Sh
    S[np.diag_indices_from(S)] += config.covariance_jitter
    PHt = belief.covariance @ H.T
    try:
        K = np.linalg.solve(S.T, PHt.T).T
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"innovation covariance not invertible: {e}") from None
    mean = belief.mean - K @ (H @ belief.mean)
    cov = (_I4 - K @ H) @ belief.covariance
    out = BeliefState(mean, cov)
    return normalize_belief(out) if normalize else out


def recover_translation(correspondences, rotation):
    """Least-squares translation given the rotation: t = c̄_s - R c̄_o."""
    if len(correspondences) == 0:
        raise InvalidInputError("no correspondences")
    S = np.array([c.scene for c in correspondences])
    O = np.array([c.model for c in correspondences])
    R = quat_to_matrix(rotation)
    return S.mean(axis=0) - R @ O.mean(axis=0)


def _ring_pairs(n):
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n >= 3:
        pairs.append((n - 1, 0))
    return pairs


def _sweep(mean, cov, scene, model_pts, pairs, rho, jitter):
    """Sequentially consume the pair measurements once each."""
    for i, j in pairs:
        b = scene[j] - scene[i]
        r = model_pts[j] - model_pts[i]
        nb = np.linalg.norm(b)
        nr = np.linalg.norm(r)
        if nb < _COINCIDENT_EPS or nr < _COINCIDENT_EPS:
            continue  # degenerate pair carries no rotation information
        H = _pair_h(b / nb, r / nr)
        mean, cov = _kalman_step(mean, cov, H, rho / (nb * nr), jitter)
    return mean, cov


class ModelIndex:
    """Nearest-neighbor index over a model cloud (build once, query often)."""

    def __init__(self, model):
        self.points = as_cloud(model)
        if len(self.points) == 0:
            raise InvalidInputError("empty model cloud")
        self._tree = cKDTree(self.points)

    def query(self, points):
        dists, idx = self._tree.query(points)
        return dists, idx


def run_tiqf(model, contacts, initial, config, *, initial_translation=None,
             correspondences=None, model_index=None, restarts=0):
    """Register a batch of contacts against the model cloud.

    With ``correspondences`` given (an (N, 3) array of model-frame points
    aligned with ``contacts``), the measurement list is fixed and consumed in
    a single sweep. Otherwise correspondences are re-established by nearest
    neighbor against the posed model each outer iteration and the loop runs
    until the rotation and translation changes drop below the configured
    thresholds; the covariance restarts from the prior each iteration so the
    re-fit keeps full weight.

    ``restarts`` adds deterministic rotation seeds around the initial mean;
    the run with the lowest mean nearest-neighbor residual wins (ties keep
    the earliest seed). Requires at least 3 contacts.
    """
    scene = as_cloud(contacts)
    if len(scene) < 3:
        raise InvalidInputError("run_tiqf needs at least 3 contacts")
    t0 = np.zeros(3) if initial_translation is None else as_point(initial_translation)

    if correspondences is not None:
        model_pts = as_cloud(correspondences)
        if model_pts.shape != scene.shape:
            raise InvalidInputError("correspondences must align with contacts")
        mean, cov = _sweep(initial.mean.copy(), initial.covariance.copy(),
                           scene, model_pts, _ring_pairs(len(scene)),
                           config.rho, config.covariance_jitter)
        pose = RigidPose(mean, _centroid_translation(scene, model_pts, mean))
        return PoseEstimate(pose, normalize_belief(BeliefState(mean, cov)))

    model_pts = as_cloud(model)
    index = model_index if model_index is not None else ModelIndex(model_pts)
    seeds = [initial.mean.copy()]
    if restarts > 0:
        seeds += rotation_seeds()[1:restarts + 1]

    best = None
    best_res = np.inf
    for seed in seeds:
        result, residual = _register_once(index, scene, seed, initial.covariance,
                                          t0, config)
        if residual < best_res:
            best, best_res = result, residual
    return best


def _centroid_translation(scene, model_pts, rotation):
    return scene.mean(axis=0) - quat_to_matrix(rotation) @ model_pts.mean(axis=0)


def _register_once(index, scene, mean0, cov0, t0, config):
    mean = mean0 / np.linalg.norm(mean0)
    t = t0.copy()
    cov = cov0.copy()
    prev_q, prev_t = mean.copy(), t.copy()
    model = index.points
    for _ in range(config.max_outer_iterations):
        cov = cov0.copy()
        R = quat_to_matrix(mean)
        _, idx = index.query((scene - t) @ R)  # NN against the posed model
        matched = model[idx]
        mean, cov = _sweep(mean, cov, scene, matched, _ring_pairs(len(scene)),
                           config.rho, config.covariance_jitter)
        t = _centroid_translation(scene, matched, mean)
        if (geodesic_angle(mean, prev_q) < config.convergence_threshold_rotation
                and np.linalg.norm(t - prev_t) < config.convergence_threshold_translation):
            break
        prev_q, prev_t = mean.copy(), t.copy()
    dists, _ = index.query((scene - t) @ quat_to_matrix(mean))
    pose = RigidPose(mean / np.linalg.norm(mean), t)
    estimate = PoseEstimate(pose, normalize_belief(BeliefState(mean, cov)))
    return estimate, float(dists.mean())


def incorporate_contact(estimate, scene, model_pts, config):
    """Sequential filter step: consume the newest contact's pair once.

    ``scene`` and ``model_pts`` are the full aligned contact history with the
    new contact in the last row. The new pair (previous contact, new contact)
    updates the carried belief; the translation is re-derived from all
    correspondences under the updated rotation. Returns a new PoseEstimate;
    inputs are never mutated.
    """
    scene = as_cloud(scene)
    model_pts = as_cloud(model_pts)
    if scene.shape != model_pts.shape or len(scene) < 2:
        raise InvalidInputError("need aligned scene/model histories with >= 2 contacts")
    n = len(scene)
    mean, cov = _sweep(estimate.belief.mean.copy(), estimate.belief.covariance.copy(),
                       scene, model_pts, [(n - 2, n - 1)],
                       config.rho, config.covariance_jitter)
    pose = RigidPose(mean, _centroid_translation(scene, model_pts, mean))
    return PoseEstimate(pose, normalize_belief(BeliefState(mean, cov)))
