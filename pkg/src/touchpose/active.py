"""Next-best-touch planner with one-step lookahead information gain.

Candidate probe rays are sampled uniformly over the faces of the (inflated)
bounding box of the model at the current pose estimate, pointing along the
inward face normal. Each candidate's hypothetical contact is predicted by
ray-mesh intersection against the estimated pose; a hypothetical filter
update yields a posterior belief, and the candidate maximizing the
divergence between posterior and current belief is selected.

Planner calls never mutate the live belief, contact history or estimate.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError, PlanningError
from .geometry.core import Ray, bounding_box, transform_cloud
from .geometry.mesh import ray_mesh_intersect
from .infogain import DivergenceCriterion, GaussianParams, evaluate
from .tiqf import BeliefState, FilterConfig, incorporate_contact, run_tiqf

log = logging.getLogger(__name__)

# face_id layout: (axis, side) = (id // 2, id % 2); side 0 = min face, 1 = max
_FACE_AXIS = np.array([0, 0, 1, 1, 2, 2])
_FACE_SIDE = np.array([0, 1, 0, 1, 0, 1])


@dataclass(frozen=True)
class TouchAction:
    """A probe ray sampled from one of the six box faces."""

    ray: Ray
    face_id: int
    predicted_contact: np.ndarray | None = None
    is_fallback: bool = False


@dataclass(frozen=True)
class PlannerConfig:
    candidates_per_step: int = 30
    criterion: DivergenceCriterion = None
    rng_seed: int = 0
    box_inflation: float = 0.02

    def __post_init__(self):
        if self.candidates_per_step < 1:
            raise InvalidInputError("candidates_per_step must be >= 1")
        if self.box_inflation < 0:
            raise InvalidInputError("box_inflation must be non-negative")


@dataclass(frozen=True)
class LookaheadResult:
    action: TouchAction
    hypothetical_posterior: BeliefState
    gain: float


def _face_areas(extent):
    ex, ey, ez = extent
    return np.array([ey * ez, ey * ez, ex * ez, ex * ez, ex * ey, ex * ey])


def _sample_face_actions(box, count, rng):
    areas = _face_areas(box.extent)
    total = areas.sum()
    probs = areas / total if total > 0 else np.full(6, 1.0 / 6.0)
    actions = []
    for _ in range(count):
        face_id = int(rng.choice(6, p=probs))
        axis = _FACE_AXIS[face_id]
        side = _FACE_SIDE[face_id]
        origin = box.min + rng.random(3) * box.extent
        origin[axis] = box.min[axis] if side == 0 else box.max[axis]
        direction = np.zeros(3)
        direction[axis] = 1.0 if side == 0 else -1.0  # inward normal
        actions.append(TouchAction(Ray(origin, direction), face_id))
    return actions


def sample_candidate_actions(estimate, model, config):
    """Candidate probe rays on the posed model's inflated bounding box.

    Faces are chosen with probability proportional to area, the origin is
    uniform on the face, and the direction is the inward face normal.
    Deterministic for a fixed config.rng_seed.
    """
    box = bounding_box(transform_cloud(model, estimate.pose))
    box = box.inflate(config.box_inflation)
    rng = np.random.default_rng(config.rng_seed)
    return _sample_face_actions(box, config.candidates_per_step, rng)


def predict_measurement(action, mesh, estimate):
    """Hypothetical contact: nearest ray hit on the mesh at the estimate."""
    hit = ray_mesh_intersect(action.ray, mesh, estimate.pose)
    return None if hit is None else hit[0]


def lookahead(action, contacts, model, mesh, estimate, filter_config, criterion,
              *, contact_model_points=None, model_index=None):
    """Hypothetical posterior and information gain for one candidate.

    Returns None when the ray misses the estimated mesh or the hypothetical
    filter update fails numerically (the candidate is skipped, not fatal).
    The gain is D(posterior || current belief) on the quaternion-state
    Gaussians. The live belief and contact set are never modified.
    """
    predicted = predict_measurement(action, mesh, estimate)
    if predicted is None:
        return None
    action = replace(action, predicted_contact=predicted)
    try:
        if contact_model_points is not None:
            # sequential mode: the predicted contact's model-frame point is
            # exact by construction (it lies on the estimated surface)
            scene = np.vstack([contacts, predicted])
            model_hist = np.vstack([contact_model_points,
                                    estimate.pose.inverse().apply(predicted)])
            hypo = incorporate_contact(estimate, scene, model_hist, filter_config)
        else:
            scene = np.vstack([contacts, predicted])
            hypo = run_tiqf(model, scene, estimate.belief, filter_config,
                            initial_translation=estimate.pose.translation,
                            model_index=model_index)
        gain = evaluate(criterion,
                        GaussianParams.from_belief(hypo.belief),
                        GaussianParams.from_belief(estimate.belief))
    except Exception as e:  # noqa: BLE001 - candidate failures are non-fatal
        log.warning("lookahead candidate discarded: %s", e)
        return None
    return LookaheadResult(action, hypo.belief, float(gain))


def select_next_action(candidates, contacts, model, mesh, estimate,
                       filter_config, criterion, planner_config,
                       *, contact_model_points=None, model_index=None):
    """Pick the gain-maximizing candidate (ties: lowest candidate index).

    If every candidate misses the estimated mesh, falls back to rejection
    sampling of a random hitting ray (flagged via ``is_fallback``); more than
    10x candidates_per_step failed attempts raise PlanningError.
    """
    if len(candidates) == 0:
        raise InvalidInputError("no candidate actions")
    kwargs = dict(contact_model_points=contact_model_points, model_index=model_index)
    results = []
    best = None
    for cand in candidates:
        res = lookahead(cand, contacts, model, mesh, estimate, filter_config,
                        criterion, **kwargs)
        if res is None:
            continue
        results.append(res)
        if best is None or res.gain > best.gain:
            best = res
    if best is not None:
        return best.action, results

    # all candidates missed: rejection-sample a hitting ray
    box = bounding_box(transform_cloud(model, estimate.pose))
    box = box.inflate(planner_config.box_inflation)
    rng = np.random.default_rng([planner_config.rng_seed, 0x5EED])
    max_attempts = 10 * planner_config.candidates_per_step
    for _ in range(max_attempts):
        action = _sample_face_actions(box, 1, rng)[0]
        res = lookahead(action, contacts, model, mesh, estimate, filter_config,
                        criterion, **kwargs)
        if res is not None:
            action = replace(res.action, is_fallback=True)
            results.append(replace(res, action=action))
            return action, results
    raise PlanningError(
        f"no hitting ray found in {max_attempts} fallback attempts")
