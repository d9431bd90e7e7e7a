"""The full simulated experiment: bootstrap, active touch loop, records."""
import logging
import math
import time

import numpy as np
from scipy.spatial import cKDTree

from ..active import PlannerConfig, sample_candidate_actions, select_next_action
from ..geometry.mesh import sample_surface_points
from ..geometry.ply import load_mesh
from ..tiqf import BeliefState, ModelIndex, incorporate_contact, run_tiqf
from .config import (
    STREAM_BOOTSTRAP,
    STREAM_NOISE,
    STREAM_PLANNER,
    STREAM_TRUTH,
    TouchRecord,
    cell_seed,
    seed_int,
)
from .csvio import sort_records, write_outputs
from .metrics import pose_errors, summarize
from .simulate import (
    bootstrap_with_correspondences,
    random_true_touch,
    sample_ground_truth,
    touch_with_correspondence,
)

log = logging.getLogger(__name__)

NEAREST_MODE_RESTARTS = 16


def _correspondence_cloud(mesh, spacing):
    """Vertices densified with surface samples down to the target spacing."""
    verts = mesh.vertices
    if spacing <= 0:
        return verts
    target = int(math.ceil(mesh.face_areas.sum() / (spacing * spacing)))
    extra = max(0, target - len(verts))
    if extra == 0:
        return verts
    return np.vstack([verts, sample_surface_points(mesh, extra, seed=0)])


def run_experiment(config):
    """Execute the configured (criterion x run) grid; returns TouchRecords.

    A failed cell is logged and skipped. When config.output_path is set the
    records and summary CSVs are written there as a side effect.
    """
    mesh = load_mesh(config.mesh_path)
    model = mesh.vertices  # error metrics and box sampling
    filter_cfg = config.filter_config()
    nearest = config.correspondence_mode == "nearest"
    model_index = None
    if nearest:
        model_index = ModelIndex(_correspondence_cloud(mesh, config.model_spacing))

    records = []
    for crit_index, crit_name in enumerate(config.criteria):
        criterion = config.criterion_for(crit_name)
        for run_id in range(config.runs):
            try:
                records.extend(_run_cell(config, mesh, model, filter_cfg,
                                          criterion, crit_name, crit_index,
                                          run_id, model_index))
            except Exception:
                log.exception("run failed (criterion=%s run=%d), skipping",
                              crit_name, run_id)
    records = sort_records(records)
    if config.output_path:
        write_outputs(records, summarize(records), config.output_path)
    return records


def _run_cell(config, mesh, model, filter_cfg, criterion, crit_name,
              crit_index, run_id, model_index):
    truth = sample_ground_truth(
        config, cell_seed(config, crit_index, run_id, STREAM_TRUTH))
    boot_rng = np.random.default_rng(
        cell_seed(config, crit_index, run_id, STREAM_BOOTSTRAP))
    noise_rng = np.random.default_rng(
        cell_seed(config, crit_index, run_id, STREAM_NOISE))
    nearest = model_index is not None

    scene, model_pts = bootstrap_with_correspondences(mesh, truth, config, boot_rng)
    belief = BeliefState.initial(config.initial_covariance_scale)
    if nearest:
        estimate = run_tiqf(model_index.points, scene, belief, filter_cfg,
                            model_index=model_index,
                            restarts=NEAREST_MODE_RESTARTS)
    else:
        estimate = run_tiqf(model, scene, belief, filter_cfg,
                            correspondences=model_pts)

    truth_tree = cKDTree(truth.pose.apply(model))
    records = []
    for touch_index in range(config.bootstrap_touches + 1, config.max_touches + 1):
        planner_cfg = PlannerConfig(
            candidates_per_step=config.candidates_per_step,
            criterion=criterion,
            rng_seed=seed_int(cell_seed(config, crit_index, run_id,
                                        STREAM_PLANNER, touch_index)),
            box_inflation=config.box_inflation,
        )
        t0 = time.perf_counter()
        candidates = sample_candidate_actions(estimate, model, planner_cfg)
        chosen, results = select_next_action(
            candidates, scene, model, mesh, estimate, filter_cfg, criterion,
            planner_cfg,
            contact_model_points=None if nearest else model_pts,
            model_index=model_index)
        planning_ms = 1e3 * (time.perf_counter() - t0)
        gain = next((r.gain for r in results if r.action is chosen), None)
        fallback = chosen.is_fallback

        touched = touch_with_correspondence(chosen.ray, mesh, truth,
                                            config.noise_std, noise_rng)
        if touched is None:
            # planned ray misses the true surface: re-probe at random
            _, touched = random_true_touch(mesh, truth, config, noise_rng)
            fallback = True
            gain = None
        noisy, true_model_pt = touched

        t0 = time.perf_counter()
        scene = np.vstack([scene, noisy])
        if nearest:
            # match the new contact against the model at the current estimate
            local = estimate.pose.inverse().apply(noisy)
            _, idx = model_index.query(local[None, :])
            matched = model_index.points[int(idx[0])]
            model_pts = np.vstack([model_pts, matched])
        else:
            model_pts = np.vstack([model_pts, true_model_pt])
        estimate = incorporate_contact(estimate, scene, model_pts, filter_cfg)
        filter_ms = 1e3 * (time.perf_counter() - t0)

        pos_err, rot_err, adi = pose_errors(estimate.pose, truth.pose, model,
                                            truth_tree)
        records.append(TouchRecord(
            run_id=run_id, criterion=crit_name, touch_index=touch_index,
            pos_err_m=pos_err, rot_err_deg=rot_err, adi_m=adi, gain=gain,
            planning_ms=planning_ms, filter_ms=filter_ms, fallback=fallback,
            selected_action=chosen, contact_point=noisy))
    return records
