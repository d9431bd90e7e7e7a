"""FastAPI service wrapping the estimation core.

Two surfaces:

* ``POST /experiments`` runs the full simulated protocol and returns the
  records plus ready-to-write CSV payloads (the CLI is a thin client of
  this endpoint).
* ``/sessions`` expose interactive estimation: create a session for a mesh,
  feed it world-frame contact points as they are acquired, read back the
  pose belief, and ask for the next best touch. Correspondences are closed
  by nearest neighbor against the current estimate, since an interactive
  client has no oracle.
"""
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..active import PlannerConfig, sample_candidate_actions, select_next_action
from ..errors import TouchPoseError
from ..geometry.core import RigidPose
from ..geometry.ply import load_mesh
from ..harness import ExperimentConfig, records_csv, run_experiment, summarize, summary_csv
from ..harness.experiment import NEAREST_MODE_RESTARTS, _correspondence_cloud
from ..infogain import DivergenceCriterion
from ..tiqf import BeliefState, FilterConfig, ModelIndex, PoseEstimate, incorporate_contact, run_tiqf
from . import schemas

MIN_CONTACTS = 3


@dataclass
class Session:
    session_id: str
    mesh_path: str
    mesh: object
    model_index: ModelIndex
    filter_config: FilterConfig
    initial_covariance_scale: float
    candidates_per_step: int
    box_inflation: float
    rng_seed: int
    scene: list = field(default_factory=list)
    model_pts: list = field(default_factory=list)
    estimate: PoseEstimate | None = None
    plan_count: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def contact_count(self):
        return len(self.scene)


def _pose_model(pose):
    return schemas.PoseModel(rotation=pose.rotation.tolist(),
                             translation=pose.translation.tolist())


def _belief_model(belief):
    return schemas.BeliefModel(mean=belief.mean.tolist(),
                               covariance=belief.covariance.tolist())


def create_app():
    app = FastAPI(title="touchpose", version=__version__)
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id):
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        return session

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/experiments", response_model=schemas.ExperimentResponse)
    def experiments(req: schemas.ExperimentRequest):
        try:
            config = ExperimentConfig(
                mesh_path=req.mesh_path,
                criteria=tuple(req.criteria),
                runs=req.runs,
                max_touches=req.max_touches,
                bootstrap_touches=req.bootstrap_touches,
                noise_std=req.noise_std,
                translation_range=req.translation_range,
                rotation_range_deg=req.rotation_range_deg,
                initial_covariance_scale=req.initial_covariance_scale,
                renyi_alpha=req.renyi_alpha,
                rho=req.rho,
                candidates_per_step=req.candidates_per_step,
                box_inflation=req.box_inflation,
                correspondence_mode=req.correspondence_mode,
                master_seed=req.master_seed,
            )
            records = run_experiment(config)
        except (TouchPoseError, OSError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        rows = [schemas.TouchRecordModel(
            run_id=r.run_id, criterion=r.criterion, touch_index=r.touch_index,
            pos_err_m=r.pos_err_m, rot_err_deg=r.rot_err_deg, adi_m=r.adi_m,
            gain=r.gain, planning_ms=r.planning_ms, filter_ms=r.filter_ms,
            fallback=r.fallback) for r in records]
        return schemas.ExperimentResponse(
            records=rows,
            records_csv=records_csv(records),
            summary_csv=summary_csv(summarize(records)) if records else "")

    @app.post("/sessions", response_model=schemas.SessionInfo, status_code=201)
    def create_session(req: schemas.SessionCreateRequest):
        try:
            mesh = load_mesh(req.mesh_path)
        except (TouchPoseError, OSError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        fp = req.filter or schemas.FilterParams(rho=req.rho)
        filter_config = FilterConfig(
            rho=req.rho if req.filter is None else fp.rho,
            max_outer_iterations=fp.max_outer_iterations,
            convergence_threshold_rotation=fp.convergence_threshold_rotation,
            convergence_threshold_translation=fp.convergence_threshold_translation,
            covariance_jitter=fp.covariance_jitter)
        session = Session(
            session_id=uuid.uuid4().hex,
            mesh_path=req.mesh_path,
            mesh=mesh,
            model_index=ModelIndex(_correspondence_cloud(mesh, 1e-3)),
            filter_config=filter_config,
            initial_covariance_scale=req.initial_covariance_scale,
            candidates_per_step=req.candidates_per_step,
            box_inflation=req.box_inflation,
            rng_seed=req.rng_seed)
        with registry_lock:
            sessions[session.session_id] = session
        return schemas.SessionInfo(session_id=session.session_id,
                                   mesh_path=req.mesh_path, contact_count=0)

    @app.get("/sessions/{session_id}", response_model=schemas.SessionInfo)
    def session_info(session_id: str):
        session = get_session(session_id)
        return schemas.SessionInfo(session_id=session.session_id,
                                   mesh_path=session.mesh_path,
                                   contact_count=session.contact_count)

    @app.get("/sessions/{session_id}/estimate",
             response_model=schemas.EstimateResponse)
    def estimate(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if session.estimate is None:
                raise HTTPException(
                    status_code=409,
                    detail=f"need >= {MIN_CONTACTS} contacts before estimating")
            return schemas.EstimateResponse(
                session_id=session.session_id,
                contact_count=session.contact_count,
                pose=_pose_model(session.estimate.pose),
                belief=_belief_model(session.estimate.belief))

    @app.post("/sessions/{session_id}/contacts",
              response_model=schemas.EstimateResponse)
    def add_contacts(session_id: str, req: schemas.AddContactsRequest):
        session = get_session(session_id)
        with session.lock:
            try:
                for p in req.points:
                    _add_contact(session, np.asarray(p, dtype=np.float64))
            except TouchPoseError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None
            if session.estimate is None:
                raise HTTPException(
                    status_code=202,
                    detail=f"{session.contact_count} contacts stored; "
                           f"estimation starts at {MIN_CONTACTS}")
            return schemas.EstimateResponse(
                session_id=session.session_id,
                contact_count=session.contact_count,
                pose=_pose_model(session.estimate.pose),
                belief=_belief_model(session.estimate.belief))

    @app.post("/sessions/{session_id}/plan", response_model=schemas.PlanResponse)
    def plan(session_id: str, req: schemas.PlanRequest):
        session = get_session(session_id)
        with session.lock:
            if session.estimate is None:
                raise HTTPException(
                    status_code=409,
                    detail=f"need >= {MIN_CONTACTS} contacts before planning")
            try:
                criterion = DivergenceCriterion.parse(req.criterion, req.alpha)
                seed = req.rng_seed
                if seed is None:
                    seed = session.rng_seed + session.plan_count
                planner = PlannerConfig(
                    candidates_per_step=req.candidates or session.candidates_per_step,
                    criterion=criterion,
                    rng_seed=seed,
                    box_inflation=session.box_inflation)
                scene = np.array(session.scene)
                candidates = sample_candidate_actions(
                    session.estimate, session.model_index.points, planner)
                action, results = select_next_action(
                    candidates, scene, session.model_index.points, session.mesh,
                    session.estimate, session.filter_config, criterion, planner,
                    model_index=session.model_index)
            except TouchPoseError as e:
                raise HTTPException(status_code=409, detail=str(e)) from None
            session.plan_count += 1
            gain = next((r.gain for r in results if r.action is action), None)
            return schemas.PlanResponse(
                session_id=session.session_id,
                action=schemas.ActionModel(
                    origin=action.ray.origin.tolist(),
                    direction=action.ray.direction.tolist(),
                    face_id=action.face_id,
                    predicted_contact=(None if action.predicted_contact is None
                                       else action.predicted_contact.tolist()),
                    fallback=action.is_fallback),
                gain=gain,
                evaluated=len(results))

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with registry_lock:
            if sessions.pop(session_id, None) is None:
                raise HTTPException(status_code=404, detail="unknown session id")

    return app


def _add_contact(session, point):
    session.scene.append(point)
    if session.contact_count < MIN_CONTACTS:
        session.model_pts.append(None)  # matched at first registration
        return
    scene = np.array(session.scene)
    if session.estimate is None:
        belief = BeliefState.initial(session.initial_covariance_scale)
        session.estimate = run_tiqf(
            session.model_index.points, scene, belief, session.filter_config,
            model_index=session.model_index, restarts=NEAREST_MODE_RESTARTS)
        # backfill correspondences at the registered pose
        local = session.estimate.pose.inverse().apply(scene)
        _, idx = session.model_index.query(local)
        session.model_pts = [session.model_index.points[int(i)] for i in idx]
        return
    local = session.estimate.pose.inverse().apply(point)
    _, idx = session.model_index.query(local[None, :])
    session.model_pts.append(session.model_index.points[int(idx[0])])
    session.estimate = incorporate_contact(
        session.estimate, scene, np.array(session.model_pts),
        session.filter_config)


app = create_app()


def main(argv=None):
    """Console entry point: run the service under uvicorn."""
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="touchpose-serve",
                                     description="Serve the touchpose HTTP API")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run("touchpose.service.app:app", host=args.host, port=args.port)


if __name__ == "__main__":
    main()
