"""Pydantic request/response models for the HTTP API."""
from pydantic import BaseModel, Field

Vec3 = list[float]
Vec4 = list[float]


class HealthResponse(BaseModel):
    status: str
    version: str


class FilterParams(BaseModel):
    rho: float = 1e-4
    max_outer_iterations: int = 100
    convergence_threshold_rotation: float = 1e-4
    convergence_threshold_translation: float = 1e-5
    covariance_jitter: float = 1e-12


class ExperimentRequest(BaseModel):
    mesh_path: str
    criteria: list[str] = ["kl", "renyi", "fisher", "bhattacharyya", "wasserstein"]
    runs: int = 6
    max_touches: int = 15
    bootstrap_touches: int = 3
    noise_std: float = 5e-3
    translation_range: float = 0.05
    rotation_range_deg: float = 30.0
    initial_covariance_scale: float = 1e4
    renyi_alpha: float = 0.3
    rho: float = 0.12
    candidates_per_step: int = 30
    box_inflation: float = 0.02
    correspondence_mode: str = "given"
    master_seed: int = 0


class TouchRecordModel(BaseModel):
    run_id: int
    criterion: str
    touch_index: int
    pos_err_m: float
    rot_err_deg: float
    adi_m: float
    gain: float | None
    planning_ms: float
    filter_ms: float
    fallback: bool


class ExperimentResponse(BaseModel):
    records: list[TouchRecordModel]
    records_csv: str
    summary_csv: str


class SessionCreateRequest(BaseModel):
    mesh_path: str
    initial_covariance_scale: float = 1e4
    rho: float = 0.12
    candidates_per_step: int = 30
    box_inflation: float = 0.02
    rng_seed: int = 0
    filter: FilterParams | None = None


class SessionInfo(BaseModel):
    session_id: str
    mesh_path: str
    contact_count: int


class PoseModel(BaseModel):
    rotation: Vec4 = Field(description="unit quaternion, scalar first")
    translation: Vec3


class BeliefModel(BaseModel):
    mean: Vec4
    covariance: list[Vec4]


class EstimateResponse(BaseModel):
    session_id: str
    contact_count: int
    pose: PoseModel
    belief: BeliefModel


class AddContactsRequest(BaseModel):
    points: list[Vec3] = Field(min_length=1, description="world-frame contacts (m)")


class PlanRequest(BaseModel):
    criterion: str = "kl"
    alpha: float = 0.3
    candidates: int | None = None
    rng_seed: int | None = None


class ActionModel(BaseModel):
    origin: Vec3
    direction: Vec3
    face_id: int
    predicted_contact: Vec3 | None
    fallback: bool


class PlanResponse(BaseModel):
    session_id: str
    action: ActionModel
    gain: float | None
    evaluated: int
