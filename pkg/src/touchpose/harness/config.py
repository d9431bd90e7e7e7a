"""Experiment configuration, records and seed derivation."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..geometry.core import RigidPose
from ..infogain import DivergenceCriterion
from ..tiqf import FilterConfig

ALL_CRITERIA = ("kl", "renyi", "fisher", "bhattacharyya", "wasserstein")

# sub-stream tags hashed into per-cell seeds; truth and bootstrap are shared
# across criteria (same run_id sees the same episode under every criterion)
STREAM_TRUTH = 0
STREAM_BOOTSTRAP = 1
STREAM_NOISE = 2
STREAM_PLANNER = 3
_SHARED_STREAMS = (STREAM_TRUTH, STREAM_BOOTSTRAP)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a simulated experiment depends on, seed included."""

    mesh_path: str
    criteria: tuple = ALL_CRITERIA
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
    correspondence_mode: str = "given"  # "given" | "nearest"
    model_spacing: float = 1e-3  # correspondence-cloud densification, "nearest" mode
    filter: FilterConfig = field(default_factory=FilterConfig)
    master_seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if self.bootstrap_touches < 3:
            raise InvalidInputError("bootstrap_touches must be >= 3")
        if self.max_touches < self.bootstrap_touches:
            raise InvalidInputError("max_touches must be >= bootstrap_touches")
        if self.runs < 1:
            raise InvalidInputError("runs must be >= 1")
        if self.noise_std < 0 or self.translation_range < 0 or self.rotation_range_deg < 0:
            raise InvalidInputError("ranges and noise must be non-negative")
        if self.correspondence_mode not in ("given", "nearest"):
            raise InvalidInputError("correspondence_mode must be 'given' or 'nearest'")
        object.__setattr__(self, "criteria", tuple(self.criteria))
        for name in self.criteria:
            DivergenceCriterion.parse(name, self.renyi_alpha)  # validates

    def criterion_for(self, name):
        return DivergenceCriterion.parse(name, self.renyi_alpha)

    def filter_config(self):
        from dataclasses import replace
        return replace(self.filter, rho=self.rho)


def cell_seed(config, crit_index, run_id, *stream):
    """Child SeedSequence for one (criterion, run) cell and sub-stream."""
    if stream and stream[0] in _SHARED_STREAMS:
        return np.random.SeedSequence(config.master_seed,
                                      spawn_key=(run_id, *stream))
    return np.random.SeedSequence(config.master_seed,
                                  spawn_key=(crit_index, run_id, *stream))


def seed_int(seq):
    """Collapse a SeedSequence to a plain int seed (for PlannerConfig)."""
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class GroundTruth:
    """The true displacement of the object for one run."""

    pose: RigidPose


@dataclass
class TouchRecord:
    """One executed touch with its post-update error metrics."""

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
    selected_action: object = None
    contact_point: np.ndarray | None = None
