"""Active tactile 6-DoF pose estimation.

A translation-invariant quaternion Kalman filter estimates the pose of a
known rigid object from sparse simulated contacts; the next touch is chosen
by one-step-lookahead information gain under five interchangeable Gaussian
divergence criteria.
"""
__version__ = "0.1.0"

from .geometry import RigidPose, TriangleMesh, load_mesh
from .harness import ExperimentConfig, run_experiment
from .infogain import Criterion, DivergenceCriterion, GaussianParams, evaluate
from .tiqf import BeliefState, FilterConfig, PoseEstimate, run_tiqf

__all__ = [
    "BeliefState",
    "Criterion",
    "DivergenceCriterion",
    "ExperimentConfig",
    "FilterConfig",
    "GaussianParams",
    "PoseEstimate",
    "RigidPose",
    "TriangleMesh",
    "__version__",
    "evaluate",
    "load_mesh",
    "run_experiment",
    "run_tiqf",
]
