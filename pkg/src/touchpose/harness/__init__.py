"""Experiment orchestration: protocol simulation, metrics, CSV emission."""
from .config import ALL_CRITERIA, ExperimentConfig, GroundTruth, TouchRecord
from .csvio import RECORDS_HEADER, SUMMARY_HEADER, records_csv, summary_csv, write_outputs
from .experiment import run_experiment
from .metrics import pose_errors, summarize
from .simulate import bootstrap, sample_ground_truth, simulate_touch

__all__ = [
    "ALL_CRITERIA",
    "ExperimentConfig",
    "GroundTruth",
    "RECORDS_HEADER",
    "SUMMARY_HEADER",
    "TouchRecord",
    "bootstrap",
    "pose_errors",
    "records_csv",
    "run_experiment",
    "sample_ground_truth",
    "simulate_touch",
    "summarize",
    "summary_csv",
    "write_outputs",
]
