"""Pose error metrics and record aggregation."""
import numpy as np
from scipy.spatial import cKDTree

from ..errors import InvalidInputError
from ..geometry.core import as_cloud

METRIC_FIELDS = ("pos_err_m", "rot_err_deg", "adi_m")


def pose_errors(estimate, truth, model, truth_tree=None):
    """(position error m, geodesic rotation error deg, ADI m).

    ADI is the mean distance from each model point at the estimated pose to
    its closest model point at the true pose, robust to indistinguishable
    views. Pass a prebuilt KD-tree over the true-posed cloud to amortize
    repeated evaluation.
    """
    model = as_cloud(model)
    if len(model) == 0:
        raise InvalidInputError("empty model cloud")
    pos_err = float(np.linalg.norm(estimate.translation - truth.translation))
    rot_err = float(np.degrees(estimate.rotation_angle_to(truth)))
    if truth_tree is None:
        truth_tree = cKDTree(truth.apply(model))
    d, _ = truth_tree.query(estimate.apply(model))
    return pos_err, rot_err, float(d.mean())


def summarize(records):
    """Per (criterion, touch_index) distribution stats of each error metric.

    Quantiles use linear interpolation (numpy default), as stated in the CSV
    header. Returns rows as dicts keyed like the summary CSV columns.
    """
    if not records:
        raise InvalidInputError("no records to summarize")
    cells = {}
    for rec in records:
        cells.setdefault((rec.criterion, rec.touch_index), []).append(rec)
    rows = []
    for (criterion, touch_index) in sorted(cells):
        group = cells[(criterion, touch_index)]
        for metric in METRIC_FIELDS:
            vals = np.array([getattr(r, metric) for r in group], dtype=np.float64)
            rows.append({
                "criterion": criterion,
                "touch_index": touch_index,
                "metric": metric,
                "mean": float(vals.mean()),
                "median": float(np.median(vals)),
                "min": float(vals.min()),
                "max": float(vals.max()),
                "q1_linear": float(np.quantile(vals, 0.25)),
                "q3_linear": float(np.quantile(vals, 0.75)),
            })
    return rows
