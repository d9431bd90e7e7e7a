"""CSV serialization with a pinned schema and float format.

Floats are written with 9 significant digits; a missing gain is an empty
field; the fallback flag is 0/1. Records are emitted in canonical order
(criterion, run_id, touch_index) so equal experiments produce identical
files apart from the timing columns.
"""
import os

RECORDS_HEADER = ("run_id,criterion,touch_index,pos_err_m,rot_err_deg,adi_m,"
                  "gain,planning_ms,filter_ms,fallback")
SUMMARY_HEADER = ("criterion,touch_index,metric,mean,median,min,max,"
                  "q1_linear,q3_linear")


def _fmt(x):
    return "" if x is None else f"{x:.9g}"


def sort_records(records):
    return sorted(records, key=lambda r: (r.criterion, r.run_id, r.touch_index))


def records_csv(records):
    lines = [RECORDS_HEADER]
    for r in sort_records(records):
        lines.append(",".join([
            str(r.run_id), r.criterion, str(r.touch_index),
            _fmt(r.pos_err_m), _fmt(r.rot_err_deg), _fmt(r.adi_m),
            _fmt(r.gain), _fmt(r.planning_ms), _fmt(r.filter_ms),
            "1" if r.fallback else "0",
        ]))
    return "\n".join(lines) + "\n"


def summary_csv(summary_rows):
    lines = [SUMMARY_HEADER]
    for row in summary_rows:
        lines.append(",".join([
            row["criterion"], str(row["touch_index"]), row["metric"],
            _fmt(row["mean"]), _fmt(row["median"]), _fmt(row["min"]),
            _fmt(row["max"]), _fmt(row["q1_linear"]), _fmt(row["q3_linear"]),
        ]))
    return "\n".join(lines) + "\n"


def write_outputs(records, summary_rows, out_dir):
    """Write records.csv and summary.csv; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    rec_path = os.path.join(out_dir, "records.csv")
    sum_path = os.path.join(out_dir, "summary.csv")
    with open(rec_path, "w", newline="") as f:
        f.write(records_csv(records))
    with open(sum_path, "w", newline="") as f:
        f.write(summary_csv(summary_rows))
    return rec_path, sum_path
