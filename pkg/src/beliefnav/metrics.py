"""Episode evaluation: map quality, coverage, and navigation outcomes.

Map accuracy counts decided cells (confidence clearly above uniform)
whose argmax class matches the ground truth, in square meters.  IoU
averages the intersection-over-union of the FREE and OCCUPIED classes.
Coverage measures observed area restricted to the navigable region
(FREE cells reachable from the episode start), so its percentage stays
in [0, 100].  SPL is per-episode success weighted by the ratio of
shortest to taken path length.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .mapping import CellClass, GlobalMap
from .world import AgentPose, Floorplan, distance_field

# a cell counts as decided when its top probability clears uniform by this
DECIDED_MARGIN = 0.05


@dataclass
class MetricsRecord:
    """One episode's scalar outcomes, one row in the metrics CSV."""
    map_acc_m2: float
    iou_pct: float
    cov_m2: float
    cov_pct: float
    success: bool
    spl: float
    steps_taken: int
    gd_m: float
    gedr: float
    wall_ms_per_step: float = 0.0


def decided_mask(gmap: GlobalMap) -> np.ndarray:
    """Cells confident enough to grade: max prob > 1/3 + margin."""
    return gmap.probs.max(axis=-1) > 1.0 / 3.0 + DECIDED_MARGIN


def truth_window(gmap: GlobalMap, truth: Floorplan) -> Tuple[int, int]:
    """Row/col of the floorplan's (0, 0) cell inside the global map.

    The two grids must share cell size and sit on the same lattice with
    the floorplan fully inside the map extent; anything else raises.
    """
    if abs(gmap.cell_size_m - truth.cell_size_m) > 1e-12:
        raise ValueError("cell size mismatch between map and floorplan")
    r = gmap.cell_size_m
    dc = (truth.origin_xz[0] - gmap.origin_xz[0]) / r
    dr = (truth.origin_xz[1] - gmap.origin_xz[1]) / r
    row0, col0 = round(dr), round(dc)
    if abs(dr - row0) > 1e-6 or abs(dc - col0) > 1e-6:
        raise ValueError("floorplan origin off the global map lattice")
    if row0 < 0 or col0 < 0 or row0 + truth.n_rows > gmap.h \
            or col0 + truth.n_cols > gmap.w:
        raise ValueError("floorplan extends outside the global map")
    return row0, col0


def _truth_classes(truth: Floorplan) -> np.ndarray:
    cls = np.where(truth.occupied, CellClass.OCCUPIED, CellClass.FREE)
    return cls.astype(np.uint8)


def map_accuracy(pred: GlobalMap, truth: Floorplan) -> float:
    """Area (m^2) of decided cells whose argmax matches the truth."""
    row0, col0 = truth_window(pred, truth)
    win = (slice(row0, row0 + truth.n_rows), slice(col0, col0 + truth.n_cols))
    decided = decided_mask(pred)[win]
    pred_cls = pred.probs[win].argmax(axis=-1)
    correct = decided & (pred_cls == _truth_classes(truth))
    return float(correct.sum()) * pred.cell_size_m ** 2


def iou(pred: GlobalMap, truth: Floorplan) -> float:
    """Mean IoU (%) over the FREE and OCCUPIED classes.

    Prediction sets are decided cells of each class inside the truth
    extent; a class with an empty union is skipped.
    """
    row0, col0 = truth_window(pred, truth)
    win = (slice(row0, row0 + truth.n_rows), slice(col0, col0 + truth.n_cols))
    decided = decided_mask(pred)[win]
    pred_cls = pred.probs[win].argmax(axis=-1)
    truth_cls = _truth_classes(truth)
    scores = []
    for c in (CellClass.FREE, CellClass.OCCUPIED):
        p = decided & (pred_cls == c)
        t = truth_cls == c
        union = (p | t).sum()
        if union == 0:
            continue
        scores.append((p & t).sum() / union)
    if not scores:
        return 0.0
    return float(np.mean(scores)) * 100.0


def navigable_mask(truth: Floorplan, start_cell: Tuple[int, int]) -> np.ndarray:
    """Truth-FREE cells reachable (8-connected) from the start cell."""
    dist = distance_field(truth.free_mask, [start_cell], truth.cell_size_m)
    return np.isfinite(dist)


def coverage(obs_map: GlobalMap, truth: Floorplan,
             start_cell: Tuple[int, int]) -> Tuple[float, float]:
    """Observed navigable area as (m^2, % of the navigable area).

    obs_map must hold only registered observations, no predictions; any
    non-uniform cell counts as observed.
    """
    row0, col0 = truth_window(obs_map, truth)
    win = (slice(row0, row0 + truth.n_rows), slice(col0, col0 + truth.n_cols))
    observed = obs_map.observed_mask()[win]
    nav = navigable_mask(truth, start_cell)
    cell_area = truth.cell_size_m ** 2
    m2 = float((observed & nav).sum()) * cell_area
    max_m2 = float(nav.sum()) * cell_area
    pct = 100.0 * m2 / max_m2 if max_m2 > 0 else 0.0
    return m2, pct


def spl(success: bool, shortest_m: float, taken_m: float) -> float:
    """Success weighted by shortest/taken path length, in [0, 1]."""
    if shortest_m <= 0.0:
        raise ValueError("shortest path length must be positive")
    if taken_m < 0.0:
        raise ValueError("taken path length must be non-negative")
    if not success:
        return 0.0
    return shortest_m / max(taken_m, shortest_m)


def path_length_m(poses: Sequence[AgentPose]) -> float:
    """Sum of per-step position displacements; turns contribute zero."""
    total = 0.0
    for a, b in zip(poses[:-1], poses[1:]):
        total += math.hypot(b.x_m - a.x_m, b.z_m - a.z_m)
    return total


def gedr(geodesic_m: float, euclidean_m: float) -> float:
    """Geodesic-to-Euclidean distance ratio of an episode."""
    if euclidean_m <= 0.0:
        raise ValueError("euclidean distance must be positive")
    return geodesic_m / euclidean_m


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

_FIELDS = [f.name for f in fields(MetricsRecord) if f.name != "wall_ms_per_step"]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_metrics_csv(records: Dict[str, MetricsRecord], path) -> None:
    """One row per episode id, deterministic order, fixed precision.

    Timing fields are deliberately excluded; see write_timings_csv.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["episode"] + _FIELDS)
        for ep_id in sorted(records):
            rec = records[ep_id]
            writer.writerow([ep_id] + [_fmt(getattr(rec, n)) for n in _FIELDS])


def write_timings_csv(records: Dict[str, MetricsRecord], path) -> None:
    """Wall-clock per step, kept apart from the deterministic outputs."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["episode", "wall_ms_per_step"])
        for ep_id in sorted(records):
            writer.writerow([ep_id, f"{records[ep_id].wall_ms_per_step:.3f}"])


def summarize(records: Sequence[MetricsRecord]) -> Dict[str, float]:
    """Suite-level means: success rate, mean SPL, mean coverage, etc."""
    if not records:
        return {"episodes": 0.0}
    return {
        "episodes": float(len(records)),
        "success_rate": float(np.mean([r.success for r in records])),
        "spl": float(np.mean([r.spl for r in records])),
        "map_acc_m2": float(np.mean([r.map_acc_m2 for r in records])),
        "iou_pct": float(np.mean([r.iou_pct for r in records])),
        "cov_m2": float(np.mean([r.cov_m2 for r in records])),
        "cov_pct": float(np.mean([r.cov_pct for r in records])),
        "steps_taken": float(np.mean([r.steps_taken for r in records])),
        "gedr": float(np.mean([r.gedr for r in records])),
    }


def write_summary_csv(summary: Dict[str, float], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["metric", "value"])
        for key in sorted(summary):
            writer.writerow([key, f"{summary[key]:.6f}"])
