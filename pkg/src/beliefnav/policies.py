"""Candidate-path scoring and selection.

Exploration picks the candidate with the highest mean map uncertainty
along its cells.  Point-goal navigation scores each candidate by the
per-member maximum occupancy probability along it ("worst cell risk"),
then minimizes  mean - alpha1 * std + alpha2 * normalized_length:
a lower-confidence-bound on risk plus a length regularizer.  Setting
alpha1 = alpha2 = 0 keeps only the mean risk; alpha1 = 0 keeps the
greedy risk+length variant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .mapping import CellClass, GlobalMap
from .rrt import Path


@dataclass
class PolicyConfig:
    alpha1: float = 0.1
    alpha2: float = 0.5
    lookahead_m: float = 1.5
    explore_replan_every: int = 30
    pointgoal_replan_every: int = 20

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("alpha weights must be non-negative")
        if self.explore_replan_every < 1 or self.pointgoal_replan_every < 1:
            raise ValueError("replan cadences must be >= 1")
        if self.lookahead_m <= 0:
            raise ValueError("lookahead_m must be positive")


@dataclass
class PathScore:
    """Score breakdown of one candidate; total is what gets optimized."""
    total: float
    explore_score: Optional[float] = None
    mu: Optional[float] = None
    sigma: Optional[float] = None
    d_norm: Optional[float] = None


def score_exploration(path: Path, uncertainty: np.ndarray) -> float:
    """Mean per-cell uncertainty along the path (to be maximized)."""
    if not path.cells:
        raise ValueError("empty path")
    vals = [uncertainty[r, c] for r, c in path.cells]
    return float(np.mean(vals))


def path_occupancy_score(path: Path, member_map: GlobalMap) -> float:
    """Maximum OCCUPIED probability over the path cells in one member map."""
    if not path.cells:
        raise ValueError("empty path")
    occ = member_map.occupancy()
    return float(max(occ[r, c] for r, c in path.cells))


def score_pointgoal(path: Path, member_maps: Sequence[GlobalMap],
                    cfg: PolicyConfig, d_norm: float) -> PathScore:
    """Lower-confidence-bound risk of one candidate plus length term.

    d_norm is the candidate length divided by the longest candidate in
    the same set (in (0, 1]); the set-level score_candidates computes it.
    """
    if len(member_maps) < 2:
        raise ValueError("need at least 2 member maps")
    risks = np.array([path_occupancy_score(path, m) for m in member_maps])
    mu = float(risks.mean())
    sigma = float(risks.std())
    total = mu - cfg.alpha1 * sigma + cfg.alpha2 * d_norm
    return PathScore(total=total, mu=mu, sigma=sigma, d_norm=d_norm)


def score_candidates(paths: Sequence[Path], mode: str,
                     cfg: Optional[PolicyConfig] = None,
                     uncertainty: Optional[np.ndarray] = None,
                     member_maps: Optional[Sequence[GlobalMap]] = None) -> List[PathScore]:
    """Score a whole candidate set in either mode.

    Point-goal length terms are normalized by the longest candidate
    (all 1.0 when every candidate has zero length).
    """
    if mode == "explore":
        assert uncertainty is not None
        return [PathScore(total=score_exploration(p, uncertainty),
                          explore_score=score_exploration(p, uncertainty))
                for p in paths]
    if mode == "pointgoal":
        assert member_maps is not None and cfg is not None
        max_len = max((p.length_m for p in paths), default=0.0)
        scores = []
        for p in paths:
            d_norm = p.length_m / max_len if max_len > 0 else 1.0
            scores.append(score_pointgoal(p, member_maps, cfg, d_norm))
        return scores
    raise ValueError(f"unknown mode {mode!r}")


def select_path(paths: Sequence[Path], scores: Sequence[PathScore],
                mode: str) -> int:
    """Index of the best candidate.

    Exploration maximizes, point-goal minimizes; ties break to the
    shorter path, then to the lower index.
    """
    if not paths:
        raise ValueError("empty candidate set")
    if len(paths) != len(scores):
        raise ValueError("paths and scores length mismatch")
    sign = -1.0 if mode == "explore" else 1.0
    keyed = [(sign * s.total, p.length_m, i)
             for i, (p, s) in enumerate(zip(paths, scores))]
    return min(keyed)[2]


def short_term_goal(path: Path, lookahead_m: float,
                    cell_size_m: float) -> Tuple[int, int]:
    """Farthest path cell within lookahead_m cumulative distance of the start."""
    if not path.cells:
        raise ValueError("empty path")
    cum = 0.0
    best = path.cells[0]
    for a, b in zip(path.cells, path.cells[1:]):
        cum += math.hypot(b[0] - a[0], b[1] - a[1]) * cell_size_m
        if cum > lookahead_m + 1e-9:
            break
        best = b
    return best


def decision_record(step: int, mode: str, scores: Sequence[PathScore],
                    selected: Optional[int],
                    goal_cell: Optional[Tuple[int, int]],
                    blocked: bool) -> str:
    """One JSON line describing a replanning decision."""
    doc = {
        "step": step,
        "mode": mode,
        "n_candidates": len(scores),
        "scores": [{k: v for k, v in vars(s).items() if v is not None}
                   for s in scores],
        "selected": selected,
        "short_term_goal": list(goal_cell) if goal_cell is not None else None,
        "blocked": blocked,
    }
    return json.dumps(doc, sort_keys=True)
