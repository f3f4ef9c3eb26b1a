"""Experiment harness: whole episodes, suites, baselines, and training.

An episode loops sense -> ensemble map update -> (every N steps) candidate
planning and scoring -> short-term goal -> one local-controller action.
Suites iterate seeded floorplans/episodes and aggregate MetricsRecords
into CSVs; baselines swap only the short-term-goal selection so every
comparison shares the simulator, mapper, and controller.  Training
floorplan seeds live in a range disjoint from every evaluation range,
which run_suite asserts up front.
"""

from __future__ import annotations

import configparser
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import os

from .control import ControllerState, next_action, reached
from .ensemble import (EnsembleState, PredictorParams, TrainingPair,
                       build_dataset, evaluate_loss, load_weights,
                       save_weights, train, update_ensemble_maps)
from .mapping import CellClass, GlobalMap
from .metrics import (MetricsRecord, coverage, iou, map_accuracy,
                      navigable_mask, path_length_m, spl, summarize,
                      write_metrics_csv, write_summary_csv,
                      write_timings_csv)
from .policies import (PolicyConfig, decision_record, score_candidates,
                       select_path, short_term_goal)
from .rrt import CandidateSet, Path, RrtParams, plan_paths
from .world import (FORWARD_STEP_M, Action, AgentPose, Episode, Floorplan,
                    FloorplanParams, distance_field, generate_floorplan,
                    load_floorplan, pgm_text, sample_episode, save_floorplan,
                    sense, step, world_to_cell)

OUT_ENV_VAR = "BELIEFNAV_OUT"

# A short-term goal counts as reached within this radius.  Forward strides
# are fixed at FORWARD_STEP_M, so the agent crossing a waypoint lands up to
# half a stride past it; a tighter radius makes it bounce back and forth
# across the waypoint in costly about-face turn chains.
SUBGOAL_RADIUS_M = 0.6 * FORWARD_STEP_M

# seed ranges; training floorplans never overlap any evaluation range
TRAIN_SEED_BASE = 1000
EXPLORE_SEED_BASE = 2000
POINTGOAL_SEED_BASE = 3000
ACCEPTANCE_SEED_BASE = 4000
SEED_RANGE_SPAN = 1000

SNAPSHOT_STEPS = (100, 250, 500, 1000)
MAP_QUALITY_CHECKPOINT = 500
BASELINES = ("frontier", "random_goal", "straight_goal")


@dataclass
class WorldConfig:
    """Scene and sensing sizes; defaults are the 12 m desk scale."""
    floorplan_cells: int = 240
    cell_size_m: float = 0.05
    global_cells: int = 256
    local_cells: int = 160
    fov_deg: float = 90.0
    n_rays: int = 128
    max_range_m: float = 5.0


@dataclass
class RunConfig:
    task: str = "explore"
    seed: int = EXPLORE_SEED_BASE
    n_episodes: int = 5
    budget_t: Optional[int] = None      # None -> 1000 explore / 500 pointgoal
    baseline: Optional[str] = None
    floorplan_file: Optional[str] = None
    weights_dir: Optional[str] = None
    n_members: int = 4
    min_gedr: float = 1.0
    out_dir: str = "runs/out"
    write_artifacts: bool = True
    world: WorldConfig = field(default_factory=WorldConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    rrt: RrtParams = field(default_factory=RrtParams)

    @property
    def budget(self) -> int:
        if self.budget_t is not None:
            return self.budget_t
        return 1000 if self.task == "explore" else 500

    def validate(self) -> None:
        if self.task not in ("explore", "pointgoal"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.budget < 1:
            raise ValueError("budget_t must be >= 1")
        if self.baseline is not None and self.baseline not in BASELINES:
            raise ValueError(f"unknown baseline {self.baseline!r}")
        if self.floorplan_file and not FsPath(self.floorplan_file).exists():
            raise ValueError(f"floorplan file not found: {self.floorplan_file}")
        if self.weights_dir and not FsPath(self.weights_dir).is_dir():
            raise ValueError(f"weights dir not found: {self.weights_dir}")
        if self.n_members < 1:
            raise ValueError("n_members must be >= 1")


def resolve_out_dir(cfg: RunConfig) -> FsPath:
    """Output directory, overridable by the BELIEFNAV_OUT variable."""
    root = os.environ.get(OUT_ENV_VAR)
    if root:
        return FsPath(root) / FsPath(cfg.out_dir).name
    return FsPath(cfg.out_dir)


def assert_seed_split(cfg: RunConfig) -> None:
    """Evaluation seeds must stay out of the training floorplan range."""
    lo, hi = cfg.seed, cfg.seed + max(cfg.n_episodes, 1)
    t_lo, t_hi = TRAIN_SEED_BASE, TRAIN_SEED_BASE + SEED_RANGE_SPAN
    if lo < t_hi and hi > t_lo:
        raise ValueError(
            f"evaluation seeds [{lo}, {hi}) overlap the training range "
            f"[{t_lo}, {t_hi})")


def global_origin_for(fp: Floorplan, global_cells: int) -> Tuple[float, float]:
    """Origin that centers the floorplan inside a global_cells^2 map."""
    if global_cells < max(fp.n_rows, fp.n_cols):
        raise ValueError("global map smaller than the floorplan")
    r = fp.cell_size_m
    m_row = (global_cells - fp.n_rows) // 2
    m_col = (global_cells - fp.n_cols) // 2
    return (fp.origin_xz[0] - m_col * r, fp.origin_xz[1] - m_row * r)


def make_members(cfg: RunConfig) -> List[PredictorParams]:
    """Load trained weights when given, otherwise a zero-weight ensemble."""
    if cfg.weights_dir:
        paths = sorted(FsPath(cfg.weights_dir).glob("member_*.json"))
        if not paths:
            raise ValueError(f"no member_*.json under {cfg.weights_dir}")
        return [load_weights(p) for p in paths]
    return [PredictorParams.zeros() for _ in range(cfg.n_members)]


# ---------------------------------------------------------------------------
# Baseline short-term-goal selection
# ---------------------------------------------------------------------------

def frontier_goal(obs_map: GlobalMap,
                  agent_cell: Tuple[int, int]) -> Optional[Tuple[int, int]]:
    """Nearest-frontier goal: observed-FREE cells touching unknown space.

    Frontier cells are 8-connected into clusters; the goal is the cluster
    cell closest to its own centroid, for the centroid nearest the agent.
    Returns None when no frontier remains.
    """
    from scipy import ndimage

    cls = obs_map.argmax_classes()
    free = cls == CellClass.FREE
    unknown = cls == CellClass.UNKNOWN
    near_unknown = ndimage.binary_dilation(unknown, np.ones((3, 3), bool))
    frontier = free & near_unknown
    if not frontier.any():
        return None
    labels, n = ndimage.label(frontier, structure=np.ones((3, 3), int))
    best = None
    for lab in range(1, n + 1):
        cells = np.argwhere(labels == lab)
        cy, cx = cells.mean(axis=0)
        d = math.hypot(cy - agent_cell[0], cx - agent_cell[1])
        if best is None or d < best[0]:
            best = (d, cells, cy, cx)
    _, cells, cy, cx = best
    k = int(np.argmin((cells[:, 0] - cy) ** 2 + (cells[:, 1] - cx) ** 2))
    return int(cells[k, 0]), int(cells[k, 1])


def random_reachable_goal(fused: GlobalMap, agent_cell: Tuple[int, int],
                          rng: np.random.Generator,
                          occupancy_threshold: float = 0.6,
                          ) -> Optional[Tuple[int, int]]:
    """Uniform sample over cells reachable from the agent on the fused map."""
    trav = fused.occupancy() < occupancy_threshold
    if not trav[agent_cell]:
        return None
    dist = distance_field(trav, [agent_cell])
    cells = np.argwhere(np.isfinite(dist))
    if len(cells) == 0:
        return None
    pick = cells[int(rng.integers(len(cells)))]
    return int(pick[0]), int(pick[1])


# ---------------------------------------------------------------------------
# Episode execution
# ---------------------------------------------------------------------------

@dataclass
class EpisodeResult:
    record: MetricsRecord
    decision_lines: List[str]
    coverage_curve: List[Tuple[int, float]]
    poses: List[AgentPose]
    last_candidates: List[Path]
    last_selected: Optional[int]
    stg_history: List[Tuple[int, int]]


def _replan(cfg: RunConfig, state: EnsembleState, pose: AgentPose,
            goal_cell: Optional[Tuple[int, int]], t: int, ep_seed: int,
            ) -> Tuple[Optional[Tuple[int, int]], str, List[Path], Optional[int]]:
    """Pick the next short-term goal; returns (goal, log line, paths, pick)."""
    fused = state.mean_map
    agent_cell = world_to_cell(pose.x_m, pose.z_m, fused.origin_xz,
                               fused.cell_size_m)
    mode = cfg.task

    if cfg.baseline == "frontier":
        stg = frontier_goal(state.obs_map, agent_cell)
        return stg, decision_record(t, mode, [], None, stg, stg is None), [], None
    if cfg.baseline == "random_goal":
        rng = np.random.default_rng([ep_seed, t])
        stg = random_reachable_goal(fused, agent_cell, rng,
                                    cfg.rrt.occupancy_threshold)
        return stg, decision_record(t, mode, [], None, stg, stg is None), [], None
    if cfg.baseline == "straight_goal":
        return goal_cell, decision_record(t, mode, [], None, goal_cell,
                                          goal_cell is None), [], None

    seed = int(np.random.SeedSequence([ep_seed, t]).generate_state(1)[0])
    try:
        cand: CandidateSet = plan_paths(
            fused, agent_cell, goal_cell if mode == "pointgoal" else None,
            cfg.rrt, seed=seed)
    except ValueError:
        return None, decision_record(t, mode, [], None, None, True), [], None
    if not cand.paths:
        return None, decision_record(t, mode, [], None, None, True), [], None
    if mode == "explore":
        scores = score_candidates(cand.paths, "explore",
                                  uncertainty=state.uncertainty)
    else:
        scores = score_candidates(cand.paths, "pointgoal", cfg=cfg.policy,
                                  member_maps=state.member_maps)
    pick = select_path(cand.paths, scores, mode)
    stg = short_term_goal(cand.paths[pick], cfg.policy.lookahead_m,
                          fused.cell_size_m)
    line = decision_record(t, mode, scores, pick, stg, False)
    return stg, line, cand.paths, pick


def run_episode(cfg: RunConfig, fp: Floorplan, episode: Episode,
                members: Sequence[PredictorParams], ep_seed: int,
                out_dir: Optional[FsPath] = None) -> EpisodeResult:
    """Run one full episode and compute its metrics and artifacts."""
    w = cfg.world
    r = fp.cell_size_m
    origin = global_origin_for(fp, w.global_cells)
    state = EnsembleState.create(members, w.global_cells, w.global_cells, r,
                                 origin, w.local_cells, w.local_cells)
    ctrl = ControllerState()
    pose = episode.start
    poses = [pose]
    cadence = (cfg.policy.explore_replan_every if cfg.task == "explore"
               else cfg.policy.pointgoal_replan_every)
    goal_cell = None
    if cfg.task == "pointgoal":
        goal_cell = world_to_cell(*episode.goal_xz, origin, r)

    start_cell = fp.cell_at(pose.x_m, pose.z_m)
    nav = navigable_mask(fp, start_cell)
    row0 = round((fp.origin_xz[1] - origin[1]) / r)
    col0 = round((fp.origin_xz[0] - origin[0]) / r)
    fp_win = (slice(row0, row0 + fp.n_rows), slice(col0, col0 + fp.n_cols))
    cell_area = r * r

    decision_lines: List[str] = []
    coverage_curve: List[Tuple[int, float]] = []
    stg_history: List[Tuple[int, int]] = []
    last_candidates: List[Path] = []
    last_selected: Optional[int] = None
    stg: Optional[Tuple[int, int]] = None
    dwelling = False
    success = False
    acc_ckpt: Optional[float] = None
    iou_ckpt: Optional[float] = None
    collided = False
    steps_taken = 0
    budget = episode.budget_t
    t0 = time.perf_counter()

    for t in range(budget):
        scan = sense(fp, pose, w.fov_deg, w.n_rays, w.max_range_m)
        update_ensemble_maps(state, scan, pose)

        if cfg.task == "pointgoal" and reached(pose, episode.goal_xz):
            success = True
            decision_lines.append(json.dumps(
                {"step": t, "mode": "pointgoal", "stop": True}, sort_keys=True))
            break

        if stg is not None:
            sx = origin[0] + (stg[1] + 0.5) * r
            sz = origin[1] + (stg[0] + 0.5) * r
            if math.hypot(sx - pose.x_m, sz - pose.z_m) <= SUBGOAL_RADIUS_M:
                stg = None             # short-term goal reached; replan now

        if t % cadence == 0 or (stg is None and not dwelling):
            stg, line, cands, pick = _replan(cfg, state, pose, goal_cell,
                                             t, ep_seed)
            decision_lines.append(line)
            if cands:
                last_candidates, last_selected = cands, pick
            if stg is not None:
                stg_history.append(stg)
            # an empty replan means rotate and rescan until the next
            # scheduled replan; a reached sub-goal still replans at once
            dwelling = stg is None

        if stg is None:
            act = Action.TURN_LEFT     # nothing to chase; rotate and rescan
        else:
            # a chosen goal is kept until the next cadence replan even when
            # progress stalls; swapping goals on every hiccup thrashes the
            # controller with 180-degree bearing flips.  The controller
            # drives on the observation-fused map: predicted occupancy
            # guides which path to chase, not what counts as a wall
            act = next_action(ctrl, pose, state.obs_map, stg,
                              collided_last=collided)
        pose, collided = step(fp, pose, act)
        poses.append(pose)
        steps_taken = t + 1

        observed = state.obs_map.observed_mask()[fp_win]
        coverage_curve.append((t + 1, float((observed & nav).sum()) * cell_area))
        if t + 1 == MAP_QUALITY_CHECKPOINT:
            acc_ckpt = map_accuracy(state.mean_map, fp)
            iou_ckpt = iou(state.mean_map, fp)
        if out_dir and cfg.task == "explore" and (t + 1) in SNAPSHOT_STEPS:
            _write_snapshots(state, out_dir, t + 1)

    wall_ms = ((time.perf_counter() - t0) * 1000.0 / steps_taken
               if steps_taken else 0.0)
    if acc_ckpt is None:
        acc_ckpt = map_accuracy(state.mean_map, fp)
        iou_ckpt = iou(state.mean_map, fp)
    cov_m2, cov_pct = coverage(state.obs_map, fp, start_cell)

    if cfg.task == "pointgoal":
        spl_val = spl(success, episode.geodesic_m, path_length_m(poses))
    else:
        success, spl_val = True, 0.0

    record = MetricsRecord(
        map_acc_m2=acc_ckpt, iou_pct=iou_ckpt, cov_m2=cov_m2, cov_pct=cov_pct,
        success=success, spl=spl_val, steps_taken=steps_taken,
        gd_m=episode.geodesic_m, gedr=episode.gedr,
        wall_ms_per_step=wall_ms)
    result = EpisodeResult(record, decision_lines, coverage_curve, poses,
                           last_candidates, last_selected, stg_history)
    if out_dir:
        _write_episode_artifacts(cfg, fp, episode, state, result, out_dir)
    return result


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------

def _class_gray(gmap: GlobalMap) -> np.ndarray:
    """FREE white, OCCUPIED black, UNKNOWN mid-gray."""
    cls = gmap.argmax_classes()
    gray = np.full(cls.shape, 128, dtype=np.uint8)
    gray[cls == CellClass.FREE] = 255
    gray[cls == CellClass.OCCUPIED] = 0
    return gray


def _uncertainty_gray(uncertainty: np.ndarray) -> np.ndarray:
    # variance of a probability is at most 0.25
    return np.clip(uncertainty / 0.25 * 255.0, 0, 255).astype(np.uint8)


def _write_snapshots(state: EnsembleState, out_dir: FsPath, t: int) -> None:
    (out_dir / f"obs_t{t}.pgm").write_text(pgm_text(_class_gray(state.obs_map)))
    (out_dir / f"fused_t{t}.pgm").write_text(pgm_text(_class_gray(state.mean_map)))
    (out_dir / f"unc_t{t}.pgm").write_text(
        pgm_text(_uncertainty_gray(state.uncertainty)))


def render_episode_svg(fp: Floorplan, origin_xz: Tuple[float, float],
                       poses: Sequence[AgentPose],
                       candidates: Sequence[Path], selected: Optional[int],
                       goal_xz: Optional[Tuple[float, float]],
                       stg_cells: Sequence[Tuple[int, int]],
                       scale: float = 4.0) -> str:
    """Trajectory over the floorplan with the last candidate fan.

    Candidate cells are in the global-map frame anchored at origin_xz;
    the selected path is highlighted, short-term goals dotted, the goal
    circled.
    """
    r = fp.cell_size_m
    width, height = fp.n_cols * scale, fp.n_rows * scale

    def world_px(x: float, z: float) -> Tuple[float, float]:
        return ((x - fp.origin_xz[0]) / r * scale,
                (z - fp.origin_xz[1]) / r * scale)

    def cell_px(row: int, col: int) -> Tuple[float, float]:
        # global-map cell -> world center -> floorplan pixels
        return world_px(origin_xz[0] + (col + 0.5) * r,
                        origin_xz[1] + (row + 0.5) * r)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{width:.0f}" height="{height:.0f}" '
             f'viewBox="0 0 {width:.0f} {height:.0f}">',
             f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>']
    for row in range(fp.n_rows):
        col = 0
        occ_row = fp.occupied[row]
        while col < fp.n_cols:
            if occ_row[col]:
                run = col
                while run < fp.n_cols and occ_row[run]:
                    run += 1
                parts.append(
                    f'<rect x="{col * scale:.1f}" y="{row * scale:.1f}" '
                    f'width="{(run - col) * scale:.1f}" '
                    f'height="{scale:.1f}" fill="#444"/>')
                col = run
            else:
                col += 1

    def polyline(points: Sequence[Tuple[float, float]], color: str,
                 width_px: float, dash: str = "") -> str:
        pts = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="{width_px:.1f}"{extra}/>')

    for i, path in enumerate(candidates):
        if i == selected:
            continue
        parts.append(polyline([cell_px(*c) for c in path.cells],
                              "#9ecae1", 1.0))
    if selected is not None and 0 <= selected < len(candidates):
        parts.append(polyline([cell_px(*c) for c in candidates[selected].cells],
                              "#d62728", 2.0))
    parts.append(polyline([world_px(p.x_m, p.z_m) for p in poses],
                          "#2ca02c", 1.5))
    for row, col in stg_cells:
        x, y = cell_px(row, col)
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.0" '
                     f'fill="#1f77b4"/>')
    if goal_xz is not None:
        x, y = world_px(*goal_xz)
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{scale:.1f}" '
                     f'fill="none" stroke="#d62728" stroke-width="2.0"/>')
    sx, sy = world_px(poses[0].x_m, poses[0].z_m)
    parts.append(f'<circle cx="{sx:.1f}" cy="{sy:.1f}" r="2.5" fill="#2ca02c"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _write_episode_artifacts(cfg: RunConfig, fp: Floorplan, episode: Episode,
                             state: EnsembleState, result: EpisodeResult,
                             out_dir: FsPath) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "decisions.jsonl").write_text(
        "".join(line + "\n" for line in result.decision_lines))
    with open(out_dir / "coverage.csv", "w") as f:
        f.write("step,cov_m2\n")
        for t, m2 in result.coverage_curve:
            f.write(f"{t},{m2:.6f}\n")
    _write_snapshots(state, out_dir, result.record.steps_taken)
    svg = render_episode_svg(
        fp, state.obs_map.origin_xz, result.poses, result.last_candidates,
        result.last_selected, episode.goal_xz if cfg.task == "pointgoal"
        else None, result.stg_history)
    (out_dir / "trajectory.svg").write_text(svg)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    records: Dict[str, MetricsRecord]
    summary: Dict[str, float]
    aborted: List[str]
    out_dir: FsPath


def _episode_for(cfg: RunConfig, fp: Floorplan, seed: int) -> Episode:
    if cfg.task == "pointgoal":
        return sample_episode(fp, seed, min_gedr=cfg.min_gedr,
                              budget_t=cfg.budget)
    return sample_episode(fp, seed, budget_t=cfg.budget)


def _floorplan_for(cfg: RunConfig, seed: int) -> Floorplan:
    if cfg.floorplan_file:
        return load_floorplan(cfg.floorplan_file)
    params = FloorplanParams(size_cells=cfg.world.floorplan_cells,
                             cell_size_m=cfg.world.cell_size_m)
    return generate_floorplan(seed, params)


def run_suite(cfg: RunConfig) -> SuiteResult:
    """Run n_episodes seeded episodes and write metrics/summary CSVs."""
    cfg.validate()
    assert_seed_split(cfg)
    out_dir = resolve_out_dir(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    members = make_members(cfg)

    label = cfg.baseline or "ucb"
    records: Dict[str, MetricsRecord] = {}
    aborted: List[str] = []
    for i in range(cfg.n_episodes):
        seed = cfg.seed + i
        ep_id = f"{cfg.task}_{label}_{seed}"
        try:
            fp = _floorplan_for(cfg, seed)
            episode = _episode_for(cfg, fp, seed)
            ep_dir = out_dir / ep_id if cfg.write_artifacts else None
            result = run_episode(cfg, fp, episode, members, seed, ep_dir)
            records[ep_id] = result.record
        except Exception as exc:    # noqa: BLE001 - record and continue
            aborted.append(f"{ep_id}: {type(exc).__name__}: {exc}")

    write_metrics_csv(records, out_dir / "metrics.csv")
    write_timings_csv(records, out_dir / "timings.csv")
    summary = summarize(list(records.values()))
    write_summary_csv(summary, out_dir / "summary.csv")
    if aborted:
        (out_dir / "failures.txt").write_text(
            "".join(line + "\n" for line in aborted))
    return SuiteResult(records, summary, aborted, out_dir)


def run_baseline(cfg: RunConfig) -> SuiteResult:
    """run_suite with a named baseline goal-selection policy."""
    if cfg.baseline not in BASELINES:
        raise ValueError(f"baseline must be one of {BASELINES}")
    return run_suite(cfg)


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class TrainConfig:
    seed: int = TRAIN_SEED_BASE
    n_floorplans: int = 6
    episodes_per_plan: int = 3
    epochs: int = 12
    lr: float = 0.5
    n_members: int = 4
    crop_cells: int = 64        # training crop; weights are size-independent
    floorplan_cells: int = 240
    cell_size_m: float = 0.05
    holdout_every: int = 5
    out_dir: str = "runs/weights"

    def validate(self) -> None:
        if not (TRAIN_SEED_BASE <= self.seed
                < TRAIN_SEED_BASE + SEED_RANGE_SPAN):
            raise ValueError(
                f"training seeds must lie in [{TRAIN_SEED_BASE}, "
                f"{TRAIN_SEED_BASE + SEED_RANGE_SPAN})")
        if self.n_floorplans < 1 or self.episodes_per_plan < 1:
            raise ValueError("need at least one floorplan and episode")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def split_pairs(pairs: Sequence[TrainingPair], holdout_every: int,
                ) -> Tuple[List[TrainingPair], List[TrainingPair]]:
    """Deterministic train/holdout split: every k-th pair is held out."""
    train_pairs = [p for i, p in enumerate(pairs) if i % holdout_every]
    holdout = [p for i, p in enumerate(pairs) if i % holdout_every == 0]
    return train_pairs, holdout


def train_predictors(tcfg: TrainConfig,
                     out_dir: Optional[FsPath] = None) -> List[FsPath]:
    """Train the bootstrap ensemble; writes weight files + loss curves.

    Each member gets its own random init and bootstrap resample of the
    training pairs, then SGD epoch by epoch with the held-out loss logged
    after every epoch.  Aborts if a member's held-out loss fails to end
    below its starting value.
    """
    tcfg.validate()
    if out_dir is None:
        root = os.environ.get(OUT_ENV_VAR)
        out_dir = (FsPath(root) / FsPath(tcfg.out_dir).name if root
                   else FsPath(tcfg.out_dir))
    out_dir.mkdir(parents=True, exist_ok=True)

    params = FloorplanParams(size_cells=tcfg.floorplan_cells,
                             cell_size_m=tcfg.cell_size_m)
    plans = [generate_floorplan(tcfg.seed + i, params)
             for i in range(tcfg.n_floorplans)]
    pairs = build_dataset(plans, tcfg.episodes_per_plan, seed=tcfg.seed,
                          h=tcfg.crop_cells, w=tcfg.crop_cells)
    if not pairs:
        raise RuntimeError("training dataset came out empty")
    train_pairs, holdout = split_pairs(pairs, tcfg.holdout_every)

    curve_rows: List[Tuple[int, int, float]] = []
    weight_paths: List[FsPath] = []
    for m in range(tcfg.n_members):
        rng = np.random.default_rng([tcfg.seed, m])
        member = PredictorParams.random(seed=int(rng.integers(2 ** 31)))
        boot = [train_pairs[int(j)] for j in
                rng.integers(0, len(train_pairs), size=len(train_pairs))]
        loss0 = evaluate_loss(member, holdout)
        curve_rows.append((m, 0, loss0))
        for epoch in range(1, tcfg.epochs + 1):
            member = train(member, boot, epochs=1, lr=tcfg.lr,
                           seed=int(np.random.SeedSequence(
                               [tcfg.seed, m, epoch]).generate_state(1)[0]))
            curve_rows.append((m, epoch, evaluate_loss(member, holdout)))
        if curve_rows[-1][2] >= loss0:
            raise RuntimeError(
                f"member {m} diverged: held-out loss {curve_rows[-1][2]:.4f} "
                f"did not improve on {loss0:.4f}")
        path = out_dir / f"member_{m}.json"
        save_weights(member, path)
        weight_paths.append(path)

    with open(out_dir / "loss_curve.csv", "w") as f:
        f.write("member,epoch,holdout_loss\n")
        for m, epoch, loss in curve_rows:
            f.write(f"{m},{epoch},{loss:.8f}\n")
    return weight_paths


# ---------------------------------------------------------------------------
# Config files (INI)
# ---------------------------------------------------------------------------

def load_config(path) -> RunConfig:
    """RunConfig from an INI file with [run]/[world]/[policy]/[rrt] sections."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ValueError(f"config file not found: {path}")
    cfg = RunConfig()
    if parser.has_section("run"):
        s = parser["run"]
        cfg.task = s.get("task", cfg.task)
        cfg.seed = s.getint("seed", cfg.seed)
        cfg.n_episodes = s.getint("episodes", cfg.n_episodes)
        if "budget_t" in s:
            cfg.budget_t = s.getint("budget_t")
        cfg.baseline = s.get("baseline", "") or None
        cfg.floorplan_file = s.get("floorplan_file", "") or None
        cfg.weights_dir = s.get("weights_dir", "") or None
        cfg.n_members = s.getint("members", cfg.n_members)
        cfg.min_gedr = s.getfloat("min_gedr", cfg.min_gedr)
        cfg.out_dir = s.get("out_dir", cfg.out_dir)
        cfg.write_artifacts = s.getboolean("write_artifacts",
                                           cfg.write_artifacts)
    if parser.has_section("world"):
        s = parser["world"]
        w = cfg.world
        w.floorplan_cells = s.getint("floorplan_cells", w.floorplan_cells)
        w.cell_size_m = s.getfloat("cell_size_m", w.cell_size_m)
        w.global_cells = s.getint("global_cells", w.global_cells)
        w.local_cells = s.getint("local_cells", w.local_cells)
        w.fov_deg = s.getfloat("fov_deg", w.fov_deg)
        w.n_rays = s.getint("n_rays", w.n_rays)
        w.max_range_m = s.getfloat("max_range_m", w.max_range_m)
    if parser.has_section("policy"):
        s = parser["policy"]
        cfg.policy = PolicyConfig(
            alpha1=s.getfloat("alpha1", 0.1),
            alpha2=s.getfloat("alpha2", 0.5),
            lookahead_m=s.getfloat("lookahead_m", 1.5),
            explore_replan_every=s.getint("explore_replan_every", 30),
            pointgoal_replan_every=s.getint("pointgoal_replan_every", 20))
    if parser.has_section("rrt"):
        s = parser["rrt"]
        cfg.rrt = RrtParams(
            max_paths=s.getint("max_paths", 10),
            goal_rate=s.getfloat("goal_rate", 0.2),
            step_cells=s.getint("step_cells", 5),
            iterations=s.getint("iterations", 3000),
            occupancy_threshold=s.getfloat("occupancy_threshold", 0.6),
            goal_tolerance_cells=s.getfloat("goal_tolerance_cells", 4.0))
    return cfg


def gen_maps(seed: int, count: int, size_cells: int, cell_size_m: float,
             out_dir: FsPath) -> List[FsPath]:
    """Generate floorplans to text files (with PGM previews)."""
    from .world import floorplan_to_pgm

    out_dir.mkdir(parents=True, exist_ok=True)
    params = FloorplanParams(size_cells=size_cells, cell_size_m=cell_size_m)
    paths = []
    for i in range(count):
        fp = generate_floorplan(seed + i, params)
        path = out_dir / f"floorplan_{seed + i}.txt"
        save_floorplan(fp, path)
        (out_dir / f"floorplan_{seed + i}.pgm").write_text(floorplan_to_pgm(fp))
        paths.append(path)
    return paths
