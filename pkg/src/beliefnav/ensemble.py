"""Ensemble of map-completion predictors with epistemic uncertainty.

Each member is a multinomial logistic model over hand-rolled neighborhood
features of the observed egocentric grid: per-class observation fractions
in four square annuli of a 15x15 patch, directional observation fractions
in 3x6 strips on each side of the cell (these let the model carry free
space through doorways and corridors instead of walling off everything
it cannot see), a distance-to-nearest-observation term, and a bias.
Members differ by random initialization and bootstrap resampling of the
training pairs; the spread of their accumulated global maps is the
uncertainty signal used by the planner.

Observed input cells are never predicted: their distributions are copied
through unchanged.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .mapping import (CellClass, GlobalMap, LocalGrid, N_CLASSES,
                      egocentric_crop, ground_project, local_cell_world_points,
                      register_bayes)
from .world import (AgentPose, Floorplan, GRID_NUDGE, interior_free_mask,
                    sense, shortest_cell_path)

DEFAULT_PATCH_CELLS = 15
PRED_CLAMP = 0.01          # uniform-mixing weight that bounds softmax outputs
LOSS_CLAMP = 0.01          # probability clamp inside the cross-entropy
N_FEATURES = 18

_ANNULUS_HALF_WIDTHS = (1, 3, 5, 7)
_STRIP_LENGTH = 6          # cells a directional strip reaches from the cell
_STRIP_HALF_WIDTH = 1      # strip spans 2*half+1 rows or columns

WEIGHTS_FORMAT = "beliefnav.weights.v1"
DATASET_FORMAT = "beliefnav.dataset.v1"


@dataclass
class PredictorParams:
    """Weights of one ensemble member: (3 classes, 10 features)."""
    weights: np.ndarray
    patch_cells: int = DEFAULT_PATCH_CELLS
    init_seed: int = 0

    @classmethod
    def zeros(cls, patch_cells: int = DEFAULT_PATCH_CELLS) -> "PredictorParams":
        return cls(weights=np.zeros((N_CLASSES, N_FEATURES)), patch_cells=patch_cells)

    @classmethod
    def random(cls, seed: int, scale: float = 0.1,
               patch_cells: int = DEFAULT_PATCH_CELLS) -> "PredictorParams":
        rng = np.random.default_rng(seed)
        w = rng.normal(0.0, scale, size=(N_CLASSES, N_FEATURES))
        return cls(weights=w, patch_cells=patch_cells, init_seed=seed)


@dataclass
class TrainingPair:
    """Accumulated-observation input grid and its ground-truth class labels."""
    input: LocalGrid
    target: np.ndarray  # (h, w) uint8 CellClass labels


_FEATURE_PAD = max(max(_ANNULUS_HALF_WIDTHS), _STRIP_LENGTH) + 1


def _integral(mask: np.ndarray, pad: int = _FEATURE_PAD) -> np.ndarray:
    """Padded summed-area table of a boolean mask."""
    h, w = mask.shape
    padded = np.zeros((h + 2 * pad, w + 2 * pad))
    padded[pad:pad + h, pad:pad + w] = mask
    return padded.cumsum(axis=0).cumsum(axis=1)


def _rect_sums(ii: np.ndarray, h: int, w: int, dr0: int, dr1: int,
               dc0: int, dc1: int, pad: int = _FEATURE_PAD) -> np.ndarray:
    """Per-cell counts over rows [i+dr0, i+dr1], cols [j+dc0, j+dc1]."""
    r_lo, r_hi = pad + dr0 - 1, pad + dr1
    c_lo, c_hi = pad + dc0 - 1, pad + dc1
    return (ii[r_hi:r_hi + h, c_hi:c_hi + w]
            - ii[r_lo:r_lo + h, c_hi:c_hi + w]
            - ii[r_hi:r_hi + h, c_lo:c_lo + w]
            + ii[r_lo:r_lo + h, c_lo:c_lo + w])


def _multi_box_sums(mask: np.ndarray, half_widths) -> list:
    """Counts of True cells in (2a+1)^2 boxes, one integral image for all."""
    h, w = mask.shape
    ii = _integral(mask)
    return [_rect_sums(ii, h, w, -a, a, -a, a) for a in half_widths]


# (dr0, dr1, dc0, dc1) rectangles reaching away from the cell on each side
_STRIP_RECTS = (
    (-_STRIP_HALF_WIDTH, _STRIP_HALF_WIDTH, 1, _STRIP_LENGTH),       # +col
    (-_STRIP_HALF_WIDTH, _STRIP_HALF_WIDTH, -_STRIP_LENGTH, -1),     # -col
    (1, _STRIP_LENGTH, -_STRIP_HALF_WIDTH, _STRIP_HALF_WIDTH),       # +row
    (-_STRIP_LENGTH, -1, -_STRIP_HALF_WIDTH, _STRIP_HALF_WIDTH),     # -row
)
_STRIP_AREA = (2 * _STRIP_HALF_WIDTH + 1) * _STRIP_LENGTH


def neighborhood_features(grid: LocalGrid) -> np.ndarray:
    """Per-cell feature vectors, shape (h, w, 18).

    Features 0-3: observed-OCCUPIED fraction in four square annuli
    (half-widths 1, 3, 5, 7 of the 15x15 patch); 4-7: the same for
    observed-FREE; 8: distance to the nearest observed cell scaled by the
    patch size and capped at 1; 9: constant bias; 10-13: observed-FREE
    fraction in the 3x6 strip on each side of the cell (+col, -col,
    +row, -row); 14-17: the same strips for observed-OCCUPIED.
    """
    observed = grid.observed_mask()
    argmax = grid.probs.argmax(axis=-1)
    occ_obs = observed & (argmax == CellClass.OCCUPIED)
    free_obs = observed & (argmax == CellClass.FREE)
    h, w = observed.shape

    feats = np.empty((h, w, N_FEATURES))
    ii_occ = _integral(occ_obs)
    ii_free = _integral(free_obs)
    for base, ii in ((0, ii_occ), (4, ii_free)):
        prev = None
        prev_area = 0
        for k, a in enumerate(_ANNULUS_HALF_WIDTHS):
            box = _rect_sums(ii, h, w, -a, a, -a, a)
            area = (2 * a + 1) ** 2
            if prev is None:
                ring, ring_area = box, area
            else:
                ring, ring_area = box - prev, area - prev_area
            feats[..., base + k] = ring / ring_area
            prev, prev_area = box, area

    if observed.any():
        dist = ndimage.distance_transform_edt(~observed)
        feats[..., 8] = np.minimum(dist / DEFAULT_PATCH_CELLS, 1.0)
    else:
        feats[..., 8] = 1.0
    feats[..., 9] = 1.0

    for k, rect in enumerate(_STRIP_RECTS):
        feats[..., 10 + k] = _rect_sums(ii_free, h, w, *rect) / _STRIP_AREA
        feats[..., 14 + k] = _rect_sums(ii_occ, h, w, *rect) / _STRIP_AREA
    return feats


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def support_mask(feats: np.ndarray) -> np.ndarray:
    """Cells with at least one observed cell inside the receptive field.

    All eight fraction features vanish exactly when the 15x15 box around
    the cell holds no observation, so their sum doubles as the test.
    """
    return feats[..., :8].sum(axis=-1) > 0.0


def predict_from_features(member: PredictorParams, feats: np.ndarray,
                          grid: LocalGrid) -> LocalGrid:
    """predict() with precomputed features (shared across members)."""
    logits = feats @ member.weights.T
    p = _softmax(logits)
    p = (1.0 - N_CLASSES * PRED_CLAMP) * p + PRED_CLAMP
    # outside the receptive field the member abstains: exact uniform, so
    # registering the prediction leaves the global map untouched there
    p[~support_mask(feats)] = 1.0 / N_CLASSES
    observed = grid.observed_mask()
    out = np.where(observed[..., None], grid.probs, p)
    return LocalGrid(probs=out, cell_size_m=grid.cell_size_m)


def predict(member: PredictorParams, grid: LocalGrid) -> LocalGrid:
    """Complete a partially observed grid with one ensemble member.

    Unobserved cells within reach of some observation get the clamped
    softmax output of the member; cells with no observation anywhere in
    the receptive field stay exactly uniform; observed cells are copied
    through unchanged.  Zero weights yield the exact uniform distribution
    on every unobserved cell.
    """
    return predict_from_features(member, neighborhood_features(grid), grid)


def ensemble_mean(grids: Sequence) -> np.ndarray:
    """Arithmetic per-cell mean of aligned categorical grids."""
    stack = _stack_probs(grids)
    return stack.mean(axis=0)


def ensemble_variance(grids: Sequence) -> np.ndarray:
    """Population variance of the OCCUPIED-class probability per cell."""
    stack = _stack_probs(grids)
    if stack.shape[0] < 2:
        raise ValueError("variance needs at least 2 members")
    return stack[..., CellClass.OCCUPIED].var(axis=0)


def _stack_probs(grids: Sequence) -> np.ndarray:
    arrays = []
    for g in grids:
        arrays.append(g.probs if hasattr(g, "probs") else np.asarray(g))
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise ValueError(f"mismatched grid shapes: {sorted(shapes)}")
    return np.stack(arrays)


# ---------------------------------------------------------------------------
# Loss and training
# ---------------------------------------------------------------------------

def cross_entropy(pred_probs: np.ndarray, target: np.ndarray,
                  clamp: float = LOSS_CLAMP) -> float:
    """Mean over cells of -log p(target class), probabilities clamped.

    pred_probs has shape (..., 3); target holds integer class labels of
    shape pred_probs.shape[:-1].
    """
    flat = pred_probs.reshape(-1, N_CLASSES)
    t = np.asarray(target).ravel().astype(int)
    pt = np.clip(flat[np.arange(len(t)), t], clamp, 1.0 - clamp)
    return float(-np.log(pt).mean())


def loss_and_grad(weights: np.ndarray, feats: np.ndarray, targets: np.ndarray,
                  clamp: float = LOSS_CLAMP) -> Tuple[float, np.ndarray]:
    """Cross-entropy of softmax(feats @ W.T) and its gradient in W.

    Cells whose target-class probability sits at the clamp contribute a
    zero (sub)gradient, matching the clamped loss.
    """
    feats = feats.reshape(-1, N_FEATURES)
    t = np.asarray(targets).ravel().astype(int)
    p = _softmax(feats @ weights.T)
    pt = p[np.arange(len(t)), t]
    loss = float(-np.log(np.clip(pt, clamp, 1.0 - clamp)).mean())
    active = (pt > clamp) & (pt < 1.0 - clamp)
    g = p.copy()
    g[np.arange(len(t)), t] -= 1.0
    g[~active] = 0.0
    grad = g.T @ feats / len(t)
    return loss, grad


def pair_features(pairs: Sequence[TrainingPair]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Precompute (features, flat targets) for each pair."""
    out = []
    for pair in pairs:
        f = neighborhood_features(pair.input).reshape(-1, N_FEATURES)
        out.append((f, pair.target.ravel().astype(int)))
    return out


def evaluate_loss(member: PredictorParams,
                  pairs: Sequence[TrainingPair]) -> float:
    """Mean clamped cross-entropy of the member over whole pairs.

    Scored on supported cells only — the ones the member actually
    predicts; abstained cells are uniform by construction and would add
    a constant log(3) floor.
    """
    total, count = 0.0, 0
    for f, t in pair_features(pairs):
        keep = support_mask(f)
        if not keep.any():
            continue
        loss, _ = loss_and_grad(member.weights, f[keep], t[keep])
        total += loss * int(keep.sum())
        count += int(keep.sum())
    return total / max(count, 1)


def _balanced_batch(rng: np.random.Generator, targets: np.ndarray,
                    batch_cells: int) -> np.ndarray:
    per_class = max(batch_cells // N_CLASSES, 1)
    picks = []
    for c in range(N_CLASSES):
        idx = np.flatnonzero(targets == c)
        if len(idx) == 0:
            continue
        picks.append(rng.choice(idx, size=min(per_class, len(idx)), replace=False))
    return np.concatenate(picks)


def train(member: PredictorParams, pairs: Sequence[TrainingPair],
          epochs: int = 30, lr: float = 0.5, seed: int = 0,
          batch_cells: int = 768) -> PredictorParams:
    """SGD on the pixel-wise cross-entropy over class-balanced cell batches.

    Deterministic given the seed.  Raises RuntimeError with diagnostics if
    the loss turns non-finite.
    """
    if not pairs:
        raise ValueError("empty training set")
    rng = np.random.default_rng(seed)
    # train only where the member will speak: cells with observational
    # support in their receptive field (the rest abstain at inference)
    cached = []
    for f, t in pair_features(pairs):
        keep = np.flatnonzero(support_mask(f))
        cached.append((f[keep], t[keep]))
    w = member.weights.copy()
    for epoch in range(epochs):
        for i in rng.permutation(len(cached)):
            f, t = cached[int(i)]
            if len(t) == 0:
                continue
            batch = _balanced_batch(rng, t, batch_cells)
            loss, grad = loss_and_grad(w, f[batch], t[batch])
            if not math.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch} pair {int(i)}: {loss}")
            w -= lr * grad
    return PredictorParams(weights=w, patch_cells=member.patch_cells,
                           init_seed=member.init_seed)


def train_ensemble(n_members: int, pairs: Sequence[TrainingPair], seed: int,
                   epochs: int = 30, lr: float = 0.5) -> List[PredictorParams]:
    """Train a diverse ensemble: per-member random init + bootstrap resample."""
    members = []
    for i in range(n_members):
        rng = np.random.default_rng([seed, i])
        init = PredictorParams.random(seed=int(rng.integers(2 ** 31)))
        boot = [pairs[int(j)] for j in rng.integers(0, len(pairs), size=len(pairs))]
        members.append(train(init, boot, epochs=epochs, lr=lr,
                             seed=int(rng.integers(2 ** 31))))
    return members


# ---------------------------------------------------------------------------
# Dataset construction
# ---------------------------------------------------------------------------

def truth_local_crop(fp: Floorplan, pose: AgentPose, h: int, w: int) -> np.ndarray:
    """Ground-truth class labels in the egocentric frame (outside -> UNKNOWN)."""
    wx, wz = local_cell_world_points(pose, h, w, fp.cell_size_m)
    col = np.floor((wx - fp.origin_xz[0]) / fp.cell_size_m + GRID_NUDGE).astype(int)
    row = np.floor((wz - fp.origin_xz[1]) / fp.cell_size_m + GRID_NUDGE).astype(int)
    inside = (row >= 0) & (row < fp.n_rows) & (col >= 0) & (col < fp.n_cols)
    target = np.full((h, w), CellClass.UNKNOWN, dtype=np.uint8)
    occ = fp.occupied[row[inside], col[inside]]
    vals = np.where(occ, CellClass.OCCUPIED, CellClass.FREE).astype(np.uint8)
    target[inside] = vals
    return target


def build_dataset(floorplans: Sequence[Floorplan], episodes_per_plan: int,
                  seed: int, h: int, w: int, waypoint_every_cells: int = 8,
                  fov_deg: float = 90.0, n_rays: int = 128,
                  max_range_m: float = 5.0) -> List[TrainingPair]:
    """Simulate shortest-path traversals and collect (input, target) pairs.

    For every sampled start/goal pair the agent walks the shortest cell
    path; at each waypoint the accumulated observation map so far is
    cropped egocentrically and paired with the ground-truth crop, so
    later pairs carry more context than earlier ones.
    """
    pairs: List[TrainingPair] = []
    for fp_i, fp in enumerate(floorplans):
        rng = np.random.default_rng([seed, fp_i])
        cells = np.argwhere(interior_free_mask(fp))
        pad = max(h, w)
        origin = (fp.origin_xz[0] - pad * fp.cell_size_m,
                  fp.origin_xz[1] - pad * fp.cell_size_m)
        for _ in range(episodes_per_plan):
            start = tuple(int(v) for v in cells[int(rng.integers(len(cells)))])
            goal = tuple(int(v) for v in cells[int(rng.integers(len(cells)))])
            if start == goal:
                continue
            path = shortest_cell_path(fp.free_mask, start, goal)
            if path is None or len(path) < 2:
                continue
            waypoints = path[::waypoint_every_cells]
            if waypoints[-1] != path[-1]:
                waypoints.append(path[-1])
            obs = GlobalMap.uniform(fp.n_rows + 2 * pad, fp.n_cols + 2 * pad,
                                    fp.cell_size_m, origin_xz=origin)
            for k, cell in enumerate(waypoints):
                ref = waypoints[k + 1] if k + 1 < len(waypoints) else waypoints[k - 1]
                heading = math.degrees(math.atan2(ref[0] - cell[0], ref[1] - cell[1]))
                if k + 1 >= len(waypoints):
                    heading = (heading + 180.0) % 360.0
                pose = AgentPose(*fp.center(*cell), heading)
                scan = sense(fp, pose, fov_deg, n_rays, max_range_m)
                local = ground_project(scan, fp.cell_size_m, h, w)
                register_bayes(obs, local, pose)
                pairs.append(TrainingPair(
                    input=egocentric_crop(obs, pose, h, w),
                    target=truth_local_crop(fp, pose, h, w)))
    return pairs


# ---------------------------------------------------------------------------
# Ensemble state over an episode
# ---------------------------------------------------------------------------

@dataclass
class EnsembleState:
    """Per-episode accumulated maps: one per member, plus observations."""
    members: List[PredictorParams]
    member_maps: List[GlobalMap]
    obs_map: GlobalMap
    mean_map: GlobalMap
    uncertainty: np.ndarray
    local_h: int = 160
    local_w: int = 160

    @classmethod
    def create(cls, members: Sequence[PredictorParams], h: int, w: int,
               cell_size_m: float, origin_xz: Tuple[float, float],
               local_h: int = 160, local_w: int = 160) -> "EnsembleState":
        make = lambda: GlobalMap.uniform(h, w, cell_size_m, origin_xz)
        return cls(members=list(members),
                   member_maps=[make() for _ in members],
                   obs_map=make(), mean_map=make(),
                   uncertainty=np.zeros((h, w)),
                   local_h=local_h, local_w=local_w)


def update_ensemble_maps(state: EnsembleState, scan, pose: AgentPose) -> EnsembleState:
    """One perception step: observe, predict per member, fuse, re-derive.

    The scan is ground-projected into the observation map; the updated
    observation crop is completed by every member and registered into that
    member's map; the fused mean map and the per-cell variance of the
    members' OCCUPIED probability are recomputed from scratch.
    """
    local = ground_project(scan, state.obs_map.cell_size_m,
                           state.local_h, state.local_w)
    register_bayes(state.obs_map, local, pose)
    crop = egocentric_crop(state.obs_map, pose, state.local_h, state.local_w)
    feats = neighborhood_features(crop)
    for member, mmap in zip(state.members, state.member_maps):
        pred = predict_from_features(member, feats, crop)
        register_bayes(mmap, pred, pose)
    state.mean_map.probs = ensemble_mean(state.member_maps)
    state.uncertainty = ensemble_variance(state.member_maps)
    return state


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_weights(member: PredictorParams, path) -> None:
    doc = {
        "format": WEIGHTS_FORMAT,
        "patch_cells": member.patch_cells,
        "n_features": N_FEATURES,
        "classes": ["unknown", "occupied", "free"],
        "init_seed": member.init_seed,
        "weights": member.weights.tolist(),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def load_weights(path) -> PredictorParams:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != WEIGHTS_FORMAT:
        raise ValueError(f"unsupported weights format: {doc.get('format')!r}")
    w = np.asarray(doc["weights"], dtype=np.float64)
    if w.shape != (N_CLASSES, N_FEATURES):
        raise ValueError(f"bad weights shape {w.shape}")
    return PredictorParams(weights=w, patch_cells=int(doc["patch_cells"]),
                           init_seed=int(doc.get("init_seed", 0)))


def save_dataset(pairs: Sequence[TrainingPair], dirpath, seed: int = 0,
                 extra: Optional[dict] = None) -> None:
    os.makedirs(dirpath, exist_ok=True)
    files = []
    for i, pair in enumerate(pairs):
        name = f"pair_{i:05d}.npz"
        np.savez_compressed(os.path.join(dirpath, name),
                            input=pair.input.probs.astype(np.float32),
                            target=pair.target.astype(np.uint8))
        files.append(name)
    manifest = {
        "format": DATASET_FORMAT,
        "cell_size_m": pairs[0].input.cell_size_m if pairs else 0.05,
        "h": pairs[0].input.h if pairs else 0,
        "w": pairs[0].input.w if pairs else 0,
        "n_pairs": len(pairs),
        "seed": seed,
        "files": files,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(dirpath, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")


def load_dataset(dirpath) -> List[TrainingPair]:
    with open(os.path.join(dirpath, "manifest.json")) as f:
        manifest = json.load(f)
    if manifest.get("format") != DATASET_FORMAT:
        raise ValueError(f"unsupported dataset format: {manifest.get('format')!r}")
    pairs = []
    for name in manifest["files"]:
        with np.load(os.path.join(dirpath, name)) as data:
            grid = LocalGrid(probs=data["input"].astype(np.float64),
                             cell_size_m=manifest["cell_size_m"])
            pairs.append(TrainingPair(input=grid, target=data["target"].copy()))
    return pairs
