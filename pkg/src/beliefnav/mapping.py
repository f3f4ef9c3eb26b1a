"""Probabilistic 3-class occupancy grids and Bayesian map registration.

Every cell holds a categorical distribution over (unknown, occupied, free).
Local grids are egocentric: the agent sits at the floored center cell
((h-1)//2, (w-1)//2) facing the +column axis.  A point at egocentric
(x, z) lands in column floor(x / r) + (w-1)//2 and row floor(z / r) + (h-1)//2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Tuple

import numpy as np

from .world import AgentPose, GRID_NUDGE, pgm_text

N_CLASSES = 3
PROB_CLAMP = 0.01          # likelihood/prior clamp applied before Bayes products
OBSERVED_EPS = 1e-6        # margin above 1/3 that marks a cell as observed

_GLOBAL_MAP_MAGIC = b"BNGM"
_GLOBAL_MAP_VERSION = 1


class CellClass(IntEnum):
    UNKNOWN = 0
    OCCUPIED = 1
    FREE = 2


def _uniform(shape) -> np.ndarray:
    return np.full(shape + (N_CLASSES,), 1.0 / N_CLASSES)


def center_offsets(h: int, w: int) -> Tuple[int, int]:
    return (h - 1) // 2, (w - 1) // 2


@dataclass
class LocalGrid:
    """Egocentric h x w categorical grid."""
    probs: np.ndarray
    cell_size_m: float

    @property
    def h(self) -> int:
        return self.probs.shape[0]

    @property
    def w(self) -> int:
        return self.probs.shape[1]

    @classmethod
    def uniform(cls, h: int, w: int, cell_size_m: float) -> "LocalGrid":
        return cls(probs=_uniform((h, w)), cell_size_m=cell_size_m)

    def observed_mask(self) -> np.ndarray:
        return self.probs.max(axis=-1) > 1.0 / N_CLASSES + OBSERVED_EPS


@dataclass
class GlobalMap:
    """World-anchored categorical grid accumulated over a whole episode.

    Attributes:
        probs: (H, W, 3) cell distributions.
        origin_xz: world coordinates of the corner of cell (0, 0).
        n_dropped: running count of informative local cells that fell
            outside the map extent during registration.
    """
    probs: np.ndarray
    cell_size_m: float
    origin_xz: Tuple[float, float] = (0.0, 0.0)
    n_dropped: int = 0

    @property
    def h(self) -> int:
        return self.probs.shape[0]

    @property
    def w(self) -> int:
        return self.probs.shape[1]

    @classmethod
    def uniform(cls, h: int, w: int, cell_size_m: float,
                origin_xz: Tuple[float, float] = (0.0, 0.0)) -> "GlobalMap":
        return cls(probs=_uniform((h, w)), cell_size_m=cell_size_m,
                   origin_xz=origin_xz)

    def occupancy(self) -> np.ndarray:
        return self.probs[..., CellClass.OCCUPIED]

    def observed_mask(self) -> np.ndarray:
        return self.probs.max(axis=-1) > 1.0 / N_CLASSES + OBSERVED_EPS

    def argmax_classes(self) -> np.ndarray:
        """Per-cell argmax class; near-uniform cells report UNKNOWN."""
        cls = self.probs.argmax(axis=-1).astype(np.uint8)
        cls[~self.observed_mask()] = CellClass.UNKNOWN
        return cls


# cells whose class probabilities stay this close to uniform count as
# unobserved for the purposes of the debris filter below
UNKNOWN_MARGIN = 0.05


def blocked_mask(gmap: GlobalMap, threshold: float = 0.5) -> np.ndarray:
    """Blocking cells for motion and planning: occupancy >= threshold
    minus quantization debris.

    Quantized projection and nearest-cell registration scatter occasional
    occupied marks one cell off a wall face, and repeated scans from one
    spot can cement them.  Such debris is a one-cell-thick streak inside
    observed-free space, while every generated wall, jamb, and obstacle is
    at least two cells thick — though only its face may be observed, with
    unknown cells behind.  A blocked cell is therefore kept when some 2x2
    square around it is wholly blocked-or-unknown (possible solid), and
    dropped when every such square touches observed-free space.
    """
    occ = gmap.occupancy() >= threshold
    support = occ | (gmap.probs.max(axis=-1) <= 1.0 / N_CLASSES + UNKNOWN_MARGIN)
    solid = support[:-1, :-1] & support[:-1, 1:] \
        & support[1:, :-1] & support[1:, 1:]
    keep = np.zeros_like(occ)
    keep[:-1, :-1] |= solid
    keep[:-1, 1:] |= solid
    keep[1:, :-1] |= solid
    keep[1:, 1:] |= solid
    return occ & keep


# ---------------------------------------------------------------------------
# Ground projection
# ---------------------------------------------------------------------------

def ground_project(scan, cell_size_m: float, h: int, w: int) -> LocalGrid:
    """Project one range scan into an egocentric local grid.

    Ray endpoints that hit something mark their cell OCCUPIED; cells the
    rays pass through mark FREE; everything else stays uniform-unknown.
    Marked cells get probability 0.99 on the marked class and 0.005 on
    the other two.  Cells outside the window are discarded.
    """
    probs = _uniform((h, w))
    c_row, c_col = center_offsets(h, w)
    r = cell_size_m
    spacing = r / 4.0

    rad = np.radians(scan.bearings_deg)
    cos_b, sin_b = np.cos(rad), np.sin(rad)

    free_x, free_z = [], []
    for i in range(len(scan.bearings_deg)):
        rng_i = scan.ranges_m[i]
        limit = rng_i - 0.5 * r if scan.hits[i] else rng_i
        if limit <= 0:
            continue
        d = np.arange(0.0, limit, spacing)
        free_x.append(d * cos_b[i])
        free_z.append(d * sin_b[i])
    if free_x:
        fx = np.concatenate(free_x)
        fz = np.concatenate(free_z)
        cols = np.floor(fx / r + GRID_NUDGE).astype(int) + c_col
        rows = np.floor(fz / r + GRID_NUDGE).astype(int) + c_row
        ok = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        probs[rows[ok], cols[ok]] = (0.005, 0.005, 0.99)

    hit = scan.hits.astype(bool)
    if hit.any():
        # ranges stop at the occupied cell's boundary, which sits exactly
        # on a gridline; evaluate half a cell deeper so the endpoint lies
        # inside the wall cell rather than flooring into the free side
        depth = scan.ranges_m[hit] + 0.5 * r
        ex = depth * cos_b[hit]
        ez = depth * sin_b[hit]
        cols = np.floor(ex / r + GRID_NUDGE).astype(int) + c_col
        rows = np.floor(ez / r + GRID_NUDGE).astype(int) + c_row
        ok = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        probs[rows[ok], cols[ok]] = (0.005, 0.99, 0.005)

    return LocalGrid(probs=probs, cell_size_m=cell_size_m)


# ---------------------------------------------------------------------------
# Local <-> global frame mapping
# ---------------------------------------------------------------------------

def local_cell_world_points(pose: AgentPose, h: int, w: int,
                            cell_size_m: float) -> Tuple[np.ndarray, np.ndarray]:
    """World (x, z) of every local cell center under the given pose."""
    c_row, c_col = center_offsets(h, w)
    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    x_e = (cols - c_col + 0.5) * cell_size_m
    z_e = (rows - c_row + 0.5) * cell_size_m
    rad = np.radians(pose.heading_deg)
    cos_t, sin_t = np.cos(rad), np.sin(rad)
    wx = pose.x_m + x_e * cos_t - z_e * sin_t
    wz = pose.z_m + x_e * sin_t + z_e * cos_t
    return wx, wz


def _local_to_global_cells(gmap: GlobalMap, pose: AgentPose, h: int, w: int):
    wx, wz = local_cell_world_points(pose, h, w, gmap.cell_size_m)
    g_col = np.floor((wx - gmap.origin_xz[0]) / gmap.cell_size_m + GRID_NUDGE).astype(int)
    g_row = np.floor((wz - gmap.origin_xz[1]) / gmap.cell_size_m + GRID_NUDGE).astype(int)
    inside = (g_row >= 0) & (g_row < gmap.h) & (g_col >= 0) & (g_col < gmap.w)
    return g_row, g_col, inside


def register_bayes(gmap: GlobalMap, local: LocalGrid, pose: AgentPose) -> GlobalMap:
    """Fuse a local grid into the global map with per-cell Bayes updates.

    Each informative (non-uniform) local cell is rotated/translated to the
    global cell containing its center; per affected global cell the
    posterior is prior * likelihood renormalized, with both factors
    clamped to [0.01, 0.99] first.  Uniform local cells are identity
    updates and are skipped; informative cells landing outside the map
    extent are dropped and counted in gmap.n_dropped.

    Raises:
        ValueError: pose outside the global map extent, or cell size mismatch.
    """
    if abs(local.cell_size_m - gmap.cell_size_m) > 1e-12:
        raise ValueError("local and global cell sizes differ")
    a_row = int(np.floor((pose.z_m - gmap.origin_xz[1]) / gmap.cell_size_m + GRID_NUDGE))
    a_col = int(np.floor((pose.x_m - gmap.origin_xz[0]) / gmap.cell_size_m + GRID_NUDGE))
    if not (0 <= a_row < gmap.h and 0 <= a_col < gmap.w):
        raise ValueError("pose is outside the global map extent")

    h, w = local.h, local.w
    g_row, g_col, inside = _local_to_global_cells(gmap, pose, h, w)
    informative = local.observed_mask()

    gmap.n_dropped += int((informative & ~inside).sum())

    sel = informative & inside
    if not sel.any():
        return gmap
    flat = (g_row[sel] * gmap.w + g_col[sel]).ravel()
    lik = np.clip(local.probs[sel], PROB_CLAMP, 1.0 - PROB_CLAMP)

    n_cells = gmap.h * gmap.w
    log_lik = np.log(lik)
    counts = np.bincount(flat, minlength=n_cells)
    delta = np.stack([
        np.bincount(flat, weights=log_lik[:, c], minlength=n_cells)
        for c in range(N_CLASSES)
    ], axis=1)
    affected = np.flatnonzero(counts)
    flat_probs = gmap.probs.reshape(-1, N_CLASSES)
    prior = np.clip(flat_probs[affected], PROB_CLAMP, 1.0 - PROB_CLAMP)
    post = prior * np.exp(delta[affected])
    post /= post.sum(axis=1, keepdims=True)
    flat_probs[affected] = post
    return gmap


def egocentric_crop(gmap: GlobalMap, pose: AgentPose, h: int, w: int) -> LocalGrid:
    """Rotated h x w window of the global map centered on the agent.

    The agent heading maps to the local +column axis.  Cells sampling
    outside the global extent come back uniform-unknown.
    """
    g_row, g_col, inside = _local_to_global_cells(gmap, pose, h, w)
    probs = _uniform((h, w))
    probs[inside] = gmap.probs[g_row[inside], g_col[inside]]
    return LocalGrid(probs=probs, cell_size_m=gmap.cell_size_m)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_global_map(gmap: GlobalMap, path) -> None:
    """Binary layout: magic, version, H, W, cell size, origin, then
    row-major float32 (unknown, occupied, free) triplets."""
    header = struct.pack("<4sBxxxII3d", _GLOBAL_MAP_MAGIC, _GLOBAL_MAP_VERSION,
                         gmap.h, gmap.w, gmap.cell_size_m,
                         gmap.origin_xz[0], gmap.origin_xz[1])
    with open(path, "wb") as f:
        f.write(header)
        f.write(gmap.probs.astype("<f4").tobytes())


def load_global_map(path) -> GlobalMap:
    with open(path, "rb") as f:
        head = f.read(struct.calcsize("<4sBxxxII3d"))
        magic, version, h, w, cell, ox, oz = struct.unpack("<4sBxxxII3d", head)
        if magic != _GLOBAL_MAP_MAGIC:
            raise ValueError("not a global map file")
        if version != _GLOBAL_MAP_VERSION:
            raise ValueError(f"unsupported global map version {version}")
        data = np.frombuffer(f.read(h * w * N_CLASSES * 4), dtype="<f4")
    probs = data.reshape(h, w, N_CLASSES).astype(np.float64)
    return GlobalMap(probs=probs, cell_size_m=cell, origin_xz=(ox, oz))


def global_map_to_pgm(gmap: GlobalMap) -> str:
    """Argmax view as P2 PGM: occupied 0, unknown 128, free 255."""
    cls = gmap.argmax_classes()
    gray = np.full(cls.shape, 128, dtype=np.uint8)
    gray[cls == CellClass.OCCUPIED] = 0
    gray[cls == CellClass.FREE] = 255
    return pgm_text(gray)


def uncertainty_to_pgm(u: np.ndarray) -> str:
    """Variance map as P2 PGM with the fixed scale u=0.25 -> 255."""
    gray = np.clip(u / 0.25 * 255.0, 0, 255).astype(np.uint8)
    return pgm_text(gray)
