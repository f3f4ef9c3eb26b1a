"""2D indoor world simulation: floorplans, agent kinematics, range sensing.

The world is a rectangular grid of square cells, each FREE or OCCUPIED,
with continuous agent positions in meters on top of it.  Headings are in
degrees, measured clockwise from the +x axis, with +z running along
increasing grid rows; TURN_LEFT therefore decreases the heading.

Cell indexing is (row, col) where row tracks z and col tracks x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

FORWARD_STEP_M = 0.25
TURN_DEG = 10.0

# Added to scaled coordinates before flooring so that points sitting exactly
# on a cell boundary are not pushed into the lower cell by float rounding.
GRID_NUDGE = 1e-9

SQRT2 = math.sqrt(2.0)


class Action(Enum):
    MOVE_FORWARD = "move_forward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    STOP = "stop"


class GenerationError(RuntimeError):
    """Floorplan generation failed after bounded retries."""


class EpisodeSamplingError(RuntimeError):
    """No start/goal pair satisfying the episode constraints was found."""


def grid_index(v: float, origin: float, cell_size_m: float) -> int:
    return int(math.floor((v - origin) / cell_size_m + GRID_NUDGE))


def world_to_cell(x_m: float, z_m: float, origin_xz: Tuple[float, float],
                  cell_size_m: float) -> Tuple[int, int]:
    """Map a world point to the (row, col) of the cell containing it."""
    return (grid_index(z_m, origin_xz[1], cell_size_m),
            grid_index(x_m, origin_xz[0], cell_size_m))


def cell_center(row: int, col: int, origin_xz: Tuple[float, float],
                cell_size_m: float) -> Tuple[float, float]:
    return (origin_xz[0] + (col + 0.5) * cell_size_m,
            origin_xz[1] + (row + 0.5) * cell_size_m)


@dataclass
class AgentPose:
    x_m: float
    z_m: float
    heading_deg: float


@dataclass
class RangeScan:
    """One sweep of range readings.

    Attributes:
        bearings_deg: per-ray bearing relative to the agent heading,
            evenly spaced across the field of view.
        ranges_m: per-ray distance to the first occupied cell boundary,
            clipped to max_range_m.
        hits: per-ray flag, False when nothing was hit within range.
    """
    bearings_deg: np.ndarray
    ranges_m: np.ndarray
    hits: np.ndarray
    fov_deg: float
    max_range_m: float


@dataclass
class Floorplan:
    """Static ground-truth occupancy of one scene.

    Attributes:
        occupied: bool (rows, cols), True for walls/obstacles.
        cell_size_m: edge length of one square cell in meters.
        origin_xz: world coordinates of the (0, 0) cell corner.
    """
    occupied: np.ndarray
    cell_size_m: float = 0.05
    origin_xz: Tuple[float, float] = (0.0, 0.0)

    @property
    def n_rows(self) -> int:
        return self.occupied.shape[0]

    @property
    def n_cols(self) -> int:
        return self.occupied.shape[1]

    @property
    def free_mask(self) -> np.ndarray:
        return ~self.occupied

    def in_extent(self, row: int, col: int) -> bool:
        return 0 <= row < self.n_rows and 0 <= col < self.n_cols

    def cell_at(self, x_m: float, z_m: float) -> Tuple[int, int]:
        return world_to_cell(x_m, z_m, self.origin_xz, self.cell_size_m)

    def center(self, row: int, col: int) -> Tuple[float, float]:
        return cell_center(row, col, self.origin_xz, self.cell_size_m)

    def is_free(self, row: int, col: int) -> bool:
        return self.in_extent(row, col) and not self.occupied[row, col]

    def free_area_m2(self) -> float:
        return float(self.free_mask.sum()) * self.cell_size_m ** 2

    def validate(self) -> None:
        if self.cell_size_m <= 0:
            raise ValueError("cell_size_m must be positive")
        if self.occupied.ndim != 2 or self.occupied.dtype != bool:
            raise ValueError("occupied must be a 2D bool array")
        border = np.concatenate([
            self.occupied[0, :], self.occupied[-1, :],
            self.occupied[:, 0], self.occupied[:, -1]])
        if not border.all():
            raise ValueError("boundary ring must be occupied")
        if not (~self.occupied).any():
            raise ValueError("floorplan has no free cell")


@dataclass
class Episode:
    floorplan_id: str
    start: AgentPose
    goal_xz: Optional[Tuple[float, float]]
    geodesic_m: float
    euclidean_m: float
    gedr: float
    budget_t: int


# ---------------------------------------------------------------------------
# Floorplan generation
# ---------------------------------------------------------------------------

@dataclass
class FloorplanParams:
    """Knobs for the room/corridor/obstacle generator."""
    size_cells: int = 240
    cell_size_m: float = 0.05
    room_rows: Tuple[int, int] = (2, 3)
    room_cols: Tuple[int, int] = (2, 3)
    room_span_frac: float = 0.62
    min_room_cells: int = 8
    corridor_cells: int = 3
    n_obstacles: Tuple[int, int] = (2, 6)
    obstacle_cells: Tuple[int, int] = (2, 5)
    extra_door_prob: float = 0.15
    max_retries: int = 20


def _free_connected(free: np.ndarray) -> bool:
    if not free.any():
        return False
    _, n = ndimage.label(free)
    return n == 1


class _UnionFind:
    def __init__(self, items):
        self.parent = {it: it for it in items}

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _carve_corridor(occ: np.ndarray, room_a, room_b, horizontal: bool,
                    width: int, rng: np.random.Generator) -> bool:
    ar0, ar1, ac0, ac1 = room_a
    br0, br1, bc0, bc1 = room_b
    if horizontal:
        lo = max(ar0, br0)
        hi = min(ar1, br1)
        if hi - lo < width:
            return False
        start = int(rng.integers(lo, hi - width + 1))
        occ[start:start + width, ac1:bc0] = False
    else:
        lo = max(ac0, bc0)
        hi = min(ac1, bc1)
        if hi - lo < width:
            return False
        start = int(rng.integers(lo, hi - width + 1))
        occ[ar1:br0, start:start + width] = False
    return True


def _try_generate(rng: np.random.Generator, p: FloorplanParams) -> Optional[np.ndarray]:
    n = p.size_cells
    occ = np.ones((n, n), dtype=bool)
    n_r = int(rng.integers(p.room_rows[0], p.room_rows[1] + 1))
    n_c = int(rng.integers(p.room_cols[0], p.room_cols[1] + 1))
    row_edges = np.linspace(1, n - 1, n_r + 1).astype(int)
    col_edges = np.linspace(1, n - 1, n_c + 1).astype(int)

    rooms = {}
    for i in range(n_r):
        for j in range(n_c):
            a, b = int(row_edges[i]), int(row_edges[i + 1])
            c, d = int(col_edges[j]), int(col_edges[j + 1])
            avail_r = (b - 1) - (a + 1)
            avail_c = (d - 1) - (c + 1)
            lo_r = max(int(math.ceil(p.room_span_frac * avail_r)), p.min_room_cells)
            lo_c = max(int(math.ceil(p.room_span_frac * avail_c)), p.min_room_cells)
            if lo_r > avail_r or lo_c > avail_c:
                return None
            h = int(rng.integers(lo_r, avail_r + 1))
            w = int(rng.integers(lo_c, avail_c + 1))
            r0 = a + 1 + int(rng.integers(0, avail_r - h + 1))
            c0 = c + 1 + int(rng.integers(0, avail_c - w + 1))
            occ[r0:r0 + h, c0:c0 + w] = False
            rooms[(i, j)] = (r0, r0 + h, c0, c0 + w)

    edges = []
    for i in range(n_r):
        for j in range(n_c):
            if j + 1 < n_c:
                edges.append(((i, j), (i, j + 1), True))
            if i + 1 < n_r:
                edges.append(((i, j), (i + 1, j), False))
    uf = _UnionFind(list(rooms))
    for k in rng.permutation(len(edges)):
        a, b, horizontal = edges[int(k)]
        spanning = uf.union(a, b)
        if spanning or rng.random() < p.extra_door_prob:
            if not _carve_corridor(occ, rooms[a], rooms[b], horizontal,
                                   p.corridor_cells, rng):
                return None

    if not _free_connected(~occ):
        return None

    room_list = [rooms[key] for key in sorted(rooms)]
    n_obs = int(rng.integers(p.n_obstacles[0], p.n_obstacles[1] + 1))
    margin = p.corridor_cells
    placed = 0
    attempts = 0
    while placed < n_obs and attempts < 40 * max(n_obs, 1):
        attempts += 1
        r0, r1, c0, c1 = room_list[int(rng.integers(len(room_list)))]
        oh = int(rng.integers(p.obstacle_cells[0], p.obstacle_cells[1] + 1))
        ow = int(rng.integers(p.obstacle_cells[0], p.obstacle_cells[1] + 1))
        if (r1 - r0) - 2 * margin < oh or (c1 - c0) - 2 * margin < ow:
            continue
        rr = int(rng.integers(r0 + margin, r1 - margin - oh + 1))
        cc = int(rng.integers(c0 + margin, c1 - margin - ow + 1))
        patch = occ[rr:rr + oh, cc:cc + ow].copy()
        occ[rr:rr + oh, cc:cc + ow] = True
        if _free_connected(~occ):
            placed += 1
        else:
            occ[rr:rr + oh, cc:cc + ow] = patch
    return occ


def generate_floorplan(seed: int, params: Optional[FloorplanParams] = None) -> Floorplan:
    """Generate a connected multi-room floorplan.

    Rooms sit on a coarse lattice, are joined by corridors along a random
    spanning tree (plus occasional extra doors), and receive a few random
    rectangular obstacles that are only kept when free space stays one
    connected component.

    Args:
        seed: RNG seed; the same seed always yields the same plan.
        params: generation knobs, defaults to FloorplanParams().

    Returns:
        A validated, connected Floorplan.

    Raises:
        ValueError: grid smaller than 64x64 cells.
        GenerationError: no valid plan after bounded retries.
    """
    p = params or FloorplanParams()
    if p.size_cells < 64:
        raise ValueError("floorplan grid must be at least 64x64 cells")
    rng = np.random.default_rng(seed)
    for _ in range(p.max_retries):
        occ = _try_generate(rng, p)
        if occ is not None:
            fp = Floorplan(occupied=occ, cell_size_m=p.cell_size_m)
            fp.validate()
            return fp
    raise GenerationError(
        f"no valid floorplan after {p.max_retries} retries (seed={seed})")


# ---------------------------------------------------------------------------
# Agent kinematics
# ---------------------------------------------------------------------------

def _disc_blocked(fp: Floorplan, x_m: float, z_m: float, radius_m: float) -> bool:
    """True when a disc of radius_m at (x, z) overlaps any occupied cell."""
    row, col = fp.cell_at(x_m, z_m)
    r = fp.cell_size_m
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            rr, cc = row + dr, col + dc
            if not fp.in_extent(rr, cc):
                return True
            if not fp.occupied[rr, cc]:
                continue
            # closest point of the cell rectangle to the disc center
            x0 = fp.origin_xz[0] + cc * r
            z0 = fp.origin_xz[1] + rr * r
            px = min(max(x_m, x0), x0 + r)
            pz = min(max(z_m, z0), z0 + r)
            if (px - x_m) ** 2 + (pz - z_m) ** 2 <= radius_m ** 2:
                return True
    return False


def step(fp: Floorplan, pose: AgentPose, action: Action) -> Tuple[AgentPose, bool]:
    """Apply one discrete action.

    MOVE_FORWARD translates 0.25 m along the heading unless the swept
    segment, sampled every quarter cell with an agent radius of one cell,
    would touch an occupied cell; blocked moves leave the pose unchanged
    (no sliding).  Turns are +/- 10 degrees mod 360.

    Returns:
        (new pose, collided flag)
    """
    if action is Action.STOP:
        return AgentPose(pose.x_m, pose.z_m, pose.heading_deg % 360.0), False
    if action is Action.TURN_LEFT:
        return AgentPose(pose.x_m, pose.z_m,
                         (pose.heading_deg - TURN_DEG) % 360.0), False
    if action is Action.TURN_RIGHT:
        return AgentPose(pose.x_m, pose.z_m,
                         (pose.heading_deg + TURN_DEG) % 360.0), False

    rad = math.radians(pose.heading_deg)
    dx, dz = math.cos(rad), math.sin(rad)
    spacing = fp.cell_size_m / 4.0
    n = int(math.ceil(FORWARD_STEP_M / spacing))
    for i in range(n + 1):
        t = FORWARD_STEP_M * i / n
        if _disc_blocked(fp, pose.x_m + t * dx, pose.z_m + t * dz, fp.cell_size_m):
            return AgentPose(pose.x_m, pose.z_m, pose.heading_deg % 360.0), True
    return AgentPose(pose.x_m + FORWARD_STEP_M * dx,
                     pose.z_m + FORWARD_STEP_M * dz,
                     pose.heading_deg % 360.0), False


# ---------------------------------------------------------------------------
# Range sensing
# ---------------------------------------------------------------------------

def _raycast(fp: Floorplan, x_m: float, z_m: float, angle_deg: float,
             max_range_m: float) -> Tuple[float, bool]:
    """Distance along the ray to the first occupied cell boundary (DDA)."""
    rad = math.radians(angle_deg)
    dx, dz = math.cos(rad), math.sin(rad)
    r = fp.cell_size_m
    ox, oz = fp.origin_xz
    row, col = fp.cell_at(x_m, z_m)

    if dx > 0:
        t_max_x = (ox + (col + 1) * r - x_m) / dx
        t_dx, step_c = r / dx, 1
    elif dx < 0:
        t_max_x = (ox + col * r - x_m) / dx
        t_dx, step_c = -r / dx, -1
    else:
        t_max_x, t_dx, step_c = math.inf, math.inf, 0
    if dz > 0:
        t_max_z = (oz + (row + 1) * r - z_m) / dz
        t_dz, step_r = r / dz, 1
    elif dz < 0:
        t_max_z = (oz + row * r - z_m) / dz
        t_dz, step_r = -r / dz, -1
    else:
        t_max_z, t_dz, step_r = math.inf, math.inf, 0

    while True:
        if t_max_x <= t_max_z:
            t = t_max_x
            t_max_x += t_dx
            col += step_c
        else:
            t = t_max_z
            t_max_z += t_dz
            row += step_r
        if t > max_range_m:
            return max_range_m, False
        if not fp.in_extent(row, col):
            return max_range_m, False
        if fp.occupied[row, col]:
            return t, True


def sense(fp: Floorplan, pose: AgentPose, fov_deg: float = 90.0,
          n_rays: int = 128, max_range_m: float = 5.0) -> RangeScan:
    """Cast n_rays evenly spaced across fov_deg around the agent heading.

    Raises:
        ValueError: pose inside an occupied cell, or degenerate parameters.
    """
    if n_rays < 2:
        raise ValueError("n_rays must be at least 2")
    if not 0.0 < fov_deg <= 360.0:
        raise ValueError("fov_deg must be in (0, 360]")
    if max_range_m <= 0:
        raise ValueError("max_range_m must be positive")
    row, col = fp.cell_at(pose.x_m, pose.z_m)
    if not fp.in_extent(row, col) or fp.occupied[row, col]:
        raise ValueError("sensor pose is inside an occupied cell")

    endpoint = fov_deg < 360.0
    bearings = np.linspace(-fov_deg / 2.0, fov_deg / 2.0, n_rays, endpoint=endpoint)
    ranges = np.empty(n_rays)
    hits = np.empty(n_rays, dtype=bool)
    for i, b in enumerate(bearings):
        ranges[i], hits[i] = _raycast(fp, pose.x_m, pose.z_m,
                                      pose.heading_deg + b, max_range_m)
    return RangeScan(bearings_deg=bearings, ranges_m=ranges, hits=hits,
                     fov_deg=fov_deg, max_range_m=max_range_m)


# ---------------------------------------------------------------------------
# Geodesic distances
# ---------------------------------------------------------------------------

def _grid_graph(free: np.ndarray) -> csr_matrix:
    n_r, n_c = free.shape
    n = n_r * n_c
    idx = np.arange(n).reshape(n_r, n_c)
    rows, cols, data = [], [], []
    for dr, dc, w in ((0, 1, 1.0), (1, 0, 1.0), (1, 1, SQRT2), (1, -1, SQRT2)):
        sa = (slice(max(0, -dr), n_r - max(0, dr)),
              slice(max(0, -dc), n_c - max(0, dc)))
        sb = (slice(max(0, dr), n_r + min(0, dr)),
              slice(max(0, dc), n_c + min(0, dc)))
        m = free[sa] & free[sb]
        rows.append(idx[sa][m])
        cols.append(idx[sb][m])
        data.append(np.full(int(m.sum()), w))
    return csr_matrix((np.concatenate(data),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))


def distance_field(free: np.ndarray, sources: Sequence[Tuple[int, int]],
                   cell_size_m: float = 1.0) -> np.ndarray:
    """8-connected shortest-path distance from the nearest source cell.

    Diagonal moves cost sqrt(2) cells.  Unreachable cells get +inf.
    """
    n_r, n_c = free.shape
    graph = _grid_graph(free)
    flat = [r * n_c + c for r, c in sources]
    d = dijkstra(graph, directed=False, indices=flat, min_only=True)
    return (d * cell_size_m).reshape(n_r, n_c)


def weighted_distance_field(cost: np.ndarray,
                            sources: Sequence[Tuple[int, int]]) -> np.ndarray:
    """8-connected shortest-path distance under per-cell entry costs.

    The edge between two neighbouring cells weighs the mean of their entry
    costs scaled by step length (sqrt(2) for diagonals).  With every cost
    equal to 1 this reduces to plain cell distance on a fully free grid;
    raising the cost of blocked cells makes them expensive to cross without
    making them impassable, so the field stays finite everywhere.
    """
    n_r, n_c = cost.shape
    n = n_r * n_c
    idx = np.arange(n).reshape(n_r, n_c)
    rows, cols, data = [], [], []
    for dr, dc, w in ((0, 1, 1.0), (1, 0, 1.0), (1, 1, SQRT2), (1, -1, SQRT2)):
        sa = (slice(max(0, -dr), n_r - max(0, dr)),
              slice(max(0, -dc), n_c - max(0, dc)))
        sb = (slice(max(0, dr), n_r + min(0, dr)),
              slice(max(0, dc), n_c + min(0, dc)))
        rows.append(idx[sa].ravel())
        cols.append(idx[sb].ravel())
        data.append((0.5 * (cost[sa] + cost[sb]) * w).ravel())
    graph = csr_matrix((np.concatenate(data),
                        (np.concatenate(rows), np.concatenate(cols))),
                       shape=(n, n))
    flat = [r * n_c + c for r, c in sources]
    d = dijkstra(graph, directed=False, indices=flat, min_only=True)
    return d.reshape(n_r, n_c)


def shortest_cell_path(free: np.ndarray, start: Tuple[int, int],
                       goal: Tuple[int, int]) -> Optional[List[Tuple[int, int]]]:
    """Cell sequence of one 8-connected shortest path, or None if disconnected."""
    n_r, n_c = free.shape
    graph = _grid_graph(free)
    s = start[0] * n_c + start[1]
    g = goal[0] * n_c + goal[1]
    d, pred = dijkstra(graph, directed=False, indices=s, return_predecessors=True)
    if not np.isfinite(d[g]):
        return None
    path = [g]
    while path[-1] != s:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return [(p // n_c, p % n_c) for p in path]


def geodesic_distance(fp: Floorplan, a_xz: Tuple[float, float],
                      b_xz: Tuple[float, float]) -> float:
    """Shortest 8-connected path length between two free world points.

    Returns math.inf when the points are disconnected.

    Raises:
        ValueError: either endpoint lies in an occupied or out-of-extent cell.
    """
    cells = []
    for x, z in (a_xz, b_xz):
        row, col = fp.cell_at(x, z)
        if not fp.is_free(row, col):
            raise ValueError(f"point ({x}, {z}) is not in a free cell")
        cells.append((row, col))
    field = distance_field(fp.free_mask, [cells[0]], fp.cell_size_m)
    return float(field[cells[1]])


# ---------------------------------------------------------------------------
# Episode sampling
# ---------------------------------------------------------------------------

def interior_free_mask(fp: Floorplan) -> np.ndarray:
    """Free cells whose full 3x3 neighborhood is free (valid agent stands)."""
    return ndimage.binary_erosion(fp.free_mask, structure=np.ones((3, 3), bool))


def sample_start(fp: Floorplan, seed: int) -> AgentPose:
    """Uniform interior free cell center with a heading multiple of 10 deg."""
    rng = np.random.default_rng(seed)
    cells = np.argwhere(interior_free_mask(fp))
    if len(cells) == 0:
        raise EpisodeSamplingError("floorplan has no interior free cell")
    row, col = cells[int(rng.integers(len(cells)))]
    x, z = fp.center(int(row), int(col))
    heading = TURN_DEG * int(rng.integers(36))
    return AgentPose(x, z, heading)


def sample_episode(fp: Floorplan, seed: int, min_geodesic_m: float = 0.0,
                   min_gedr: float = 1.0, budget_t: int = 500,
                   floorplan_id: str = "") -> Episode:
    """Rejection-sample a point-goal episode.

    Draws interior start/goal cells until the geodesic distance and the
    geodesic-to-Euclidean distance ratio (GEDR) clear the given minima.

    Raises:
        ValueError: min_gedr below 1 (unreachable by construction).
        EpisodeSamplingError: constraints unsatisfiable within the attempt
            budget (e.g. demanding high GEDR in a single open room).
    """
    if min_gedr < 1.0:
        raise ValueError("min_gedr below 1 is impossible: geodesics are >= Euclidean")
    rng = np.random.default_rng(seed)
    cells = np.argwhere(interior_free_mask(fp))
    if len(cells) == 0:
        raise EpisodeSamplingError("floorplan has no interior free cell")
    for _ in range(40):
        s_row, s_col = (int(v) for v in cells[int(rng.integers(len(cells)))])
        field = distance_field(fp.free_mask, [(s_row, s_col)], fp.cell_size_m)
        sx, sz = fp.center(s_row, s_col)
        for _ in range(400):
            g_row, g_col = (int(v) for v in cells[int(rng.integers(len(cells)))])
            if (g_row, g_col) == (s_row, s_col):
                continue
            gd = float(field[g_row, g_col])
            if not math.isfinite(gd):
                continue
            gx, gz = fp.center(g_row, g_col)
            eu = math.hypot(gx - sx, gz - sz)
            if eu <= 0.0:
                continue
            gedr = gd / eu
            if gd + 1e-12 >= min_geodesic_m and gedr + 1e-12 >= min_gedr:
                heading = TURN_DEG * int(rng.integers(36))
                return Episode(floorplan_id=floorplan_id,
                               start=AgentPose(sx, sz, heading),
                               goal_xz=(gx, gz), geodesic_m=gd,
                               euclidean_m=eu, gedr=gedr, budget_t=budget_t)
    raise EpisodeSamplingError(
        f"no episode with geodesic >= {min_geodesic_m} and GEDR >= {min_gedr}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def floorplan_to_text(fp: Floorplan) -> str:
    """ASCII map: a cell_size_m header line, then '#' walls and '.' floor."""
    lines = [f"cell_size_m={fp.cell_size_m!r}"]
    for row in fp.occupied:
        lines.append("".join("#" if v else "." for v in row))
    return "\n".join(lines) + "\n"


def floorplan_from_text(text: str) -> Floorplan:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("cell_size_m="):
        raise ValueError("missing cell_size_m header")
    cell_size = float(lines[0].split("=", 1)[1])
    rows = lines[1:]
    if not rows:
        raise ValueError("empty map body")
    width = len(rows[0])
    grid = np.zeros((len(rows), width), dtype=bool)
    for i, ln in enumerate(rows):
        if len(ln) != width:
            raise ValueError(f"ragged row {i}")
        for j, ch in enumerate(ln):
            if ch == "#":
                grid[i, j] = True
            elif ch != ".":
                raise ValueError(f"bad character {ch!r} at row {i}")
    fp = Floorplan(occupied=grid, cell_size_m=cell_size)
    fp.validate()
    return fp


def save_floorplan(fp: Floorplan, path) -> None:
    with open(path, "w") as f:
        f.write(floorplan_to_text(fp))


def load_floorplan(path) -> Floorplan:
    with open(path) as f:
        return floorplan_from_text(f.read())


def pgm_text(gray: np.ndarray) -> str:
    """Plain (P2) PGM text for a 2D uint8 array."""
    h, w = gray.shape
    lines = ["P2", f"{w} {h}", "255"]
    for row in gray:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def floorplan_to_pgm(fp: Floorplan) -> str:
    gray = np.where(fp.occupied, 0, 255).astype(np.uint8)
    return pgm_text(gray)
