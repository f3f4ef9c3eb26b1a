"""Random-tree generation of candidate paths on a probabilistic map.

Cells are traversable when the fused OCCUPIED probability is below 0.6
after a debris filter drops isolated one-cell quantization artifacts (see
mapping.blocked_mask), so unknown-uniform cells (occupancy 1/3) count as
traversable and the tree can grow into unexplored space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .mapping import GlobalMap, blocked_mask
from .world import weighted_distance_field

# Entry cost of a predicted-blocked cell in the fallback ranking when no
# candidate reaches the goal.  High enough that crossing several blocked
# cells dominates any free-space detour, low enough to stay finite.
BLOCKED_CELL_COST = 30.0


@dataclass
class RrtParams:
    max_paths: int = 10
    goal_rate: float = 0.2
    step_cells: int = 5
    iterations: int = 3000
    occupancy_threshold: float = 0.6
    goal_tolerance_cells: float = 4.0


@dataclass
class Path:
    cells: List[Tuple[int, int]]
    length_m: float


@dataclass
class CandidateSet:
    paths: List[Path]
    blocked: bool = False
    reached_goal: bool = False
    n_iterations: int = 0
    n_goal_samples: int = 0


def path_length(cells: List[Tuple[int, int]], cell_size_m: float) -> float:
    """Sum of Euclidean distances between consecutive cells, in meters."""
    total = 0.0
    for a, b in zip(cells, cells[1:]):
        total += math.hypot(b[0] - a[0], b[1] - a[1])
    return total * cell_size_m


def make_path(cells: List[Tuple[int, int]], cell_size_m: float) -> Path:
    return Path(cells=list(cells), length_m=path_length(cells, cell_size_m))


def _edge_clear(trav: np.ndarray, a: Tuple[float, float],
                b: Tuple[float, float]) -> bool:
    """All cells sampled every quarter cell along the segment are traversable."""
    dist = math.hypot(b[0] - a[0], b[1] - a[1])
    n = max(int(math.ceil(dist / 0.25)), 1)
    for i in range(n + 1):
        t = i / n
        r = int(round(a[0] + t * (b[0] - a[0])))
        c = int(round(a[1] + t * (b[1] - a[1])))
        if not (0 <= r < trav.shape[0] and 0 <= c < trav.shape[1]):
            return False
        if not trav[r, c]:
            return False
    return True


def _warm_remainder(trav: np.ndarray, root: Tuple[int, int],
                    prev_cells: Sequence[Tuple[int, int]],
                    step_cells: int) -> Optional[List[Tuple[int, int]]]:
    """Re-root the previously selected path at the agent, or None.

    The remainder starts from the previous path's cell nearest the agent;
    it is dropped when the agent has strayed more than one expansion step
    from the path or any remaining edge is no longer clear.
    """
    best, best_d = None, float("inf")
    for i, (cr, cc) in enumerate(prev_cells):
        d = math.hypot(cr - root[0], cc - root[1])
        if d < best_d:
            best, best_d = i, d
    if best is None or best_d > step_cells:
        return None
    cells = [(int(root[0]), int(root[1]))]
    cells += [(int(r), int(c)) for r, c in prev_cells[best:]
              if (int(r), int(c)) != cells[0]]
    if len(cells) < 2:
        return None
    for a, b in zip(cells, cells[1:]):
        if not _edge_clear(trav, a, b):
            return None
    return cells


def _step_toward(src: Tuple[int, int], dst: Tuple[float, float],
                 step_cells: int) -> Optional[Tuple[int, int]]:
    """Integer cell at most step_cells from src along the direction to dst."""
    dr = dst[0] - src[0]
    dc = dst[1] - src[1]
    dist = math.hypot(dr, dc)
    if dist < 1e-9:
        return None
    scale = min(step_cells / dist, 1.0)
    while scale > 1e-3:
        cand = (src[0] + int(round(dr * scale)), src[1] + int(round(dc * scale)))
        if cand != tuple(src) and math.hypot(cand[0] - src[0], cand[1] - src[1]) <= step_cells:
            return cand
        scale *= 0.9
    return None


def plan_paths(fused: GlobalMap, agent_cell: Tuple[int, int],
               goal_cell: Optional[Tuple[int, int]] = None,
               params: Optional[RrtParams] = None, seed: int = 0,
               prev_cells: Optional[Sequence[Tuple[int, int]]] = None,
               ) -> CandidateSet:
    """Grow a random tree from the agent cell and extract candidate paths.

    Point-goal mode (goal_cell given): the goal cell is sampled as the
    expansion target with probability goal_rate, otherwise a uniform
    traversable cell; root-to-node chains ending within the goal tolerance
    become candidates, capped at max_paths.  If nothing reaches the goal,
    the fallback returns the chains whose terminal nodes are geodesically
    closest to the goal (Euclidean tiebreak).

    Exploration mode (goal_cell None): sampling is uniform only and the
    candidates are the chains to the max_paths deepest nodes.

    prev_cells, when given, is the path selected at the previous planning
    cycle; its remainder from the agent onward re-enters the candidate set
    (replacing the weakest tree candidate, so the cap still holds) as long
    as it is still clear on the current map.  Freshly drawn trees rarely
    repeat a bearing, so without this the selected direction can swing
    wildly between consecutive replans and the agent pays for every swing
    in 10-degree turn steps.

    Raises:
        ValueError: agent cell not traversable or outside the map.
    """
    p = params or RrtParams()
    trav = ~blocked_mask(fused, p.occupancy_threshold)
    h, w = trav.shape
    ar, ac = int(agent_cell[0]), int(agent_cell[1])
    if not (0 <= ar < h and 0 <= ac < w):
        raise ValueError("agent cell outside the map extent")
    if not trav[ar, ac]:
        raise ValueError("agent cell is not traversable")

    rng = np.random.default_rng(seed)
    free_cells = np.argwhere(trav)

    max_nodes = p.iterations + 1
    nodes = np.empty((max_nodes, 2))
    nodes[0] = (ar, ac)
    parents = [-1]
    depths = [0]
    n_nodes = 1
    seen = {(ar, ac)}

    goal_chains: List[int] = []
    n_goal_samples = 0
    iterations_run = 0

    for _ in range(p.iterations):
        iterations_run += 1
        if goal_cell is not None and rng.random() < p.goal_rate:
            target = (float(goal_cell[0]), float(goal_cell[1]))
            n_goal_samples += 1
        else:
            pick = free_cells[int(rng.integers(len(free_cells)))]
            target = (float(pick[0]), float(pick[1]))

        d = nodes[:n_nodes] - target
        nearest = int(np.argmin(np.einsum("ij,ij->i", d, d)))
        src = (int(nodes[nearest, 0]), int(nodes[nearest, 1]))
        new = _step_toward(src, target, p.step_cells)
        if new is None or new in seen:
            continue
        if not (0 <= new[0] < h and 0 <= new[1] < w):
            continue
        if not _edge_clear(trav, src, new):
            continue

        nodes[n_nodes] = new
        parents.append(nearest)
        depths.append(depths[nearest] + 1)
        seen.add(new)
        idx = n_nodes
        n_nodes += 1

        if goal_cell is not None and len(goal_chains) < p.max_paths:
            if math.hypot(new[0] - goal_cell[0], new[1] - goal_cell[1]) <= p.goal_tolerance_cells:
                goal_chains.append(idx)
                if len(goal_chains) >= p.max_paths:
                    break

    def chain(idx: int) -> List[Tuple[int, int]]:
        cells = []
        while idx >= 0:
            cells.append((int(nodes[idx, 0]), int(nodes[idx, 1])))
            idx = parents[idx]
        cells.reverse()
        return cells

    if n_nodes == 1:
        return CandidateSet(paths=[], blocked=True, reached_goal=False,
                            n_iterations=iterations_run,
                            n_goal_samples=n_goal_samples)

    if goal_cell is not None:
        if goal_chains:
            picked = goal_chains
            reached = True
        else:
            # No branch reached the goal: keep the terminals cheapest to
            # extend toward it.  Blocked cells are crossable at high cost,
            # so when the goal sits behind a predicted wall the ranking
            # funnels candidates toward the thinnest barrier (a doorway)
            # instead of the Euclid-nearest dead end.  Terminals within one
            # expansion step of the agent are skipped (a candidate that goes
            # nowhere invites a goal-reached/replan loop in the caller), and
            # picked terminals keep one step of separation from each other so
            # the scorer chooses between genuinely different paths rather
            # than ten copies of the same local optimum.
            cost = np.where(trav, 1.0, BLOCKED_CELL_COST)
            field = weighted_distance_field(
                cost, [(int(goal_cell[0]), int(goal_cell[1]))])
            order = []
            for i in range(1, n_nodes):
                r, c = int(nodes[i, 0]), int(nodes[i, 1])
                if math.hypot(r - ar, c - ac) < p.step_cells:
                    continue
                eu = math.hypot(r - goal_cell[0], c - goal_cell[1])
                order.append((float(field[r, c]), eu, i))
            order.sort()
            picked = []
            for _, _, i in order:
                if len(picked) >= p.max_paths:
                    break
                if all(math.hypot(nodes[i, 0] - nodes[j, 0],
                                  nodes[i, 1] - nodes[j, 1]) >= p.step_cells
                       for j in picked):
                    picked.append(i)
            reached = False
    else:
        order = sorted(range(1, n_nodes), key=lambda i: (-depths[i], i))
        picked = order[:p.max_paths]
        reached = False

    paths = [make_path(chain(i), fused.cell_size_m) for i in picked]
    if prev_cells is not None:
        warm = _warm_remainder(trav, (ar, ac), prev_cells, p.step_cells)
        if warm is not None:
            paths = paths[:p.max_paths - 1]
            paths.append(make_path(warm, fused.cell_size_m))
    return CandidateSet(paths=paths, blocked=False, reached_goal=reached,
                        n_iterations=iterations_run,
                        n_goal_samples=n_goal_samples)
