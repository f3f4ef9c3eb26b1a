"""Deterministic local controller: route on the fused map, turn, drive.

Routes are recomputed every call on the current fused map.  Cells with
OCCUPIED probability >= 0.5 are impassable after a 2x2 opening that drops
one-cell quantization debris (see blocked_mask); near-uniform (unknown)
cells cost an extra half cell; traversable cells near impassable ones get
a surcharge so routes prefer corridor centerlines.

Motion is gated by a predictive clearance check that mirrors the
simulator's swept-disc collision test on the fused map: a forward move is
only emitted along a heading whose swept disc stays clear of cells with
occupancy >= 0.5.  When the route bearing itself is clear this reduces to
plain turn-then-drive (turn when the heading error exceeds 5 degrees);
when it is not, the controller picks the clear heading closest to the
bearing, which lets it thread corridors barely wider than the agent.

Doorways need more than greedy heading selection: with a 0.25 m stride
and corridors only one agent-diameter wide, entering a corridor mouth
requires lining the stop position up with a band narrower than one cell.
When no clear heading lies anywhere near the route bearing, a gate
threading planner finds the narrow opening the route passes through,
computes the admissible entry band, and searches short stride
combinations that park the agent inside the band facing down the axis;
the resulting action string is cached and replayed, each move
re-validated against the current map before it is issued.  Physical
collisions reported by the caller blacklist that (cell, heading) pair for
the rest of the episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np
from scipy import ndimage
from skimage.graph import route_through_array

from .mapping import GlobalMap, UNKNOWN_MARGIN, blocked_mask
from .world import Action, AgentPose, FORWARD_STEP_M, TURN_DEG, GRID_NUDGE

BLOCK_THRESHOLD = 0.5
UNKNOWN_PENALTY = 0.5
WALL_ADJACENCY_PENALTY = 4.0
WALL_PROXIMITY_PENALTY = 1.0
HEADING_TOLERANCE_DEG = 5.0
FRONT_BLOCK_OCCUPANCY = 0.9
WAYPOINT_MIN_CELLS = 6
# bearing offset beyond which greedy heading selection gives up and the
# gate threading planner takes over
FAST_PATH_MAX_OFF_DEG = 60.0
GATE_BAND_SAFETY = 0.8
GATE_MAX_CANDIDATES = 300
GATE_MAX_ACTIONS = 80
# headings this far off the route bearing may be probed physically when the
# map predicts every near-bearing move is blocked
PROBE_MAX_OFF_DEG = 30.0


@dataclass
class ControllerState:
    goal_cell: Optional[Tuple[int, int]] = None
    route: Optional[List[Tuple[int, int]]] = None
    stuck: int = 0
    # (row, col, heading_deg) triples where a forward move physically collided
    avoid: Set[Tuple[int, int, int]] = field(default_factory=set)
    # queued actions from the micro-planner, replayed front to back
    plan: List[Action] = field(default_factory=list)
    # the queued move is a physical probe: skip the swept-map re-validation
    probing: bool = False


def reached(pose: AgentPose, goal_xz: Tuple[float, float],
            radius_m: float = 0.2) -> bool:
    """Closed-ball success test."""
    return math.hypot(pose.x_m - goal_xz[0], pose.z_m - goal_xz[1]) <= radius_m


def route_costs(fused: GlobalMap) -> np.ndarray:
    occ = fused.occupancy()
    blocked = blocked_mask(fused)
    unknown = fused.probs.max(axis=-1) <= 1.0 / 3.0 + UNKNOWN_MARGIN
    ring1 = ndimage.binary_dilation(blocked, structure=np.ones((3, 3), bool))
    ring2 = ndimage.binary_dilation(ring1, structure=np.ones((3, 3), bool))
    # cells squeezed between walls on opposite sides have no clear position
    # for the agent disc at all, so they are as good as walls
    squeeze = np.zeros_like(blocked)
    squeeze[:, 1:-1] |= blocked[:, :-2] & blocked[:, 2:]
    squeeze[1:-1, :] |= blocked[:-2, :] & blocked[2:, :]
    squeeze[1:-1, 1:-1] |= blocked[:-2, :-2] & blocked[2:, 2:]
    squeeze[1:-1, 1:-1] |= blocked[:-2, 2:] & blocked[2:, :-2]
    costs = np.ones(occ.shape)
    costs[unknown] += UNKNOWN_PENALTY
    costs[ring2 & ~blocked] += WALL_PROXIMITY_PENALTY
    costs[ring1 & ~blocked] += WALL_ADJACENCY_PENALTY
    costs[blocked | squeeze] = np.inf
    return costs


def plan_route(fused: GlobalMap, start: Tuple[int, int],
               goal: Tuple[int, int]) -> Optional[List[Tuple[int, int]]]:
    """Minimum-cost 8-connected route, or None when the goal is sealed off."""
    costs = route_costs(fused)
    costs[start] = 1.0  # the agent is standing here
    if not np.isfinite(costs[goal]):
        return None
    try:
        cells, _ = route_through_array(costs, start, goal,
                                       fully_connected=True, geometric=True)
    except ValueError:
        return None
    return [(int(r), int(c)) for r, c in cells]


def _wrap_deg(a: float) -> float:
    return (a + 180.0) % 360.0 - 180.0


def _sampled_disc_blocked(fused: GlobalMap, px: np.ndarray,
                          pz: np.ndarray) -> np.ndarray:
    """Disc-blocked test for batches of sample points, one row per batch.

    Mirrors the simulator's collision model: disc radius of one cell,
    closed-disc contact test against cell rectangles, and cells outside
    the map treated as solid.  Hits are judged against the debris-filtered
    blocked mask.  px and pz have shape (batches, samples); returns a bool
    per batch that is True when any of its samples hits.
    """
    r = fused.cell_size_m
    ox, oz = fused.origin_xz
    occ_mask = blocked_mask(fused)

    rows = np.floor((pz - oz) / r + GRID_NUDGE).astype(int)
    cols = np.floor((px - ox) / r + GRID_NUDGE).astype(int)
    # any sample whose 3x3 cell neighborhood leaves the map counts as a hit
    near_border = ((rows < 1) | (rows >= fused.h - 1)
                   | (cols < 1) | (cols >= fused.w - 1))
    blocked = near_border.any(axis=1)

    # occupied cells that could possibly touch any sample
    r_lo = max(int(rows.min()) - 1, 0)
    r_hi = min(int(rows.max()) + 2, fused.h)
    c_lo = max(int(cols.min()) - 1, 0)
    c_hi = min(int(cols.max()) + 2, fused.w)
    occ_cells = np.argwhere(occ_mask[r_lo:r_hi, c_lo:c_hi])
    if occ_cells.size == 0:
        return blocked
    cell_x0 = ox + (occ_cells[:, 1] + c_lo) * r
    cell_z0 = oz + (occ_cells[:, 0] + r_lo) * r

    # closest point of each cell rectangle to each sample, (batches, samples, cells)
    qx = np.clip(px[..., None], cell_x0, cell_x0 + r)
    qz = np.clip(pz[..., None], cell_z0, cell_z0 + r)
    d2 = (qx - px[..., None]) ** 2 + (qz - pz[..., None]) ** 2
    blocked |= (d2 <= r * r).any(axis=(1, 2))
    return blocked


def swept_move_blocked(fused: GlobalMap, pose: AgentPose,
                       headings_deg: np.ndarray) -> np.ndarray:
    """Predict, per heading, whether a forward move's swept disc would hit.

    Samples every quarter cell along the 0.25 m stride, exactly as the
    simulator does.
    """
    r = fused.cell_size_m
    spacing = r / 4.0
    n = int(math.ceil(FORWARD_STEP_M / spacing))
    ts = FORWARD_STEP_M * np.arange(n + 1) / n
    rads = np.radians(np.asarray(headings_deg, dtype=float))
    px = pose.x_m + np.outer(np.cos(rads), ts)
    pz = pose.z_m + np.outer(np.sin(rads), ts)
    return _sampled_disc_blocked(fused, px, pz)


def segment_clear(fused: GlobalMap, pose: AgentPose,
                  target_xz: Tuple[float, float]) -> bool:
    """True when the straight swept-disc run from pose to target stays clear."""
    dx = target_xz[0] - pose.x_m
    dz = target_xz[1] - pose.z_m
    length = math.hypot(dx, dz)
    if length < 1e-12:
        return True
    spacing = fused.cell_size_m / 4.0
    n = int(math.ceil(length / spacing))
    ts = length * np.arange(n + 1) / n
    px = (pose.x_m + ts * (dx / length))[None, :]
    pz = (pose.z_m + ts * (dz / length))[None, :]
    return not bool(_sampled_disc_blocked(fused, px, pz)[0])


def _turn_actions(from_deg: float, to_deg: float) -> List[Action]:
    """Shortest chain of 10-degree turns taking from_deg to to_deg."""
    d = _wrap_deg(to_deg - from_deg)
    n = int(round(abs(d) / TURN_DEG))
    return [Action.TURN_RIGHT if d > 0 else Action.TURN_LEFT] * n


def _advance(pose: AgentPose, heading_deg: float) -> AgentPose:
    rad = math.radians(heading_deg)
    return AgentPose(pose.x_m + FORWARD_STEP_M * math.cos(rad),
                     pose.z_m + FORWARD_STEP_M * math.sin(rad),
                     heading_deg % 360.0)


def _find_gate(fused: GlobalMap, route: List[Tuple[int, int]]
               ) -> Optional[Tuple[int, float, float, float, float]]:
    """Locate the first narrow opening the route passes through.

    Returns (route_index, axis_heading_deg, perp_center_m, band_half_m,
    gate_plane_m) where perp_center is the clear-span midline across the
    gate, band_half the half width of admissible disc-center positions,
    and gate_plane the along-axis coordinate of the gate cell center.
    """
    occ = blocked_mask(fused)
    r = fused.cell_size_m
    ox, oz = fused.origin_xz
    for i in range(1, len(route) - 1):
        row, col = route[i]
        drow = route[i + 1][0] - route[i - 1][0]
        dcol = route[i + 1][1] - route[i - 1][1]
        if abs(drow) > abs(dcol) and drow != 0:
            heading = 90.0 if drow > 0 else 270.0
            lo = col
            while lo - 1 >= 0 and not occ[row, lo - 1] and col - lo < 6:
                lo -= 1
            hi = col
            while hi + 1 < fused.w and not occ[row, hi + 1] and hi - col < 6:
                hi += 1
            width = hi - lo + 1
            perp_center = ox + (lo + hi + 1) * 0.5 * r
            plane = oz + (row + 0.5) * r
        elif abs(dcol) > abs(drow) and dcol != 0:
            heading = 0.0 if dcol > 0 else 180.0
            lo = row
            while lo - 1 >= 0 and not occ[lo - 1, col] and row - lo < 6:
                lo -= 1
            hi = row
            while hi + 1 < fused.h and not occ[hi + 1, col] and hi - row < 6:
                hi += 1
            width = hi - lo + 1
            perp_center = oz + (lo + hi + 1) * 0.5 * r
            plane = ox + (col + 0.5) * r
        else:
            continue
        if width > 4:
            continue  # open space or wall hugging, not a pinch
        band_half = (width * r - 2.0 * r) / 2.0
        if band_half <= 0.0:
            return None  # physically impassable
        return i, heading, perp_center, band_half * GATE_BAND_SAFETY, plane
    return None


def _thread_gate(fused: GlobalMap, pose: AgentPose,
                 route: List[Tuple[int, int]],
                 avoid: Set[Tuple[int, int, int]],
                 gate: Optional[Tuple[int, float, float, float, float]] = None,
                 ) -> Optional[List[Action]]:
    """Plan a short stride combination that enters a narrow gate.

    The 0.25 m stride quantizes reachable stop positions; crossing a gate
    barely wider than the agent requires parking inside a perpendicular
    band narrower than one cell and then driving straight down the axis.
    Enumerates stop positions reachable in up to three moves, keeps those
    inside the band on the near side of the gate, and validates the best
    few with the same swept-disc test the simulator applies.
    """
    if gate is None:
        gate = _find_gate(fused, route)
    if gate is None:
        return None
    _, heading_axis, perp_center, band_half, plane = gate
    perp_idx = 0 if heading_axis in (90.0, 270.0) else 1
    axis_idx = 1 - perp_idx
    axis_sign = 1.0 if heading_axis in (0.0, 90.0) else -1.0

    p0 = np.array([pose.x_m, pose.z_m])
    rads = np.radians(TURN_DEG * np.arange(36))
    sv = FORWARD_STEP_M * np.stack([np.cos(rads), np.sin(rads)], axis=1)

    # stop positions after 0..3 moves, as (hop headings, endpoint)
    cands: List[Tuple[int, float, float, Tuple[int, ...]]] = []

    def consider(endpoint: np.ndarray, hops: Tuple[int, ...]) -> None:
        off = abs(float(endpoint[perp_idx]) - perp_center)
        if off > band_half:
            return
        gap = (plane - float(endpoint[axis_idx])) * axis_sign
        if gap < 2.0 * fused.cell_size_m:
            return  # already past or inside the gate plane
        if gap > 1.25:
            return  # too far back to be the right gate approach
        turn_sum = sum(1 for _ in hops)
        cands.append((len(hops), off, float(turn_sum), hops))

    consider(p0, ())
    e1 = p0 + sv
    for k in range(36):
        consider(e1[k], (k,))
    e2 = e1[:, None, :] + sv[None, :, :]
    off2 = np.abs(e2[..., perp_idx] - perp_center) <= band_half
    for k1, k2 in np.argwhere(off2):
        consider(e2[k1, k2], (int(k1), int(k2)))
    if not any(c[0] <= 2 for c in cands):
        e3 = e2[:, :, None, :] + sv[None, None, :, :]
        off3 = np.abs(e3[..., perp_idx] - perp_center) <= band_half
        for k1, k2, k3 in np.argwhere(off3):
            consider(e3[k1, k2, k3], (int(k1), int(k2), int(k3)))

    cands.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
    r = fused.cell_size_m
    ox, oz = fused.origin_xz
    for _, _, _, hops in cands[:GATE_MAX_CANDIDATES]:
        actions: List[Action] = []
        cur = pose
        ok = True
        for k in hops:
            theta = float(TURN_DEG * k)
            c_row = int(math.floor((cur.z_m - oz) / r + GRID_NUDGE))
            c_col = int(math.floor((cur.x_m - ox) / r + GRID_NUDGE))
            if (c_row, c_col, int(round(theta)) % 360) in avoid:
                ok = False
                break
            probe = AgentPose(cur.x_m, cur.z_m, theta)
            if bool(swept_move_blocked(fused, probe, np.array([theta]))[0]):
                ok = False
                break
            actions.extend(_turn_actions(cur.heading_deg, theta))
            actions.append(Action.MOVE_FORWARD)
            cur = _advance(cur, theta)
        if not ok:
            continue
        # face down the axis and stride until the disc is past the gate
        # plane; a combo whose straight run is blocked short of the plane
        # (say by clutter in the approach) is no use, drop it
        actions.extend(_turn_actions(cur.heading_deg, heading_axis))
        cur = AgentPose(cur.x_m, cur.z_m, heading_axis)
        along = cur.x_m if axis_idx == 0 else cur.z_m
        n_cross = min(8, int(math.ceil((plane - along) * axis_sign
                                       / FORWARD_STEP_M)) + 1)
        crossed = False
        for _ in range(n_cross):
            if bool(swept_move_blocked(fused, cur, np.array([heading_axis]))[0]):
                break
            actions.append(Action.MOVE_FORWARD)
            cur = _advance(cur, heading_axis)
            along = cur.x_m if axis_idx == 0 else cur.z_m
            if (plane - along) * axis_sign <= -fused.cell_size_m:
                crossed = True
                break
        if not crossed:
            continue
        if 0 < len(actions) <= GATE_MAX_ACTIONS:
            return actions
    return None


def _front_cell(fused: GlobalMap, pose: AgentPose,
                heading_deg: float) -> Tuple[int, int]:
    """Cell one cell-length ahead of the pose along a heading."""
    r = fused.cell_size_m
    rad = math.radians(heading_deg)
    return (int(math.floor((pose.z_m + r * math.sin(rad)
                            - fused.origin_xz[1]) / r + GRID_NUDGE)),
            int(math.floor((pose.x_m + r * math.cos(rad)
                            - fused.origin_xz[0]) / r + GRID_NUDGE)))


def _probe_heading(state: ControllerState, pose: AgentPose, fused: GlobalMap,
                   bearing: float, a_row: int, a_col: int) -> Optional[float]:
    """Heading near the route bearing worth testing against the real world.

    False-positive cells can accumulate in the fused map and seal a passage
    that is physically open; the swept-disc check then predicts a hit
    forever and the controller would orbit the entrance.  Driving into the
    predicted hit settles the question: either the move succeeds and the
    seal was fiction, or it collides once and the (cell, heading) pair
    lands in the avoid set, never to be tried again.  Front cells at or
    above the hard block threshold are never probed.
    """
    occ = fused.occupancy()
    cands = sorted((abs(_wrap_deg(TURN_DEG * k - bearing)), TURN_DEG * k)
                   for k in range(36))
    for off, h in cands:
        if off > PROBE_MAX_OFF_DEG:
            break
        if (a_row, a_col, int(round(h)) % 360) in state.avoid:
            continue
        front = _front_cell(fused, pose, h)
        if not (0 <= front[0] < fused.h and 0 <= front[1] < fused.w):
            continue
        if occ[front] >= FRONT_BLOCK_OCCUPANCY:
            continue
        return float(h)
    return None


def next_action(state: ControllerState, pose: AgentPose, fused: GlobalMap,
                goal_cell: Tuple[int, int], collided_last: bool = False) -> Action:
    """One action toward goal_cell: turn if misaligned, else move forward.

    Turns trigger when the heading error to the next route waypoint exceeds
    5 degrees.  A MOVE_FORWARD is never emitted when the cell immediately
    ahead has fused occupancy >= 0.9, nor along a heading whose predicted
    swept disc would hit a mapped obstacle.  collided_last reports whether
    the previous action was a blocked forward move.
    """
    r = fused.cell_size_m
    heading = pose.heading_deg % 360.0
    a_row = int(math.floor((pose.z_m - fused.origin_xz[1]) / r + GRID_NUDGE))
    a_col = int(math.floor((pose.x_m - fused.origin_xz[0]) / r + GRID_NUDGE))
    if collided_last:
        state.stuck += 1
        state.avoid.add((a_row, a_col, int(round(heading)) % 360))
        state.plan = []
        state.probing = False
    if not (0 <= goal_cell[0] < fused.h and 0 <= goal_cell[1] < fused.w):
        raise ValueError("goal cell is outside the global map extent")
    goal = (int(goal_cell[0]), int(goal_cell[1]))
    if state.goal_cell != goal:
        # queued actions were aimed at the previous goal; replaying a stale
        # turn chain can walk the agent away from the new bearing and cost a
        # full about-face to recover
        state.plan = []
        state.probing = False
    state.goal_cell = goal

    gx = fused.origin_xz[0] + (goal_cell[1] + 0.5) * r
    gz = fused.origin_xz[1] + (goal_cell[0] + 0.5) * r
    if math.hypot(gx - pose.x_m, gz - pose.z_m) <= 1.5 * r:
        # close enough that routing would degenerate; sweep in place until
        # the task layer replans or stops
        state.route = None
        state.plan = []
        state.probing = False
        return Action.TURN_LEFT

    if state.plan:
        nxt = state.plan[0]
        if nxt is not Action.MOVE_FORWARD:
            return state.plan.pop(0)
        if state.probing:
            # the whole point of the probe is to override the swept check,
            # but the hard front-cell limit still applies
            state.probing = False
            if fused.occupancy()[_front_cell(fused, pose, heading)] \
                    < FRONT_BLOCK_OCCUPANCY:
                state.stuck = 0
                return state.plan.pop(0)
            state.plan = []
        # moves are re-validated against the map as it stands now
        elif not bool(swept_move_blocked(fused, pose, np.array([heading]))[0]):
            state.stuck = 0
            return state.plan.pop(0)
        else:
            state.plan = []

    route = plan_route(fused, (a_row, a_col), tuple(goal_cell))
    state.route = route
    if route is None or len(route) < 2:
        # the map claims the goal is sealed off entirely; distrust it once
        # per (cell, heading) and drive the straight-line bearing anyway
        bearing = math.degrees(math.atan2(gz - pose.z_m, gx - pose.x_m))
        probe = _probe_heading(state, pose, fused, bearing, a_row, a_col)
        if probe is not None:
            state.plan = _turn_actions(heading, probe) + [Action.MOVE_FORWARD]
            state.probing = True
            return next_action(state, pose, fused, goal_cell)
        state.stuck += 1
        return Action.TURN_LEFT

    # approaching a narrow gate: line up with its band before greedy
    # pursuit can wedge against the jambs
    gate = _find_gate(fused, route)
    if gate is not None and gate[0] <= 24:
        _, g_heading, g_center, g_half, g_plane = gate
        if g_heading in (90.0, 270.0):
            perp, along = pose.x_m, pose.z_m
        else:
            perp, along = pose.z_m, pose.x_m
        axis_sign = 1.0 if g_heading in (0.0, 90.0) else -1.0
        gap = (g_plane - along) * axis_sign
        aligned = (abs(perp - g_center) <= g_half
                   and abs(_wrap_deg(heading - g_heading)) < 1e-9)
        if 2.0 * r <= gap <= 1.0 and not aligned:
            plan = _thread_gate(fused, pose, route, state.avoid, gate)
            if plan:
                state.plan = plan
                state.probing = False
                return next_action(state, pose, fused, goal_cell)

    def cell_center(cell: Tuple[int, int]) -> Tuple[float, float]:
        return (fused.origin_xz[0] + (cell[1] + 0.5) * r,
                fused.origin_xz[1] + (cell[0] + 0.5) * r)

    # pursue the farthest route cell in swept line of sight; the longer the
    # target segment, the fewer heading corrections quantization forces
    lo = 1
    while lo < len(route) - 1 and max(abs(route[lo][0] - a_row),
                                      abs(route[lo][1] - a_col)) < 2:
        lo += 1
    waypoint = None
    if segment_clear(fused, pose, cell_center(route[-1])):
        waypoint = route[-1]
    else:
        hi = len(route) - 1
        good = None
        while lo <= hi:
            mid = (lo + hi) // 2
            if segment_clear(fused, pose, cell_center(route[mid])):
                good = route[mid]
                lo = mid + 1
            else:
                hi = mid - 1
        waypoint = good
    if waypoint is None:
        # nothing visible: fall back to a short fixed lookahead
        waypoint = route[-1]
        for cell in route[1:]:
            if max(abs(cell[0] - a_row), abs(cell[1] - a_col)) >= WAYPOINT_MIN_CELLS:
                waypoint = cell
                break
    wx, wz = cell_center(waypoint)
    bearing = math.degrees(math.atan2(wz - pose.z_m, wx - pose.x_m))

    thetas = (heading + TURN_DEG * np.arange(36)) % 360.0
    blocked = swept_move_blocked(fused, pose, thetas)
    best = None
    best_key = None
    for theta, hit in zip(thetas, blocked):
        if hit or (a_row, a_col, int(round(theta)) % 360) in state.avoid:
            continue
        key = (abs(_wrap_deg(theta - bearing)), abs(_wrap_deg(theta - heading)),
               theta)
        if best_key is None or key < best_key:
            best_key = key
            best = theta

    if best is None or abs(_wrap_deg(best - bearing)) > FAST_PATH_MAX_OFF_DEG:
        # nothing clear anywhere near the bearing: thread the gap explicitly
        plan = _thread_gate(fused, pose, route, state.avoid, gate)
        if plan:
            state.plan = plan
            state.probing = False
            return next_action(state, pose, fused, goal_cell)
        probe = _probe_heading(state, pose, fused, bearing, a_row, a_col)
        if probe is not None:
            state.plan = _turn_actions(heading, probe) + [Action.MOVE_FORWARD]
            state.probing = True
            return next_action(state, pose, fused, goal_cell)
        if best is None:
            state.stuck += 1
            return Action.TURN_LEFT

    turn = _wrap_deg(best - heading)
    if abs(turn) > 1e-9:
        # commit to the whole turn chain plus one stride; re-deciding
        # after every 10-degree turn chases the bearing drift caused by
        # each new scan and can spin in place indefinitely
        chain = _turn_actions(heading, best)
        state.plan = chain[1:] + [Action.MOVE_FORWARD]
        state.probing = False
        return chain[0]

    front = _front_cell(fused, pose, heading)
    if (0 <= front[0] < fused.h and 0 <= front[1] < fused.w
            and fused.occupancy()[front] >= FRONT_BLOCK_OCCUPANCY):
        state.stuck += 1
        return Action.TURN_LEFT
    state.stuck = 0
    return Action.MOVE_FORWARD
