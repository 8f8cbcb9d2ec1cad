"""Plan prediction: path length, turnaround time, and coverage percentage.

The turnaround estimate splits into the translation time L/v and the
rotational time n_t * theta / omega accumulated at corners, where theta sums
absolute heading changes between consecutive segments. Coverage prediction
paints a corridor around the route (direct, width follows the local block
size) plus everything the range sensor can see from the route (indirect,
line-of-sight limited by obstacle cells).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coverage_path import CoveragePath
from .geometry import supercover_cells, wrap_angle
from .grid import GridMap


@dataclass
class Budget:
    """Mission limits the plan must respect."""

    max_path_length: float
    max_time: float
    max_speed: float

    def __post_init__(self):
        for name in ("max_path_length", "max_time", "max_speed"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"budget {name} must be strictly positive")


@dataclass
class CoverageEstimate:
    """Coverage fraction plus the cell sets behind it."""

    coverage_percent: float
    direct_cover_cells: set[tuple[int, int]]
    indirect_cover_cells: set[tuple[int, int]]
    observed_obstacle_cells: set[tuple[int, int]]


@dataclass
class PlanPrediction:
    path_length: float
    turnaround_time: float
    total_turn_angle: float
    coverage_percent: float
    direct_cover_cells: set[tuple[int, int]] = field(default_factory=set)
    indirect_cover_cells: set[tuple[int, int]] = field(default_factory=set)
    observed_obstacle_cells: set[tuple[int, int]] = field(default_factory=set)

    @staticmethod
    def combine(kinematics: tuple[float, float, float], coverage: CoverageEstimate) -> "PlanPrediction":
        length, theta, t_hat = kinematics
        return PlanPrediction(
            path_length=length,
            turnaround_time=t_hat,
            total_turn_angle=theta,
            coverage_percent=coverage.coverage_percent,
            direct_cover_cells=coverage.direct_cover_cells,
            indirect_cover_cells=coverage.indirect_cover_cells,
            observed_obstacle_cells=coverage.observed_obstacle_cells,
        )


def predict_kinematics(
    path: CoveragePath, v: float, omega: float, n_t: float = 1.0
) -> tuple[float, float, float]:
    """Predict (path length, total turn angle, turnaround time) for a route.

    Heading differences are wrapped to (-pi, pi] before taking the absolute
    value; for a closed path the corner back to the first segment counts too.
    """
    if v <= 0.0 or omega <= 0.0:
        raise ValueError("v and omega must be strictly positive")
    if len(path.waypoints) < 2:
        raise ValueError("path needs at least 2 waypoints")

    segs = path.segments
    headings = [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in segs]
    length = path.length

    corners = range(len(segs) - 1) if not path.closed else range(len(segs))
    theta = 0.0
    for k in corners:
        theta += abs(wrap_angle(headings[(k + 1) % len(segs)] - headings[k]))

    t_hat = length / v + n_t * theta / omega
    return length, theta, t_hat


def _segment_arrays(path: CoveragePath, cell_size: float, halfwidth_cap: float):
    """Per-segment endpoint arrays and corridor halfwidths.

    A segment's corridor follows the block-size annotation of the waypoint it
    leads to (the formation reshapes for the waypoint it is approaching),
    capped by halfwidth_cap.
    """
    pts = path.waypoints
    sizes = path.block_sizes
    n = len(pts)
    seg_a, seg_b, half = [], [], []
    count = n if path.closed else n - 1
    for k in range(count):
        a = pts[k]
        b = pts[(k + 1) % n]
        bs_end = sizes[(k + 1) % n]
        seg_a.append(a)
        seg_b.append(b)
        half.append(min(bs_end * cell_size / 2.0, halfwidth_cap))
    return np.asarray(seg_a), np.asarray(seg_b), np.asarray(half)


def _point_segment_distances(centers: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix (cells x segments), chunked to bound memory."""
    n_cells = centers.shape[0]
    n_segs = a.shape[0]
    out = np.empty((n_cells, n_segs))
    chunk = max(1, int(4_000_000 // max(n_cells, 1)))
    for s0 in range(0, n_segs, chunk):
        s1 = min(n_segs, s0 + chunk)
        av = a[s0:s1][None, :, :]
        bv = b[s0:s1][None, :, :]
        pv = centers[:, None, :]
        d = bv - av
        denom = (d * d).sum(-1)
        denom[denom == 0.0] = 1e-30
        t = ((pv - av) * d).sum(-1) / denom
        t = np.clip(t, 0.0, 1.0)
        proj = av + t[..., None] * d
        out[:, s0:s1] = np.linalg.norm(pv - proj, axis=-1)
    return out


class _LosCache:
    """Line-of-sight between cell centers, memoized per (from, to) pair."""

    def __init__(self, grid: GridMap):
        self.grid = grid
        self.cache: dict[tuple[tuple[int, int], tuple[int, int]], bool] = {}

    def visible(self, src: tuple[int, int], dst: tuple[int, int]) -> bool:
        key = (src, dst)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        a = self.grid.cell_center(*src)
        b = self.grid.cell_center(*dst)
        ok = True
        for cell in supercover_cells(a, b, self.grid.origin, self.grid.cell_size):
            if cell == dst or cell == src:
                continue
            if self.grid.in_bounds(*cell) and self.grid.is_obstacle(*cell):
                ok = False
                break
        self.cache[key] = ok
        self.cache[(dst, src)] = ok
        return ok


def predict_coverage(
    path: CoveragePath,
    grid: GridMap,
    sensing_range: float,
    formation_halfwidth: float = math.inf,
) -> CoverageEstimate:
    """Predict the coverage fraction a formation following the route attains.

    Direct cells are free cells inside the formation corridor (local width
    from the waypoint block-size annotations, never wider than
    formation_halfwidth) plus every cell the route polyline passes through.
    Indirect cells are the remaining free cells within sensing_range of the
    route with unobstructed line of sight; obstacle cells seen the same way
    enter both sides of the coverage ratio.
    """
    if sensing_range < 0.0 or formation_halfwidth < 0.0:
        raise ValueError("ranges must be non-negative")
    if len(path.waypoints) < 2:
        raise ValueError("path needs at least 2 waypoints")

    seg_a, seg_b, half = _segment_arrays(path, grid.cell_size, formation_halfwidth)

    cells = [(i, j) for i in range(grid.width_cells) for j in range(grid.height_cells)]
    centers = np.asarray([grid.cell_center(i, j) for i, j in cells])
    dmat = _point_segment_distances(centers, seg_a, seg_b)
    nearest_seg = np.argmin(dmat, axis=1)
    nearest_dist = dmat[np.arange(len(cells)), nearest_seg]
    within_corridor = (dmat <= half[None, :]).any(axis=1)

    traversed: set[tuple[int, int]] = set()
    for a, b in path.segments:
        for cell in supercover_cells(a, b, grid.origin, grid.cell_size):
            if grid.in_bounds(*cell):
                traversed.add(cell)

    direct: set[tuple[int, int]] = set()
    for idx, cell in enumerate(cells):
        if grid.is_free(*cell) and (within_corridor[idx] or cell in traversed):
            direct.add(cell)

    los = _LosCache(grid)
    indirect: set[tuple[int, int]] = set()
    observed_obs: set[tuple[int, int]] = set()
    for idx, cell in enumerate(cells):
        if nearest_dist[idx] > sensing_range:
            continue
        if cell in direct:
            continue
        # look from the nearest point of the route toward the cell
        k = int(nearest_seg[idx])
        src = _nearest_point_on_segment(centers[idx], seg_a[k], seg_b[k])
        src_cell = grid.cell_of_point((float(src[0]), float(src[1])))
        if not grid.in_bounds(*src_cell):
            continue
        if not los.visible(src_cell, cell):
            continue
        if grid.is_free(*cell):
            indirect.add(cell)
        else:
            observed_obs.add(cell)

    free_total = grid.free_count
    denom = free_total + len(observed_obs)
    covered = len(direct) + len(indirect) + len(observed_obs)
    cp = covered / denom if denom > 0 else 0.0
    return CoverageEstimate(cp, direct, indirect, observed_obs)


def _nearest_point_on_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    denom = float((d * d).sum())
    if denom == 0.0:
        return a
    t = float(((p - a) * d).sum() / denom)
    t = min(1.0, max(0.0, t))
    return a + t * d
