"""Polygon obstacle rasterization onto a tessellated grid.

Obstacle geometry arrives as simple polygons. A horizontal scanline is swept
through every cell-row center: a cell is marked Obstacle when the polygon
boundary crosses the open horizontal span through the cell center, or when
the cell center lies strictly inside a polygon. Everything else is Free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import Point, point_in_polygon, polygon_is_simple


class InvalidPolygonError(ValueError):
    """Raised when an obstacle polygon fails validation."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"obstacle polygon {index}: {reason}")


class Direction(Enum):
    """Cell/block connection direction labels.

    The labels follow the planner's connection convention in which a step of
    [i - i', j - j'] = [-1, 0] is called LEFT even though the neighbor sits at
    a larger x. Graph construction uses geometric adjacency instead (a block in
    the LEFT list of b touches b's left edge); see blocks.build_block_graph.
    """

    TOP = "TOP"
    LEFT = "LEFT"
    BOTTOM = "BOTTOM"
    RIGHT = "RIGHT"

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITE[self]


_OPPOSITE = {
    Direction.TOP: Direction.BOTTOM,
    Direction.BOTTOM: Direction.TOP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}

# Deterministic tie-break rank used by the spanning tree construction.
DIRECTION_RANK = {
    Direction.TOP: 0,
    Direction.LEFT: 1,
    Direction.BOTTOM: 2,
    Direction.RIGHT: 3,
}


@dataclass(frozen=True)
class PolygonObstacle:
    """A simple polygon, implicitly closed, vertices in meters."""

    vertices: tuple[Point, ...]

    @staticmethod
    def from_points(points, index: int = -1) -> "PolygonObstacle":
        verts = tuple((float(x), float(y)) for x, y in points)
        if len(verts) < 3:
            raise InvalidPolygonError(index, f"needs >= 3 vertices, got {len(verts)}")
        for k in range(len(verts)):
            if verts[k] == verts[(k + 1) % len(verts)]:
                raise InvalidPolygonError(index, f"repeated consecutive vertex at {k}")
        if not polygon_is_simple(list(verts)):
            raise InvalidPolygonError(index, "self-intersecting")
        return PolygonObstacle(verts)

    def edges(self):
        n = len(self.vertices)
        for k in range(n):
            yield self.vertices[k], self.vertices[(k + 1) % n]


@dataclass
class GridMap:
    """Tessellated environment with per-cell Free/Obstacle classification."""

    width_cells: int
    height_cells: int
    cell_size: float
    origin: Point
    obstacle: np.ndarray = field(repr=False)  # bool, shape (width, height)

    def __post_init__(self):
        assert self.obstacle.shape == (self.width_cells, self.height_cells)

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.width_cells and 0 <= j < self.height_cells

    def is_obstacle(self, i: int, j: int) -> bool:
        return bool(self.obstacle[i, j])

    def is_free(self, i: int, j: int) -> bool:
        return not bool(self.obstacle[i, j])

    def cell_center(self, i: int, j: int) -> Point:
        return (
            self.origin[0] + (i + 0.5) * self.cell_size,
            self.origin[1] + (j + 0.5) * self.cell_size,
        )

    def cell_of_point(self, p: Point) -> tuple[int, int]:
        return (
            int(math.floor((p[0] - self.origin[0]) / self.cell_size)),
            int(math.floor((p[1] - self.origin[1]) / self.cell_size)),
        )

    @property
    def free_count(self) -> int:
        return int(self.width_cells * self.height_cells - self.obstacle.sum())

    @property
    def obstacle_count(self) -> int:
        return int(self.obstacle.sum())

    def free_cells(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(~self.obstacle)
        return sorted(zip(ii.tolist(), jj.tolist()))

    def obstacle_cells(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(self.obstacle)
        return sorted(zip(ii.tolist(), jj.tolist()))


def rasterize(
    obstacles: list[PolygonObstacle],
    bounds: tuple[float, float],
    cell_size: float,
    origin: Point = (0.0, 0.0),
) -> GridMap:
    """Classify grid cells as Free or Obstacle from polygon geometry.

    Args:
        obstacles: validated simple polygons.
        bounds: (width, height) of the map in meters, measured from origin.
        cell_size: square cell side in meters.
        origin: world position of the grid's bottom-left corner.

    Returns:
        GridMap covering at least the bounds. When the bounds are not an
        exact multiple of cell_size the grid is extended up/right and the
        overhang cells are classified Obstacle so they are never planned into.
    """
    if cell_size <= 0.0:
        raise ValueError(f"cell_size must be positive, got {cell_size}")
    w_m, h_m = bounds
    if w_m <= 0.0 or h_m <= 0.0:
        raise ValueError(f"bounds must be non-degenerate, got {bounds}")

    width = int(math.ceil(w_m / cell_size - 1e-9))
    height = int(math.ceil(h_m / cell_size - 1e-9))
    occ = np.zeros((width, height), dtype=bool)

    for j in range(height):
        y = origin[1] + (j + 0.5) * cell_size
        crossings: list[float] = []          # proper even-odd crossings
        touch_xs: list[float] = []           # any boundary point on this scanline
        touch_spans: list[tuple[float, float]] = []  # collinear horizontal edges
        for poly in obstacles:
            for (x1, y1), (x2, y2) in poly.edges():
                if y1 == y2:
                    if y1 == y:
                        touch_spans.append((min(x1, x2), max(x1, x2)))
                    continue
                if (y1 > y) != (y2 > y):
                    crossings.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
                elif min(y1, y2) <= y <= max(y1, y2):
                    # vertex touch without a sign change
                    touch_xs.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))

        # Boundary rule: mark cells whose open span strictly contains a
        # boundary point on this scanline.
        for x in crossings + touch_xs:
            fi = (x - origin[0]) / cell_size
            i = int(math.floor(fi))
            if 0 <= i < width and origin[0] + i * cell_size < x < origin[0] + (i + 1) * cell_size:
                occ[i, j] = True
        for x_lo, x_hi in touch_spans:
            i_lo = int(math.floor((x_lo - origin[0]) / cell_size))
            i_hi = int(math.ceil((x_hi - origin[0]) / cell_size))
            for i in range(max(i_lo, 0), min(i_hi, width)):
                span_lo = origin[0] + i * cell_size
                span_hi = span_lo + cell_size
                if x_lo < span_hi and x_hi > span_lo:
                    occ[i, j] = True

        # Interior rule: centers strictly inside by even-odd parity.
        crossings.sort()
        if crossings:
            for i in range(width):
                xc = origin[0] + (i + 0.5) * cell_size
                parity = sum(1 for x in crossings if x > xc)
                if parity % 2 == 1:
                    occ[i, j] = True

    # Overhang cells (beyond the requested bounds) are never traversable.
    x_max = origin[0] + w_m
    y_max = origin[1] + h_m
    for i in range(width):
        if origin[0] + (i + 1) * cell_size > x_max + 1e-9:
            occ[i, :] = True
    for j in range(height):
        if origin[1] + (j + 1) * cell_size > y_max + 1e-9:
            occ[:, j] = True

    return GridMap(width, height, cell_size, origin, occ)


def validate_obstacles(polygons: list[list[Point]]) -> list[PolygonObstacle]:
    """Validate raw vertex lists, reporting the offending polygon index."""
    return [PolygonObstacle.from_points(pts, index=k) for k, pts in enumerate(polygons)]


def cell_direction(c: tuple[int, int], c_prime: tuple[int, int]) -> Direction:
    """Connection direction label from cell c to 4-adjacent cell c_prime.

    Implements the planner's label table verbatim: [-1,0] -> LEFT,
    [1,0] -> RIGHT, [0,-1] -> BOTTOM, [0,1] -> TOP, where the difference is
    [i - i', j - j']. The labels are mirrored relative to geometric adjacency;
    downstream code uses geometric directions and documents the distinction.
    """
    di = c[0] - c_prime[0]
    dj = c[1] - c_prime[1]
    if (di, dj) == (-1, 0):
        return Direction.LEFT
    if (di, dj) == (1, 0):
        return Direction.RIGHT
    if (di, dj) == (0, -1):
        return Direction.BOTTOM
    if (di, dj) == (0, 1):
        return Direction.TOP
    raise ValueError(f"cells {c} and {c_prime} are not 4-adjacent")


def point_in_any_polygon(p: Point, obstacles: list[PolygonObstacle]) -> bool:
    return any(point_in_polygon(p, list(poly.vertices)) for poly in obstacles)
