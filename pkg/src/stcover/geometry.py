"""Small 2D geometry helpers shared across the planner and simulator."""

from __future__ import annotations

import math

Point = tuple[float, float]

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def norm_angle(a: float) -> float:
    """Normalize an angle to [0, 2*pi)."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return a


def dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def seg_length(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from point p to segment ab."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def segments_properly_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True if segments ab and cd cross at a point interior to both."""

    def orient(p: Point, q: Point, r: Point) -> float:
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return (o1 * o2 < 0.0) and (o3 * o4 < 0.0)


def line_intersection(p1: Point, p2: Point, q1: Point, q2: Point) -> Point | None:
    """Intersection of the infinite lines p1p2 and q1q2, or None if parallel."""
    x1, y1 = p1
    x2, y2 = p2
    x3, y3 = q1
    x4, y4 = q2
    denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    if abs(denom) < 1e-15:
        return None
    det_a = x1 * y2 - y1 * x2
    det_b = x3 * y4 - y3 * x4
    x = (det_a * (x3 - x4) - (x1 - x2) * det_b) / denom
    y = (det_a * (y3 - y4) - (y1 - y2) * det_b) / denom
    return (x, y)


def point_in_polygon(p: Point, vertices: list[Point]) -> bool:
    """Even-odd point-in-polygon test (half-open edge rule)."""
    x, y = p
    inside = False
    n = len(vertices)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_cross > x:
                inside = not inside
    return inside


def polygon_is_simple(vertices: list[Point]) -> bool:
    """True if no two non-adjacent edges properly intersect and no edge is degenerate."""
    n = len(vertices)
    edges = [(vertices[k], vertices[(k + 1) % n]) for k in range(n)]
    for k, (a, b) in enumerate(edges):
        if a == b:
            return False
        for m in range(k + 1, n):
            if m == k or (m + 1) % n == k or (k + 1) % n == m:
                continue
            c, d = edges[m]
            if segments_properly_intersect(a, b, c, d):
                return False
    return True


def polygon_signed_area(vertices: list[Point]) -> float:
    """Shoelace signed area; positive for counterclockwise vertex order."""
    area = 0.0
    n = len(vertices)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        area += x1 * y2 - x2 * y1
    return 0.5 * area


def ray_segment_distance(origin: Point, direction: Point, a: Point, b: Point) -> float | None:
    """Distance along a unit-direction ray from origin to segment ab, or None if missed."""
    ox, oy = origin
    dx, dy = direction
    ex, ey = b[0] - a[0], b[1] - a[1]
    denom = dx * ey - dy * ex
    if abs(denom) < 1e-15:
        return None
    t = ((a[0] - ox) * ey - (a[1] - oy) * ex) / denom
    if t < 0.0:
        return None
    u = ((a[0] - ox) * dy - (a[1] - oy) * dx) / denom
    if u < 0.0 or u > 1.0:
        return None
    return t


def ray_circle_distance(origin: Point, direction: Point, center: Point, radius: float) -> float | None:
    """Distance along a unit-direction ray from origin to a circle, or None if missed."""
    fx = origin[0] - center[0]
    fy = origin[1] - center[1]
    b = 2.0 * (fx * direction[0] + fy * direction[1])
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - 4.0 * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t1 = (-b - sq) / 2.0
    if t1 >= 0.0:
        return t1
    t2 = (-b + sq) / 2.0
    if t2 >= 0.0:
        return t2
    return None


def supercover_cells(
    a: Point, b: Point, origin: Point, cell_size: float
) -> list[tuple[int, int]]:
    """Grid cells traversed by segment ab (Amanatides-Woo walk, touching cells included)."""
    ax = (a[0] - origin[0]) / cell_size
    ay = (a[1] - origin[1]) / cell_size
    bx = (b[0] - origin[0]) / cell_size
    by = (b[1] - origin[1]) / cell_size
    i, j = int(math.floor(ax)), int(math.floor(ay))
    i_end, j_end = int(math.floor(bx)), int(math.floor(by))
    cells = [(i, j)]
    dx = bx - ax
    dy = by - ay
    step_i = 1 if dx > 0 else -1
    step_j = 1 if dy > 0 else -1
    t_max_x = math.inf if dx == 0 else ((i + (step_i > 0)) - ax) / dx
    t_max_y = math.inf if dy == 0 else ((j + (step_j > 0)) - ay) / dy
    t_dx = math.inf if dx == 0 else abs(1.0 / dx)
    t_dy = math.inf if dy == 0 else abs(1.0 / dy)
    guard = 0
    while (i, j) != (i_end, j_end):
        guard += 1
        if guard > 4 * (abs(i_end - i) + abs(j_end - j) + 4):
            break
        if t_max_x < t_max_y:
            i += step_i
            t_max_x += t_dx
        else:
            j += step_j
            t_max_y += t_dy
        cells.append((i, j))
    return cells
