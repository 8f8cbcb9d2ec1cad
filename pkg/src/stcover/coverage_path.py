"""Closed coverage circuit that circumnavigates the spanning tree.

Every block is split into four quadrants whose centers are the route's
waypoints. For each block side the construction depends on how many tree
neighbors touch that side:

  1. none: the two part centers on that side are joined directly;
  2. one:  the facing part-center pairs of the two blocks are joined, once
     per tree edge, and only when the neighbor also sees a single tree
     neighbor back (otherwise its multi-neighbor side owns the connection);
  3. two or more: the neighbors are walked along the shared edge and a joint
     point is inserted between each consecutive pair, keeping the circuit in
     one piece even when obstacle cells separate the neighbors.

The emitted segments always leave every waypoint with degree two; they are
then stitched into a single counterclockwise loop.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .geometry import Point, dist, line_intersection, polygon_signed_area
from .grid import Direction
from .blocks import BL, BR, TL, TR, Block
from .mst import SpanningTree

log = logging.getLogger(__name__)


class PathConstructionError(RuntimeError):
    """Raised when the emitted segments do not close into a single loop."""


@dataclass
class CoveragePath:
    """Ordered waypoint loop; each waypoint carries its block size in cells."""

    waypoints: list[Point]
    block_sizes: list[int]
    closed: bool

    @property
    def segments(self) -> list[tuple[Point, Point]]:
        pts = self.waypoints
        segs = [(pts[k], pts[k + 1]) for k in range(len(pts) - 1)]
        if self.closed and len(pts) > 1:
            segs.append((pts[-1], pts[0]))
        return segs

    @property
    def length(self) -> float:
        return sum(dist(a, b) for a, b in self.segments)


# For each side: (first part of b, last part of b, facing first, facing last).
# "First" is the end of the side the walk starts from: top for LEFT/RIGHT,
# left for TOP/BOTTOM; neighbors are paired monotonically from that end.
_SIDE_PARTS = {
    Direction.LEFT: (TL, BL, TR, BR),
    Direction.RIGHT: (TR, BR, TL, BL),
    Direction.TOP: (TL, TR, BL, BR),
    Direction.BOTTOM: (BL, BR, TL, TR),
}


def joint_point(
    block: Block, neighbor_center_a: Point, neighbor_center_b: Point, side: Direction
) -> Point:
    """Joint waypoint between two same-side neighbors of a block.

    Intersects the line through the midpoint of the two neighbor centers and
    the block center with the axis-parallel line through the block's
    near-side part centers (one quarter side in from the edge).
    """
    first, last, _, _ = _SIDE_PARTS[side]
    p_first = block.part_centers[first]
    p_last = block.part_centers[last]
    middle = (
        (neighbor_center_a[0] + neighbor_center_b[0]) / 2.0,
        (neighbor_center_a[1] + neighbor_center_b[1]) / 2.0,
    )
    pt = None
    if dist(middle, block.center) > 1e-12:
        pt = line_intersection(middle, block.center, p_first, p_last)
    if pt is None:
        log.warning(
            "degenerate joint geometry at block %d side %s; using near-side midpoint",
            block.id,
            side.value,
        )
        pt = ((p_first[0] + p_last[0]) / 2.0, (p_first[1] + p_last[1]) / 2.0)
    return pt


def _ordered_side_neighbors(block: Block, side: Direction, tree: SpanningTree, blocks) -> list[int]:
    """Tree neighbors on one side, ordered from the side's first end."""
    ids = list(tree.neighbors[block.id][side])
    if side in (Direction.LEFT, Direction.RIGHT):
        ids.sort(key=lambda n: (-blocks[n].center[1], n))  # top first
    else:
        ids.sort(key=lambda n: (blocks[n].center[0], n))  # left first
    return ids


def build_path(blocks: list[Block], tree: SpanningTree, start: Point) -> CoveragePath:
    """Construct the closed coverage loop around a spanning tree.

    Args:
        blocks: all blocks of the graph the tree was computed on; only the
            tree's component is routed.
        tree: spanning tree with per-side neighbor lists.
        start: route begins at the waypoint nearest this point.

    Raises:
        PathConstructionError: when the segments fail the degree-two check or
            form more than one loop (the broken-circuit failure mode of a
            uniform construction without joint points).
    """
    by_id = {b.id: b for b in blocks}
    for node in tree.node_ids:
        if node not in by_id:
            raise ValueError(f"tree references unknown block {node}")

    # Waypoints are identified by keys, never by float coordinates.
    positions: dict[tuple, Point] = {}
    sizes: dict[tuple, int] = {}
    segments: list[tuple[tuple, tuple]] = []
    handled_edges: set[tuple[int, int]] = set()

    def part_key(block_id: int, part: str) -> tuple:
        key = ("part", block_id, part)
        if key not in positions:
            positions[key] = by_id[block_id].part_centers[part]
            sizes[key] = by_id[block_id].size_cells
        return key

    def add(a: tuple, b: tuple):
        segments.append((a, b))

    for b_id in tree.node_ids:
        b = by_id[b_id]
        for side in (Direction.LEFT, Direction.RIGHT, Direction.TOP, Direction.BOTTOM):
            first, last, face_first, face_last = _SIDE_PARTS[side]
            nbrs = _ordered_side_neighbors(b, side, tree, by_id)
            if not nbrs:
                add(part_key(b_id, first), part_key(b_id, last))
            elif len(nbrs) == 1:
                other = nbrs[0]
                if len(tree.neighbors[other][side.opposite]) > 1:
                    continue  # the neighbor's multi-neighbor side owns this edge
                edge = (min(b_id, other), max(b_id, other))
                if edge in handled_edges:
                    continue
                handled_edges.add(edge)
                add(part_key(b_id, first), part_key(other, face_first))
                add(part_key(b_id, last), part_key(other, face_last))
            else:
                add(part_key(b_id, first), part_key(nbrs[0], face_first))
                for k in range(len(nbrs) - 1):
                    n_a, n_b = nbrs[k], nbrs[k + 1]
                    jp = joint_point(b, by_id[n_a].center, by_id[n_b].center, side)
                    j_key = ("joint", b_id, side.value, k)
                    positions[j_key] = jp
                    sizes[j_key] = min(by_id[n_a].size_cells, by_id[n_b].size_cells)
                    add(part_key(n_a, face_last), j_key)
                    add(j_key, part_key(n_b, face_first))
                add(part_key(b_id, last), part_key(nbrs[-1], face_last))
                for n in nbrs:
                    handled_edges.add((min(b_id, n), max(b_id, n)))

    _check_degrees(segments)
    loop_keys = _walk_single_loop(segments)

    pts = [positions[k] for k in loop_keys]
    if polygon_signed_area(pts) < 0.0:
        loop_keys.reverse()
        pts.reverse()

    # Start at the waypoint nearest the start point; ties break on the
    # canonical enumeration order of the keys.
    enum_rank = {k: r for r, k in enumerate(sorted(positions, key=_key_rank))}
    start_pos = min(
        range(len(loop_keys)),
        key=lambda idx: (dist(pts[idx], start), enum_rank[loop_keys[idx]]),
    )
    loop_keys = loop_keys[start_pos:] + loop_keys[:start_pos]
    pts = pts[start_pos:] + pts[:start_pos]

    for k in range(len(pts)):
        if dist(pts[k], pts[(k + 1) % len(pts)]) < 1e-12:
            raise PathConstructionError(f"coincident consecutive waypoints at index {k}")

    return CoveragePath(pts, [sizes[k] for k in loop_keys], closed=True)


def _key_rank(key: tuple) -> tuple:
    if key[0] == "part":
        return (0, key[1], (TL, TR, BL, BR).index(key[2]), 0)
    return (1, key[1], ("LEFT", "RIGHT", "TOP", "BOTTOM").index(key[2]), key[3])


def _check_degrees(segments):
    degree: dict[tuple, int] = {}
    for a, b in segments:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    bad = {k: d for k, d in degree.items() if d != 2}
    if bad:
        sample = sorted(bad.items(), key=lambda kv: str(kv[0]))[:6]
        raise PathConstructionError(
            f"{len(bad)} waypoints without degree 2 (loop cannot close): {sample}"
        )


def _walk_single_loop(segments) -> list[tuple]:
    adjacency: dict[tuple, list[tuple]] = {}
    for a, b in segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    start = min(adjacency, key=str)
    loop = [start]
    prev = None
    cur = start
    while True:
        nxt = [n for n in adjacency[cur] if n != prev]
        step = nxt[0] if nxt else adjacency[cur][0]
        if step == start:
            break
        loop.append(step)
        prev, cur = cur, step
        if len(loop) > len(segments) + 1:
            raise PathConstructionError("loop walk failed to terminate")
    if len(loop) != len(adjacency):
        raise PathConstructionError(
            f"segments form multiple disjoint loops ({len(loop)} of {len(adjacency)} waypoints reached)"
        )
    return loop


def quadtree_reference_segments(blocks: list[Block], tree: SpanningTree):
    """Reference construction without the multi-neighbor case (test support).

    Mirrors a uniform-quadtree router: a side with several tree neighbors is
    linked to its first neighbor only, which demonstrably leaves the circuit
    broken. Returns raw waypoint-key segments; run them through
    check_single_loop to observe the failure.
    """
    by_id = {b.id: b for b in blocks}
    segments: list[tuple[tuple, tuple]] = []
    handled: set[tuple[int, int]] = set()
    for b_id in tree.node_ids:
        b = by_id[b_id]
        for side in (Direction.LEFT, Direction.RIGHT, Direction.TOP, Direction.BOTTOM):
            first, last, face_first, face_last = _SIDE_PARTS[side]
            nbrs = _ordered_side_neighbors(b, side, tree, by_id)
            if not nbrs:
                segments.append((("part", b_id, first), ("part", b_id, last)))
            else:
                other = nbrs[0]
                edge = (min(b_id, other), max(b_id, other))
                if edge in handled:
                    continue
                handled.add(edge)
                segments.append((("part", b_id, first), ("part", other, face_first)))
                segments.append((("part", b_id, last), ("part", other, face_last)))
    return segments


def check_single_loop(segments) -> bool:
    """True when the key segments form one closed degree-two loop."""
    try:
        _check_degrees(segments)
        _walk_single_loop(segments)
        return True
    except PathConstructionError:
        return False
