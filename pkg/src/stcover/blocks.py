"""Hierarchical decomposition of free space into square blocks.

Free cells are grouped into power-of-two sized square blocks by windowed
scans: the largest window size is tried first, then successive halvings down
to single cells. Windows are axis-aligned tiles (stride equals the window
size), scanned left to right and bottom to top, and a window becomes a block
only when every cell inside it is free and unassigned. The resulting blocks
therefore nest like a quadtree, which the path construction relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Point, dist
from .grid import Direction, GridMap

# Part (quadrant) labels of a block.
TL, TR, BL, BR = "TL", "TR", "BL", "BR"


@dataclass
class Block:
    """A square group of free cells acting as one node of the coverage graph."""

    id: int
    anchor: tuple[int, int]  # bottom-left cell index
    size_cells: int
    center: Point
    part_centers: dict[str, Point]

    @property
    def cells(self) -> list[tuple[int, int]]:
        i0, j0 = self.anchor
        s = self.size_cells
        return [(i, j) for j in range(j0, j0 + s) for i in range(i0, i0 + s)]


@dataclass
class BlockGraph:
    """Blocks plus direction-labeled adjacency.

    neighbors[b][d] lists ids of blocks touching block b's edge on side d
    (geometric convention: a block in the LEFT list touches b's left edge).
    TOP/BOTTOM lists are sorted by ascending x, LEFT/RIGHT by ascending y.
    """

    blocks: list[Block]
    edges: list[tuple[int, int, Direction, float]]
    neighbors: dict[int, dict[Direction, list[int]]] = field(repr=False)

    def block(self, block_id: int) -> Block:
        return self.blocks[block_id]

    def neighbor_ids(self, block_id: int) -> list[int]:
        seen: list[int] = []
        for d in Direction:
            for n in self.neighbors[block_id][d]:
                if n not in seen:
                    seen.append(n)
        return seen


def _make_block(block_id: int, anchor: tuple[int, int], size: int, grid: GridMap) -> Block:
    i0, j0 = anchor
    cs = grid.cell_size
    cx = grid.origin[0] + (i0 + size / 2.0) * cs
    cy = grid.origin[1] + (j0 + size / 2.0) * cs
    q = size * cs / 4.0
    parts = {
        TL: (cx - q, cy + q),
        TR: (cx + q, cy + q),
        BL: (cx - q, cy - q),
        BR: (cx + q, cy - q),
    }
    return Block(block_id, anchor, size, (cx, cy), parts)


def build_blocks(grid: GridMap, max_block_size: int) -> list[Block]:
    """Partition the free cells of a grid into square blocks.

    Args:
        grid: rasterized map.
        max_block_size: largest window side in cells; must be a power of two.

    Returns:
        Blocks in scan order (size descending, then bottom-to-top rows,
        left-to-right within a row). Every free cell lands in exactly one
        block; obstacle cells belong to none.
    """
    if max_block_size < 1 or (max_block_size & (max_block_size - 1)) != 0:
        raise ValueError(f"max_block_size must be a power of two >= 1, got {max_block_size}")

    assigned = [[False] * grid.height_cells for _ in range(grid.width_cells)]
    blocks: list[Block] = []

    size = max_block_size
    while size >= 1:
        for j0 in range(0, grid.height_cells - size + 1, size):
            for i0 in range(0, grid.width_cells - size + 1, size):
                ok = True
                for j in range(j0, j0 + size):
                    for i in range(i0, i0 + size):
                        if grid.is_obstacle(i, j) or assigned[i][j]:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                blocks.append(_make_block(len(blocks), (i0, j0), size, grid))
                for j in range(j0, j0 + size):
                    for i in range(i0, i0 + size):
                        assigned[i][j] = True
        size //= 2
    return blocks


def build_block_graph(blocks: list[Block], grid: GridMap) -> BlockGraph:
    """Connect blocks that share 4-adjacent cell pairs.

    Each adjacent pair of blocks yields one undirected edge weighted by the
    Euclidean distance between block centers. Per-block neighbor lists are
    keyed by the geometric side the neighbor touches and sorted along the
    shared edge (ascending).

    Raises:
        ValueError: when blocks overlap or leave free cells uncovered.
    """
    owner: dict[tuple[int, int], int] = {}
    for b in blocks:
        for cell in b.cells:
            if cell in owner:
                raise ValueError(
                    f"blocks {owner[cell]} and {b.id} both contain cell {cell}"
                )
            if not grid.is_free(*cell):
                raise ValueError(f"block {b.id} covers obstacle cell {cell}")
            owner[cell] = b.id
    if len(owner) != grid.free_count:
        raise ValueError(
            f"blocks cover {len(owner)} cells but the grid has {grid.free_count} free cells"
        )

    pair_dirs: dict[tuple[int, int], Direction] = {}
    for (i, j), b_id in owner.items():
        right = owner.get((i + 1, j))
        if right is not None and right != b_id:
            pair_dirs.setdefault((b_id, right), Direction.RIGHT)
        top = owner.get((i, j + 1))
        if top is not None and top != b_id:
            pair_dirs.setdefault((b_id, top), Direction.TOP)

    neighbors: dict[int, dict[Direction, list[int]]] = {
        b.id: {d: [] for d in Direction} for b in blocks
    }
    edges: list[tuple[int, int, Direction, float]] = []
    seen_pairs: set[tuple[int, int]] = set()
    for (a, b), d in sorted(pair_dirs.items()):
        key = (min(a, b), max(a, b))
        if key in seen_pairs:
            continue
        seen_pairs.add(key)
        w = dist(blocks[a].center, blocks[b].center)
        edges.append((a, b, d, w))
        neighbors[a][d].append(b)
        neighbors[b][d.opposite].append(a)

    for b_id, per_dir in neighbors.items():
        for d, ids in per_dir.items():
            axis = 0 if d in (Direction.TOP, Direction.BOTTOM) else 1
            ids.sort(key=lambda n: (blocks[n].center[axis], n))

    return BlockGraph(blocks, edges, neighbors)


def default_max_block_size(n_vehicles: int, spacing: float, cell_size: float) -> int:
    """Smallest power of two whose footprint fits the spread-out fleet."""
    need = max(1.0, n_vehicles * spacing / cell_size)
    size = 1
    while size < need:
        size *= 2
    return size
