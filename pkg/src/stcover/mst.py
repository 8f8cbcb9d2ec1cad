"""Minimum spanning tree over the block graph (Prim's algorithm)."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .grid import DIRECTION_RANK, Direction
from .blocks import BlockGraph


@dataclass
class SpanningTree:
    """MST of the block-graph component containing the root."""

    root: int
    edges: list[tuple[int, int, Direction, float]]
    total_weight: float
    # tree adjacency by geometric side, same sorting as the block graph
    neighbors: dict[int, dict[Direction, list[int]]] = field(repr=False)

    @property
    def node_ids(self) -> list[int]:
        ids = {self.root}
        for a, b, _, _ in self.edges:
            ids.add(a)
            ids.add(b)
        return sorted(ids)


def prim_mst(graph: BlockGraph, root: int) -> tuple[SpanningTree, list[int]]:
    """Grow an MST from root, returning it plus any unreachable block ids.

    Ties between candidate edges break on (weight, smaller endpoint id,
    larger endpoint id, direction rank TOP < LEFT < BOTTOM < RIGHT) so that
    identical graphs always produce identical trees.
    """
    ids = {b.id for b in graph.blocks}
    if root not in ids:
        raise KeyError(f"root block {root} not in graph")

    # adjacency: node -> list of (other, direction(from node), weight)
    adj: dict[int, list[tuple[int, Direction, float]]] = {i: [] for i in ids}
    for a, b, d, w in graph.edges:
        adj[a].append((b, d, w))
        adj[b].append((a, d.opposite, w))

    in_tree = {root}
    tree_edges: list[tuple[int, int, Direction, float]] = []
    # heap entries: (weight, min id, max id, direction rank, from, to, direction);
    # the first four fields form the deterministic tie-break key
    heap: list = []

    def push_edges(u: int):
        for v, d, w in adj[u]:
            if v not in in_tree:
                heapq.heappush(heap, (w, min(u, v), max(u, v), DIRECTION_RANK[d], u, v, d))

    push_edges(root)
    while heap:
        w, _, _, _, u, v, d = heapq.heappop(heap)
        if v in in_tree:
            continue
        in_tree.add(v)
        tree_edges.append((u, v, d, w))
        push_edges(v)

    neighbors: dict[int, dict[Direction, list[int]]] = {
        i: {d: [] for d in Direction} for i in in_tree
    }
    for u, v, d, _ in tree_edges:
        neighbors[u][d].append(v)
        neighbors[v][d.opposite].append(u)
    for b_id, per_dir in neighbors.items():
        for d, lst in per_dir.items():
            axis = 0 if d in (Direction.TOP, Direction.BOTTOM) else 1
            lst.sort(key=lambda n: (graph.blocks[n].center[axis], n))

    total = sum(w for _, _, _, w in tree_edges)
    unreachable = sorted(ids - in_tree)
    return SpanningTree(root, tree_edges, total, neighbors), unreachable
