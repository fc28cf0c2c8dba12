#!/usr/bin/env python3
# scripts/solvers/instances.py
"""
Instance lists Sub_H(X): brute-force oracle, adjacency-driven enumeration and
extension counting.

A row assigns a block index to every vertex of H, columns in increasing
pattern-vertex order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import networkx as nx
import numpy as np

from graphs.pattern_graph import Subgraph, iter_bits
from utils.errors import CapacityExceeded, DomainRejection
from utils.settings import get_limit

logger = logging.getLogger("instance-solver")

BRUTE_FORCE_CHUNK = 1 << 20


def lexsort_rows(rows):
    """Row order, lexicographic with column 0 most significant."""
    if rows.shape[1] == 0:
        return np.arange(len(rows))
    return np.lexsort(rows.T[::-1])


@dataclass(frozen=True, eq=False)
class InstanceList:
    subgraph: Subgraph
    vertices: Tuple[int, ...]
    rows: np.ndarray
    sorted_on: Optional[Tuple[int, ...]] = None

    def __len__(self):
        return len(self.rows)

    def column(self, vertex):
        return self.vertices.index(vertex)

    def project(self, vertices):
        return self.rows[:, [self.column(v) for v in vertices]]

    def sort_on(self, vertices):
        """Copy sorted lexicographically on the projection onto `vertices` (then the rest)."""
        vertices = tuple(vertices)
        rest = [v for v in self.vertices if v not in vertices]
        order = lexsort_rows(self.project(list(vertices) + rest))
        return InstanceList(self.subgraph, self.vertices, self.rows[order], vertices)

    def row_set(self):
        return set(map(tuple, self.rows.tolist()))

    def canonical(self):
        """Same rows with columns in increasing vertex order, sorted."""
        ordered = tuple(sorted(self.vertices))
        rows = self.project(ordered)
        return InstanceList(self.subgraph, ordered, rows[lexsort_rows(rows)], ordered)


def empty_instance_list(subgraph):
    vertices = tuple(subgraph.vertex_list())
    return InstanceList(subgraph, vertices, np.zeros((0, len(vertices)), dtype=np.int64))


def _check_pattern(host, subgraph):
    if subgraph.graph != host.pattern:
        raise DomainRejection("subgraph does not belong to the host graph's pattern")


def _edge_filter(host, subgraph, vertices, columns):
    """Boolean mask of candidate columns realizing every edge of subgraph."""
    keep = np.ones(len(columns[0]) if columns else 0, dtype=bool)
    position = {v: i for i, v in enumerate(vertices)}
    for e in iter_bits(subgraph.edges):
        block = host.edge_block(e)
        keep &= block.has_edges(columns[position[block.u]], columns[position[block.v]])
    return keep


def brute_force(host, subgraph: Subgraph, cap=None, max_workers=1) -> InstanceList:
    """
    Exhaustive Sub_H(X) over Π m_u candidate tuples.

    Args:
        host: ColoredHostGraph
        subgraph: H ⊆ G
        cap: largest candidate space allowed (default from settings)
        max_workers: threads sharing the candidate chunks

    Returns:
        InstanceList in canonical order
    """
    _check_pattern(host, subgraph)
    cap = cap or get_limit("brute_force_cap")
    vertices = tuple(subgraph.vertex_list())
    shape = tuple(host.block_sizes[v] for v in vertices)
    total = int(np.prod(shape, dtype=object)) if shape else 1
    if total > cap:
        raise CapacityExceeded(f"brute force over {total} candidate tuples exceeds the cap {cap}", limit=cap)
    if not vertices:
        return InstanceList(subgraph, vertices, np.zeros((1, 0), dtype=np.int64), vertices)

    def scan(start):
        codes = np.arange(start, min(start + BRUTE_FORCE_CHUNK, total), dtype=np.int64)
        columns = [c.astype(np.int64) for c in np.unravel_index(codes, shape)]
        keep = _edge_filter(host, subgraph, vertices, columns)
        return np.stack([c[keep] for c in columns], axis=1)

    starts = range(0, total, BRUTE_FORCE_CHUNK)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(scan, starts))
    else:
        chunks = [scan(s) for s in starts]

    # row-major unravel keeps chunk order lexicographic
    rows = np.concatenate(chunks, axis=0)
    logger.debug(f"brute force {subgraph!r}: {total} candidates, {len(rows)} instances")
    return InstanceList(subgraph, vertices, rows, vertices)


def _has_pattern_edge(subgraph, a, b):
    index = subgraph.graph.edge_index(a, b)
    return index is not None and bool(subgraph.edges >> index & 1)


def _placement_order(subgraph, fixed_vertices):
    """Fixed vertices first, then repeatedly the smallest vertex adjacent to the placed set."""
    placed = list(fixed_vertices)
    remaining = [v for v in subgraph.vertex_list() if v not in fixed_vertices]
    while remaining:
        attached = [v for v in remaining if any(_has_pattern_edge(subgraph, v, p) for p in placed)]
        choice = attached[0] if attached else remaining[0]
        placed.append(choice)
        remaining.remove(choice)
    return placed


def enumerate_instances(host, subgraph: Subgraph, fixed: Optional[Dict[int, int]] = None,
                        row_cap=None) -> InstanceList:
    """
    Every H-instance of X agreeing with the partial assignment `fixed`.

    Vertices are placed one at a time; each new vertex expands along the
    stored neighbours of one placed neighbour and is filtered against the
    others, so the work tracks the partial instance counts.

    Raises:
        CapacityExceeded when an intermediate list outgrows row_cap
    """
    _check_pattern(host, subgraph)
    row_cap = row_cap or get_limit("join_row_cap")
    fixed = dict(fixed or {})
    for vertex, index in fixed.items():
        if not subgraph.vertices >> vertex & 1:
            raise DomainRejection(f"fixed vertex {vertex} is not in {subgraph!r}")
        if not 0 <= index < host.block_sizes[vertex]:
            raise DomainRejection(f"fixed index {index} outside the block of vertex {vertex}")

    graph = subgraph.graph
    placed = sorted(fixed)
    rows = np.array([[fixed[v] for v in placed]], dtype=np.int64).reshape(1, len(placed))
    fixed_mask = sum(1 << v for v in placed)
    among_fixed = Subgraph(graph, fixed_mask, graph.induced_edge_mask(fixed_mask) & subgraph.edges)
    if not realizes(host, among_fixed, fixed):
        rows = rows[:0]

    for vertex in _placement_order(subgraph, placed)[len(placed):]:
        neighbours = [p for p in placed if _has_pattern_edge(subgraph, p, vertex)]
        if neighbours:
            anchor = neighbours[0]
            block = host.block_between(anchor, vertex)
            owner, partner = block.expand(anchor, rows[:, placed.index(anchor)])
            rows = np.column_stack([rows[owner], partner])
            for other in neighbours[1:]:
                check = host.block_between(other, vertex)
                mine = rows[:, placed.index(other)]
                keep = check.has_edges(mine, rows[:, -1]) if check.u == other else check.has_edges(rows[:, -1], mine)
                rows = rows[keep]
        else:
            size = host.block_sizes[vertex]
            rows = np.column_stack([np.repeat(rows, size, axis=0),
                                    np.tile(np.arange(size, dtype=np.int64), len(rows))])
        placed.append(vertex)
        if len(rows) > row_cap:
            raise CapacityExceeded(f"{len(rows)} partial instances exceed the row cap {row_cap}", limit=row_cap)

    return InstanceList(subgraph, tuple(placed), rows.reshape(len(rows), len(placed))).canonical()


def count_instances(host, subgraph: Subgraph, row_cap=None):
    """|Sub_H(X)|, as the product of the counts of H's connected components."""
    _check_pattern(host, subgraph)
    component_graph = nx.Graph()
    component_graph.add_nodes_from(subgraph.vertex_list())
    component_graph.add_edges_from(subgraph.edge_pairs())

    total = 1
    for component in nx.connected_components(component_graph):
        if len(component) == 1:
            (vertex,) = component
            total *= host.block_sizes[vertex]
            continue
        mask = sum(1 << v for v in component)
        part = Subgraph(subgraph.graph, mask, subgraph.graph.induced_edge_mask(mask) & subgraph.edges)
        total *= len(enumerate_instances(host, part, row_cap=row_cap))
        if total == 0:
            break
    return total


def realizes(host, subgraph: Subgraph, assignment: Dict[int, int]):
    """Whether an assignment of V(H) is an H-instance of X."""
    for u, v in subgraph.edge_pairs():
        block = host.block_between(u, v)
        if not block.has_edge(assignment[block.u], assignment[block.v]):
            return False
    return True


def count_extensions(host, a_instance, lower: Subgraph, upper: Subgraph, row_cap=None):
    """
    Number of U-instances of X containing the given A-instance.

    Args:
        a_instance: dict vertex → block index, or a sequence aligned with
            lower.vertex_list()
        lower: A
        upper: U with A ⊆ U
    """
    if not lower.issubset(upper):
        raise DomainRejection(f"{lower!r} is not contained in {upper!r}")
    if not isinstance(a_instance, dict):
        a_instance = dict(zip(lower.vertex_list(), (int(x) for x in a_instance)))
    if set(a_instance) != set(lower.vertex_list()):
        raise DomainRejection("instance does not assign exactly the vertices of A")
    if not realizes(host, lower, a_instance):
        return 0
    return len(enumerate_instances(host, upper, fixed=a_instance, row_cap=row_cap))
