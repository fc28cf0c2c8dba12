#!/usr/bin/env python3
# scripts/graphs/constructions.py
"""
Named pattern graphs: cliques, paths, cycles, Hamming graphs K_q^d and
q-blowups G↑q.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

from graphs.pattern_graph import PatternGraph, Subgraph, build_pattern, iter_bits
from utils.errors import DomainRejection
from utils.settings import get_limit

logger = logging.getLogger("graph-core")


def complete_graph(k, vertex_cap=None):
    return build_pattern(k, [(u, v) for u in range(k) for v in range(u + 1, k)], vertex_cap=vertex_cap)


def path_graph(k, vertex_cap=None):
    """Path on k vertices 0-1-...-(k-1)."""
    return build_pattern(k, [(u, u + 1) for u in range(k - 1)], vertex_cap=vertex_cap)


def cycle_graph(k, vertex_cap=None):
    if k < 3:
        raise DomainRejection(f"cycle needs at least 3 vertices, got {k}")
    return build_pattern(k, [(u, u + 1) for u in range(k - 1)] + [(0, k - 1)], vertex_cap=vertex_cap)


def hamming_vertex(coordinates, q):
    """Index of a coordinate tuple: Σ x_i q^i (coordinate 0 least significant)."""
    index = 0
    for i, x in enumerate(coordinates):
        index += x * q ** i
    return index


def hamming_coordinates(index, q, d):
    coordinates = []
    for _ in range(d):
        coordinates.append(index % q)
        index //= q
    return tuple(coordinates)


def hamming_edge_list(q, d):
    """Sorted edge pairs of K_q^d without building a PatternGraph."""
    edges = []
    for v in range(q ** d):
        for i in range(d):
            place = q ** i
            digit = (v // place) % q
            for y in range(digit + 1, q):
                edges.append((v, v + (y - digit) * place))
    edges.sort()
    return edges


def hamming(q, d, vertex_cap=None):
    """
    Hamming graph K_q^d: vertices [q]^d, adjacent when they differ in exactly
    one coordinate. hamming(2, d) is the hypercube Q_d with vertex u ↔ Σ u_i 2^i.
    """
    if q < 2 or d < 1:
        raise DomainRejection(f"hamming graph needs q >= 2 and d >= 1, got q={q}, d={d}")
    vertex_cap = vertex_cap or get_limit("vertex_cap")
    if q ** d > vertex_cap:
        raise DomainRejection(f"K_{q}^{d} has {q ** d} vertices, above the vertex cap {vertex_cap}")
    return build_pattern(q ** d, hamming_edge_list(q, d), vertex_cap=vertex_cap)


def hypercube(d, vertex_cap=None):
    return hamming(2, d, vertex_cap=vertex_cap)


@dataclass(frozen=True)
class BlowupMap:
    """
    G↑q together with the bijection result vertex ↔ (source vertex u, copy i).

    Result vertex u*q + i is copy i of u.
    """
    source: PatternGraph
    q: int
    result: PatternGraph
    vertex_index: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        clique_masks = [0] * self.source.vertex_count
        cross_masks = [0] * self.source.edge_count
        for k, (a, b) in enumerate(self.result.edges):
            u, _ = self.vertex_index[a]
            v, _ = self.vertex_index[b]
            if u == v:
                clique_masks[u] |= 1 << k
            else:
                cross_masks[self.source.edge_index(u, v)] |= 1 << k
        object.__setattr__(self, "_clique_masks", tuple(clique_masks))
        object.__setattr__(self, "_cross_masks", tuple(cross_masks))

    def copies(self, u):
        return list(range(u * self.q, (u + 1) * self.q))

    def lift_vertex_mask(self, vertex_mask):
        block = (1 << self.q) - 1
        lifted = 0
        for u in iter_bits(vertex_mask):
            lifted |= block << (u * self.q)
        return lifted

    def lift(self, subgraph: Subgraph) -> Subgraph:
        """H↑q: every copy of V(H), the cliques on them, and u_i v_j for uv ∈ E(H)."""
        if subgraph.graph != self.source:
            raise DomainRejection("subgraph does not belong to the blowup source graph")
        edges = 0
        for u in iter_bits(subgraph.vertices):
            edges |= self._clique_masks[u]
        for e in iter_bits(subgraph.edges):
            edges |= self._cross_masks[e]
        return Subgraph(self.result, self.lift_vertex_mask(subgraph.vertices), edges)

    def clique_edge_mask(self, u):
        return self._clique_masks[u]

    def cross_edge_mask(self, edge_index):
        return self._cross_masks[edge_index]


def blowup(graph, q, vertex_cap=None):
    """Replace each vertex by a q-clique and fully join copies of adjacent vertices."""
    if q < 1:
        raise DomainRejection(f"blowup factor must be >= 1, got {q}")
    vertex_cap = vertex_cap or get_limit("vertex_cap")
    size = graph.vertex_count * q
    if size > vertex_cap:
        raise DomainRejection(f"blowup has {size} vertices, above the vertex cap {vertex_cap}")

    vertex_index = tuple((a // q, a % q) for a in range(size))
    edges = []
    for a in range(size):
        u = a // q
        for b in range(a + 1, size):
            v = b // q
            if u == v or graph.has_edge(u, v):
                edges.append((a, b))
    result = build_pattern(size, edges, vertex_cap=vertex_cap)
    return BlowupMap(graph, q, result, vertex_index)
