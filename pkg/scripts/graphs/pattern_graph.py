#!/usr/bin/env python3
# scripts/graphs/pattern_graph.py
"""
Pattern graphs and the subgraph lattice.

A PatternGraph is the fixed colored pattern G with stable edge indices.
A Subgraph is a (vertex bitset, edge bitset) pair relative to its parent's
edge order; isolated vertices and the empty subgraph are representable.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from utils.errors import DomainRejection, GraphFormatError
from utils.settings import get_limit

logger = logging.getLogger("graph-core")


def popcount(mask):
    return bin(mask).count("1")


def iter_bits(mask):
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def iter_submasks(mask):
    """Yield every submask of mask in increasing numeric order, 0 first."""
    sub = 0
    while True:
        yield sub
        sub = (sub - mask) & mask
        if sub == 0:
            return


def mask_of(items):
    mask = 0
    for item in items:
        mask |= 1 << item
    return mask


@dataclass(frozen=True, eq=False)
class PatternGraph:
    """
    Simple undirected pattern graph.

    Edges are stored as (u, v) with u < v; edge i keeps its index for the
    graph's lifetime. Use build_pattern() to construct one from user input.
    """
    vertex_count: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        adjacency = [set() for _ in range(self.vertex_count)]
        lookup = {}
        edge_ends = []
        incident = [0] * self.vertex_count
        for index, (u, v) in enumerate(self.edges):
            adjacency[u].add(v)
            adjacency[v].add(u)
            lookup[(u, v)] = index
            edge_ends.append((1 << u) | (1 << v))
            incident[u] |= 1 << index
            incident[v] |= 1 << index

        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in adjacency))
        object.__setattr__(self, "degree", tuple(len(a) for a in adjacency))
        object.__setattr__(self, "_edge_lookup", lookup)
        object.__setattr__(self, "_edge_ends", tuple(edge_ends))
        object.__setattr__(self, "_incident", tuple(incident))
        object.__setattr__(self, "_hash", hash((self.vertex_count, self.edges)))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, PatternGraph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def __hash__(self):
        return self._hash

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def full_vertex_mask(self):
        return (1 << self.vertex_count) - 1

    @property
    def full_edge_mask(self):
        return (1 << len(self.edges)) - 1

    def edge_index(self, u, v) -> Optional[int]:
        if u > v:
            u, v = v, u
        return self._edge_lookup.get((u, v))

    def has_edge(self, u, v):
        return self.edge_index(u, v) is not None

    def edge_vertex_mask(self, index):
        return self._edge_ends[index]

    def incident_edge_mask(self, vertex):
        return self._incident[vertex]

    def endpoints_mask(self, edge_mask):
        """Vertex bitset covering every endpoint of the edges in edge_mask."""
        vertices = 0
        for index in iter_bits(edge_mask):
            vertices |= self._edge_ends[index]
        return vertices

    def induced_edge_mask(self, vertex_mask):
        """Edges of G with both endpoints inside vertex_mask."""
        edges = 0
        for index, ends in enumerate(self._edge_ends):
            if ends & vertex_mask == ends:
                edges |= 1 << index
        return edges

    def isolated_vertices(self):
        return [u for u in range(self.vertex_count) if self.degree[u] == 0]

    def to_networkx(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        for index, (u, v) in enumerate(self.edges):
            graph.add_edge(u, v, index=index)
        return graph


def build_pattern(vertex_count, edge_list, vertex_cap=None):
    """
    Build a PatternGraph, keeping edge indices in input order.

    Args:
        vertex_count: number of vertices (0..vertex_count-1)
        edge_list: iterable of vertex pairs
        vertex_cap: size limit (default from settings)

    Returns:
        PatternGraph
    """
    vertex_cap = vertex_cap or get_limit("vertex_cap")
    if vertex_count < 0:
        raise GraphFormatError(f"negative vertex count {vertex_count}")
    if vertex_count > vertex_cap:
        raise GraphFormatError(f"{vertex_count} vertices exceeds the vertex cap {vertex_cap}")

    seen = set()
    edges = []
    for pair in edge_list:
        u, v = (int(x) for x in pair)
        if u == v:
            raise GraphFormatError(f"self-loop ({u},{v})")
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise GraphFormatError(f"edge ({u},{v}) references a vertex outside 0..{vertex_count - 1}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge ({u},{v})")
        seen.add(key)
        edges.append(key)

    return PatternGraph(vertex_count, tuple(edges))


@dataclass(frozen=True)
class Subgraph:
    """Vertex bitset plus edge bitset inside a parent PatternGraph."""
    graph: PatternGraph
    vertices: int = 0
    edges: int = 0

    def __post_init__(self):
        if self.vertices & ~self.graph.full_vertex_mask or self.edges & ~self.graph.full_edge_mask:
            raise DomainRejection("subgraph bitset references vertices or edges outside its graph")
        missing = self.graph.endpoints_mask(self.edges) & ~self.vertices
        if missing:
            raise DomainRejection(f"edge endpoints {list(iter_bits(missing))} missing from the vertex set")

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, graph):
        return cls(graph, 0, 0)

    @classmethod
    def full(cls, graph):
        return cls(graph, graph.full_vertex_mask, graph.full_edge_mask)

    @classmethod
    def vertex_only(cls, graph, vertices: Iterable[int]):
        return cls(graph, mask_of(vertices), 0)

    @classmethod
    def from_edges(cls, graph, edge_indices: Iterable[int], extra_vertices: Iterable[int] = ()):
        edges = mask_of(edge_indices)
        return cls(graph, graph.endpoints_mask(edges) | mask_of(extra_vertices), edges)

    @classmethod
    def from_edge_mask(cls, graph, edge_mask):
        return cls(graph, graph.endpoints_mask(edge_mask), edge_mask)

    @classmethod
    def induced(cls, graph, vertices):
        vertex_mask = vertices if isinstance(vertices, int) else mask_of(vertices)
        return cls(graph, vertex_mask, graph.induced_edge_mask(vertex_mask))

    # -- queries ------------------------------------------------------------

    @property
    def vertex_count(self):
        return popcount(self.vertices)

    @property
    def edge_count(self):
        return popcount(self.edges)

    def vertex_list(self) -> List[int]:
        return list(iter_bits(self.vertices))

    def edge_list(self) -> List[int]:
        return list(iter_bits(self.edges))

    def edge_pairs(self) -> List[Tuple[int, int]]:
        return [self.graph.edges[i] for i in iter_bits(self.edges)]

    def is_empty(self):
        return self.vertices == 0

    def has_isolated_vertices(self):
        return self.graph.endpoints_mask(self.edges) != self.vertices

    def issubset(self, other):
        _check_same_graph(self, other)
        return (self.vertices & ~other.vertices) == 0 and (self.edges & ~other.edges) == 0

    def union(self, other):
        return combine(self, other, "union")

    def intersection(self, other):
        return combine(self, other, "intersection")

    def label(self):
        """Compact text label, e.g. 'v0.1.2|e0.2'."""
        vertices = ".".join(str(u) for u in iter_bits(self.vertices))
        edges = ".".join(str(e) for e in iter_bits(self.edges))
        return f"v{vertices}|e{edges}"

    def __repr__(self):
        return f"Subgraph({self.label()})"


def _check_same_graph(a, b):
    if a.graph is not b.graph and a.graph != b.graph:
        raise DomainRejection("subgraphs belong to different pattern graphs")


def combine(a: Subgraph, b: Subgraph, mode="union") -> Subgraph:
    """Bitwise union or intersection of two subgraphs of the same graph."""
    _check_same_graph(a, b)
    if mode == "union":
        return Subgraph(a.graph, a.vertices | b.vertices, a.edges | b.edges)
    if mode == "intersection":
        return Subgraph(a.graph, a.vertices & b.vertices, a.edges & b.edges)
    raise DomainRejection(f"unknown combine mode {mode!r}")


def iter_subgraphs(graph, within: Optional[Subgraph] = None, max_vertices=None,
                   contains: Optional[Subgraph] = None) -> Iterator[Subgraph]:
    """
    Enumerate the subgraph lattice.

    Yields every subgraph H with contains ⊆ H ⊆ within (defaults: ∅ and G),
    ordered by vertex bitset then edge bitset. max_vertices bounds v(H).
    """
    within = within or Subgraph.full(graph)
    base_vertices = contains.vertices if contains else 0
    base_edges = contains.edges if contains else 0
    if base_vertices & ~within.vertices or base_edges & ~within.edges:
        return

    free_vertices = within.vertices & ~base_vertices
    for extra in iter_submasks(free_vertices):
        vertices = base_vertices | extra
        if max_vertices is not None and popcount(vertices) > max_vertices:
            continue
        allowed = graph.induced_edge_mask(vertices) & within.edges & ~base_edges
        for edge_extra in iter_submasks(allowed):
            yield Subgraph(graph, vertices, base_edges | edge_extra)
