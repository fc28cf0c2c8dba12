#!/usr/bin/env python3
# scripts/weightings/markov.py
"""
Equivalence between threshold weightings and Markov chains.

A column-stochastic chain M supported on G induces the weighting
α(u) = 1 − M[u][u], β(uv) = M[u][v] + M[v][u]. Conversely every weighting in
θ(G) has a "flow" decomposition with zero diagonal, M(u,v) + M(v,u) = β(uv)
and rows summing to α(u); markov_decompose builds one recursively.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from graphs.pattern_graph import PatternGraph, iter_bits
from utils.errors import DomainRejection, InternalCheckError, InvalidWeighting
from weightings.threshold_weighting import (
    ThresholdWeighting, extension_table, local_to_global, require_valid, validate,
)

logger = logging.getLogger("markov-decompose")

FLOW = "flow"
STOCHASTIC = "stochastic"


@dataclass(frozen=True)
class MarkovChain:
    """
    Rational matrix over ordered vertex pairs.

    kind "stochastic": columns sum to 1 (input of from_markov).
    kind "flow": zero diagonal, rows sum to α (output of markov_decompose).
    """
    graph: PatternGraph
    entries: Tuple[Tuple[Fraction, ...], ...]
    kind: str = STOCHASTIC

    def __post_init__(self):
        size = self.graph.vertex_count
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        if len(rows) != size or any(len(row) != size for row in rows):
            raise DomainRejection(f"Markov chain must be {size}x{size}")
        if self.kind not in (FLOW, STOCHASTIC):
            raise DomainRejection(f"unknown chain kind {self.kind!r}")
        object.__setattr__(self, "entries", rows)

    def __getitem__(self, pair):
        u, v = pair
        return self.entries[u][v]

    def to_stochastic(self):
        """Column-stochastic form P with P[v][u] = M(u,v) and P[u][u] = 1 − α(u)."""
        if self.kind == STOCHASTIC:
            return self
        size = self.graph.vertex_count
        matrix = [[Fraction(0)] * size for _ in range(size)]
        for u in range(size):
            outflow = sum(self.entries[u], Fraction(0))
            if outflow > 1:
                raise InvalidWeighting(f"row {u} sums to {outflow} > 1; no stochastic form")
            matrix[u][u] = 1 - outflow
            for v in range(size):
                if v != u:
                    matrix[v][u] = self.entries[u][v]
        return MarkovChain(self.graph, tuple(tuple(row) for row in matrix), STOCHASTIC)

    def flow_violations(self, weighting):
        """Messages for every failed decomposition condition (empty when all hold)."""
        problems = []
        graph = self.graph
        size = graph.vertex_count
        for u in range(size):
            if self.entries[u][u] != 0:
                problems.append(f"M({u},{u}) = {self.entries[u][u]} is not 0")
            row_sum = sum(self.entries[u], Fraction(0))
            if row_sum != weighting.alpha[u]:
                problems.append(f"row {u} sums to {row_sum}, alpha is {weighting.alpha[u]}")
            for v in range(size):
                value = self.entries[u][v]
                if value < 0:
                    problems.append(f"M({u},{v}) = {value} is negative")
                if u < v:
                    index = graph.edge_index(u, v)
                    beta = weighting.beta[index] if index is not None else Fraction(0)
                    if value + self.entries[v][u] != beta:
                        problems.append(f"M({u},{v}) + M({v},{u}) = {value + self.entries[v][u]}, beta is {beta}")
        return problems


def _as_chain(graph, matrix):
    if isinstance(matrix, MarkovChain):
        return matrix
    return MarkovChain(graph, tuple(tuple(row) for row in matrix), STOCHASTIC)


def from_markov(graph: PatternGraph, matrix) -> ThresholdWeighting:
    """
    Weighting induced by a column-stochastic chain supported on G.

    A flow decomposition is converted with to_stochastic() first.
    """
    chain = _as_chain(graph, matrix)
    if chain.graph != graph:
        raise DomainRejection("Markov chain belongs to a different graph")
    chain = chain.to_stochastic()

    size = graph.vertex_count
    for v in range(size):
        column = [chain.entries[u][v] for u in range(size)]
        if any(x < 0 for x in column):
            raise InvalidWeighting(f"column {v} has a negative entry")
        if sum(column, Fraction(0)) != 1:
            raise InvalidWeighting(f"column {v} sums to {sum(column, Fraction(0))}, not 1")
        for u in range(size):
            if u != v and column[u] != 0 and not graph.has_edge(u, v):
                raise InvalidWeighting(f"M({u},{v}) = {column[u]} on non-edge ({u},{v})")

    alpha = tuple(1 - chain.entries[u][u] for u in range(size))
    beta = tuple(chain.entries[u][v] + chain.entries[v][u] for u, v in graph.edges)
    weighting = ThresholdWeighting(graph, alpha, beta)

    verdict = validate(weighting)
    if not verdict.ok:
        raise InternalCheckError(f"chain-induced weighting failed validation: {verdict.reason}")
    return weighting


def _popcounts(size):
    counts = np.zeros(1 << size, dtype=np.int64)
    for i in range(size):
        counts[1 << i:1 << (i + 1)] = counts[:1 << i] + 1
    return counts


def _split_cut(weighting, inside, outside, remaining, flow):
    graph = weighting.graph
    for index, (u, v) in enumerate(graph.edges):
        if inside >> u & 1 and outside >> v & 1:
            source, target = u, v
        elif inside >> v & 1 and outside >> u & 1:
            source, target = v, u
        else:
            continue
        beta = weighting.beta[index]
        share = min(beta, remaining)
        flow[source][target] = share
        flow[target][source] = beta - share
        remaining -= share
    if remaining != 0:
        raise InternalCheckError(f"cut capacity short by {remaining}")


def _decompose(weighting, vertices: List[int], alpha: List[Fraction], flow):
    if len(vertices) == 1:
        u = vertices[0]
        if alpha[u] != 0:
            raise InternalCheckError(f"single-vertex remainder {u} has alpha {alpha[u]} ≠ 0")
        return
    if not vertices:
        return

    table, scale = extension_table(weighting, 0, vertices, weighting.graph.full_edge_mask, alpha_override=alpha)
    proper = table[1:-1]
    minimum = proper.min()
    candidates = np.nonzero(proper == minimum)[0] + 1
    sizes = _popcounts(len(vertices))[candidates]
    chosen = int(candidates[np.lexsort((candidates, sizes))[0]])

    inside = local_to_global(chosen, vertices)
    outside = local_to_global((1 << len(vertices)) - 1 - chosen, vertices)
    _split_cut(weighting, inside, outside, Fraction(int(minimum), scale), flow)

    next_alpha = list(alpha)
    for u in iter_bits(inside):
        next_alpha[u] = alpha[u] - sum((flow[u][v] for v in iter_bits(outside)), Fraction(0))
    for u in iter_bits(outside):
        next_alpha[u] = alpha[u] - sum((flow[u][v] for v in iter_bits(inside)), Fraction(0))

    _decompose(weighting, list(iter_bits(inside)), next_alpha, flow)
    _decompose(weighting, list(iter_bits(outside)), next_alpha, flow)


def markov_decompose(weighting: ThresholdWeighting) -> MarkovChain:
    """
    Flow decomposition of a valid weighting.

    Split off the lightest proper induced subgraph H (fewest vertices, then
    smallest bitset on ties), route Δ(H) across the cut greedily in edge order
    and recurse on both sides with the reduced α.
    """
    require_valid(weighting)
    size = weighting.graph.vertex_count
    flow = [[Fraction(0)] * size for _ in range(size)]
    _decompose(weighting, list(range(size)), list(weighting.alpha), flow)

    chain = MarkovChain(weighting.graph, tuple(tuple(row) for row in flow), FLOW)
    problems = chain.flow_violations(weighting)
    if problems:
        raise InternalCheckError("decomposition check failed: " + "; ".join(problems[:3]))
    return chain


def random_markov_weighting(graph: PatternGraph, rng, unit_alpha=True, max_weight=6, sparsity=0.25):
    """
    Random member of θ(G) induced by a random column-stochastic chain on G.

    Args:
        graph: pattern graph (no isolated vertices when unit_alpha)
        rng: numpy Generator
        unit_alpha: zero diagonal, so α ≡ 1
        max_weight: integer weights are drawn from 1..max_weight before normalising
        sparsity: chance that an off-diagonal entry is zeroed

    Returns:
        ThresholdWeighting
    """
    size = graph.vertex_count
    columns = []
    for v in range(size):
        neighbours = sorted(graph.adjacency[v])
        if unit_alpha and not neighbours:
            raise InvalidWeighting(f"vertex {v} is isolated; α ≡ 1 is impossible")
        weights = {}
        for u in neighbours:
            if rng.random() >= sparsity:
                weights[u] = int(rng.integers(1, max_weight + 1))
        if not unit_alpha:
            weights[v] = int(rng.integers(0, max_weight + 1))
        if sum(weights.values()) == 0:
            target = neighbours[int(rng.integers(len(neighbours)))] if unit_alpha else v
            weights[target] = 1
        total = sum(weights.values())
        columns.append({u: Fraction(w, total) for u, w in weights.items()})

    matrix = [[columns[v].get(u, Fraction(0)) for v in range(size)] for u in range(size)]
    return from_markov(graph, matrix)
