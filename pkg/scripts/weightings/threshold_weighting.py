#!/usr/bin/env python3
# scripts/weightings/threshold_weighting.py
"""
Threshold weightings (α, β) over a pattern graph, in exact rationals.

Δ(H) = α(H) − β(H). A weighting is in θ(G) when Δ(H) ≥ 0 for every subgraph
and Δ(G) = 0. Lattice minimisations (validation, Δ*, Γ) run over vertex sets
only: with β ≥ 0 the minimum for a fixed vertex set is at the induced subgraph.
"""
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional, Tuple

import numpy as np

from graphs.constructions import BlowupMap, hamming
from graphs.pattern_graph import PatternGraph, Subgraph, iter_bits, popcount
from utils.errors import DomainRejection, InternalCheckError, InvalidWeighting
from utils.settings import get_limit

logger = logging.getLogger("threshold-weighting")

INT64_SAFE = 1 << 62


def as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise InvalidWeighting(f"weights must be exact rationals, got float {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class ThresholdWeighting:
    graph: PatternGraph
    alpha: Tuple[Fraction, ...]
    beta: Tuple[Fraction, ...]

    def __post_init__(self):
        alpha = tuple(as_fraction(a) for a in self.alpha)
        beta = tuple(as_fraction(b) for b in self.beta)
        if len(alpha) != self.graph.vertex_count:
            raise InvalidWeighting(f"expected {self.graph.vertex_count} alpha values, got {len(alpha)}")
        if len(beta) != self.graph.edge_count:
            raise InvalidWeighting(f"expected {self.graph.edge_count} beta values, got {len(beta)}")
        for index, b in enumerate(beta):
            if b < 0:
                raise InvalidWeighting(f"beta of edge {self.graph.edges[index]} is negative ({b})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    def alpha_of(self, vertex_mask):
        return sum((self.alpha[u] for u in iter_bits(vertex_mask)), Fraction(0))

    def beta_of(self, edge_mask):
        return sum((self.beta[e] for e in iter_bits(edge_mask)), Fraction(0))

    def delta(self, subgraph: Subgraph):
        return self.alpha_of(subgraph.vertices) - self.beta_of(subgraph.edges)

    def has_unit_alpha(self):
        return all(a == 1 for a in self.alpha)

    def scaled(self):
        """(scale, alpha*scale, beta*scale) as Python ints, scale = lcm of denominators."""
        cached = self.__dict__.get("_scaled")
        if cached is None:
            denominators = [x.denominator for x in self.alpha + self.beta] or [1]
            scale = reduce(lambda a, b: a * b // math.gcd(a, b), denominators, 1)
            cached = (
                scale,
                tuple(int(a * scale) for a in self.alpha),
                tuple(int(b * scale) for b in self.beta),
            )
            object.__setattr__(self, "_scaled", cached)
        return cached


def delta_eval(weighting: ThresholdWeighting, subgraph: Subgraph) -> Fraction:
    if subgraph.graph != weighting.graph:
        raise DomainRejection("subgraph does not belong to the weighting's graph")
    return weighting.delta(subgraph)


def extension_table(weighting, base_vertices, free_vertices, edge_mask, alpha_override=None):
    """
    Scaled Δ of G'[base ∪ S] for every subset S of free_vertices.

    G' keeps only the edges in edge_mask. Entry m of the returned array is the
    value for S = {free_vertices[j] : bit j of m}. Values are integers scaled
    by the returned scale; the array is int64 unless that could overflow.

    Returns:
        (table, scale)
    """
    graph = weighting.graph
    if alpha_override is None:
        scale, alpha, beta = weighting.scaled()
    else:
        alpha_values = tuple(as_fraction(a) for a in alpha_override)
        denominators = [x.denominator for x in alpha_values + weighting.beta] or [1]
        scale = reduce(lambda a, b: a * b // math.gcd(a, b), denominators, 1)
        alpha = tuple(int(a * scale) for a in alpha_values)
        beta = tuple(int(b * scale) for b in weighting.beta)

    bound = sum(abs(a) for a in alpha) + sum(beta)
    dtype = np.int64 if bound < INT64_SAFE else object

    base_edges = graph.induced_edge_mask(base_vertices) & edge_mask
    start = sum(alpha[u] for u in iter_bits(base_vertices)) - sum(beta[e] for e in iter_bits(base_edges))
    table = np.array([start], dtype=dtype)

    for j, f in enumerate(free_vertices):
        gain = alpha[f]
        for u in iter_bits(base_vertices):
            index = graph.edge_index(u, f)
            if index is not None and edge_mask >> index & 1:
                gain -= beta[index]
        extended = table + gain
        if j:
            positions = np.arange(1 << j, dtype=np.int64)
            for i in range(j):
                index = graph.edge_index(free_vertices[i], f)
                if index is None or not edge_mask >> index & 1 or beta[index] == 0:
                    continue
                chosen = (positions >> i) & 1
                if dtype is object:
                    chosen = chosen.astype(object)
                extended = extended - beta[index] * chosen
        table = np.concatenate([table, extended])
    return table, scale


def local_to_global(local_mask, free_vertices):
    mask = 0
    for j in iter_bits(int(local_mask)):
        mask |= 1 << free_vertices[j]
    return mask


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    vertices: Optional[int] = None
    value: Optional[Fraction] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


@lru_cache(maxsize=512)
def _validate_cached(weighting, max_vertices):
    graph = weighting.graph
    for u, a in enumerate(weighting.alpha):
        if a > 1:
            return ValidationResult(False, 1 << u, a, f"alpha({u}) = {a} above 1")

    free = list(range(graph.vertex_count))
    table, scale = extension_table(weighting, 0, free, graph.full_edge_mask)
    position = int(np.argmin(table))
    minimum = Fraction(int(table[position]), scale)
    if minimum < 0:
        return ValidationResult(False, local_to_global(position, free), minimum,
                                f"Δ = {minimum} < 0 on the induced subgraph")

    total = Fraction(int(table[-1]), scale)
    if total != 0:
        return ValidationResult(False, graph.full_vertex_mask, total, f"Δ(G) = {total} ≠ 0")
    return ValidationResult(True, value=Fraction(0))


def validate(weighting: ThresholdWeighting, max_vertices=None) -> ValidationResult:
    """
    Check membership in θ(G) by scanning every vertex set.

    Returns:
        ValidationResult; on failure `vertices` is a minimizing vertex bitset
    """
    max_vertices = max_vertices or get_limit("validate_max_vertices")
    if weighting.graph.vertex_count > max_vertices:
        raise DomainRejection(
            f"exhaustive validation is limited to {max_vertices} vertices, graph has {weighting.graph.vertex_count}")
    return _validate_cached(weighting, max_vertices)


def require_valid(weighting, max_vertices=None):
    result = validate(weighting, max_vertices=max_vertices)
    if not result.ok:
        raise InvalidWeighting(f"weighting not in θ(G): {result.reason}", result.vertices, result.value)
    return result


def uniform_walk(graph: PatternGraph) -> ThresholdWeighting:
    """Δ_o = (1, β_o) with β_o(uv) = 1/deg(u) + 1/deg(v)."""
    isolated = graph.isolated_vertices()
    if isolated:
        raise InvalidWeighting(f"uniform walk undefined with isolated vertices {isolated}")
    alpha = [Fraction(1)] * graph.vertex_count
    beta = [Fraction(1, graph.degree[u]) + Fraction(1, graph.degree[v]) for u, v in graph.edges]
    return ThresholdWeighting(graph, tuple(alpha), tuple(beta))


def hamming_uniform_weighting(q, d, vertex_cap=None):
    """Δ_o on K_q^d, i.e. (1, 2/(d(q−1)))."""
    return uniform_walk(hamming(q, d, vertex_cap=vertex_cap))


def beta_uniform(subgraph: Subgraph):
    """β_o of a subgraph of the whole pattern graph."""
    graph = subgraph.graph
    return sum((Fraction(1, graph.degree[u]) + Fraction(1, graph.degree[v]) for u, v in subgraph.edge_pairs()),
               Fraction(0))


def _check_interval(upper, lower):
    if not lower.issubset(upper):
        raise DomainRejection(f"{lower!r} is not contained in {upper!r}")


def _interval_table(weighting, upper, lower):
    _check_interval(upper, lower)
    free = [u for u in iter_bits(upper.vertices & ~lower.vertices)]
    table, scale = extension_table(weighting, lower.vertices, free, upper.edges)
    return table, scale, free


def delta_star(weighting: ThresholdWeighting, upper: Subgraph, lower: Subgraph) -> Fraction:
    """Δ*_U(A) = min Δ(H) over A ⊆ H ⊆ U."""
    table, scale, _ = _interval_table(weighting, upper, lower)
    return Fraction(int(table.min()), scale)


def gamma(weighting: ThresholdWeighting, upper: Subgraph, lower: Subgraph) -> Subgraph:
    """Γ_U(A): the intersection of every minimizer of Δ over [A, U]."""
    table, scale, free = _interval_table(weighting, upper, lower)
    minimum = table.min()
    minimizers = np.nonzero(table == minimum)[0]
    common = int(np.bitwise_and.reduce(minimizers.astype(np.int64)))

    graph = weighting.graph
    vertices = lower.vertices | local_to_global(common, free)
    inner = graph.induced_edge_mask(vertices) & upper.edges
    positive = 0
    for e in iter_bits(inner):
        if weighting.beta[e] > 0:
            positive |= 1 << e
    result = Subgraph(graph, vertices, lower.edges | positive)

    if weighting.delta(result) != Fraction(int(minimum), scale) or not lower.issubset(result):
        raise InternalCheckError(f"Γ check failed for A={lower!r}, U={upper!r}")
    return result


def blowup_project(weighting: ThresholdWeighting, blowup_map: BlowupMap, checks=32) -> ThresholdWeighting:
    """
    Project a weighting on G↑q to G via Δ′(H) = Δ(H↑q)/q.

    α′(u) = Δ(u↑q)/q and β′(uv) = (1/q) Σ_{i,j} β(u_i v_j).
    """
    if weighting.graph != blowup_map.result:
        raise DomainRejection("weighting is not on the blowup graph")
    require_valid(weighting)

    q = blowup_map.q
    source = blowup_map.source
    alpha = []
    for u in range(source.vertex_count):
        lifted = Subgraph(blowup_map.result, blowup_map.lift_vertex_mask(1 << u), blowup_map.clique_edge_mask(u))
        alpha.append(weighting.delta(lifted) / q)
    beta = [weighting.beta_of(blowup_map.cross_edge_mask(e)) / q for e in range(source.edge_count)]
    projected = ThresholdWeighting(source, tuple(alpha), tuple(beta))

    rng = random.Random(source.vertex_count * 1000 + q)
    samples = [Subgraph.full(source)]
    for _ in range(checks):
        vertices = rng.getrandbits(max(source.vertex_count, 1)) & source.full_vertex_mask
        inner = source.induced_edge_mask(vertices)
        samples.append(Subgraph(source, vertices, inner & rng.getrandbits(max(source.edge_count, 1))))
    for sample in samples:
        if projected.delta(sample) != weighting.delta(blowup_map.lift(sample)) / q:
            raise InternalCheckError(f"projection identity failed on {sample!r}")

    verdict = validate(projected)
    if not verdict.ok:
        raise InternalCheckError(f"projected weighting does not validate: {verdict.reason}")
    logger.debug(f"Projected weighting from {blowup_map.result.vertex_count} to {source.vertex_count} vertices")
    return projected
