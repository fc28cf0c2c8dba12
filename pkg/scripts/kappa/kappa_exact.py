#!/usr/bin/env python3
# scripts/kappa/kappa_exact.py
"""
Exact κ_Δ(G) by bounded-union lattice closure.

κ_Δ(G) is the least threshold t such that closing the single edges with
Δ ≤ t under pairwise unions of Δ ≤ t reaches G. Closure derivations are
exactly union sequences, so the derivation tree is the witness.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

import numpy as np

from graphs.pattern_graph import Subgraph
from kappa.union_sequence import SequenceBuilder, UnionSequence, validate_sequence
from utils.errors import DomainRejection, InternalCheckError
from utils.settings import get_limit
from weightings.threshold_weighting import INT64_SAFE, validate

logger = logging.getLogger("kappa-exact")

EXACT = "exact"
WITNESS_ONLY = "witness-only"


@dataclass(frozen=True)
class KappaResult:
    value: Fraction
    witness: UnionSequence
    method: str = EXACT
    search_stats: Dict[Fraction, int] = field(default_factory=dict)

    def as_text(self):
        return f"{self.value.numerator}/{self.value.denominator}"

    @property
    def decimal(self):
        return float(self.value)


def edge_subset_deltas(weighting):
    """
    Scaled Δ of every edge subset (vertex set = the edges' endpoints).

    Returns:
        (list of ints indexed by edge bitset, scale)
    """
    graph = weighting.graph
    scale, alpha, beta = weighting.scaled()
    count = graph.edge_count
    dtype = np.int64 if sum(alpha) + sum(beta) < INT64_SAFE else object

    vertex_masks = np.zeros(1, dtype=np.int64)
    beta_sums = np.zeros(1, dtype=dtype)
    for k in range(count):
        vertex_masks = np.concatenate([vertex_masks, vertex_masks | graph.edge_vertex_mask(k)])
        beta_sums = np.concatenate([beta_sums, beta_sums + beta[k]])

    alpha_sums = np.zeros(1 << count, dtype=dtype)
    for u in range(graph.vertex_count):
        present = (vertex_masks >> u) & 1
        if dtype is object:
            present = present.astype(object)
        alpha_sums = alpha_sums + alpha[u] * present
    return [int(x) for x in alpha_sums - beta_sums], scale


def _closure(deltas, threshold, edge_count):
    """Masks reachable under bounded unions, each with its provenance."""
    full = (1 << edge_count) - 1
    provenance = {}
    order = []
    for k in range(edge_count):
        mask = 1 << k
        if deltas[mask] <= threshold:
            provenance[mask] = None
            order.append(mask)

    position = 0
    while position < len(order) and full not in provenance:
        current = order[position]
        for earlier in order[:position]:
            merged = current | earlier
            if merged not in provenance and deltas[merged] <= threshold:
                provenance[merged] = (earlier, current)
                order.append(merged)
        position += 1
    return provenance


def _witness(graph, provenance, full):
    builder = SequenceBuilder(graph)
    built = {}

    def emit(mask):
        if mask in built:
            return built[mask]
        parts = provenance[mask]
        if parts is None:
            index = builder.add_edge(mask.bit_length() - 1)
        else:
            index = builder.add_union(emit(parts[0]), emit(parts[1]))
        built[mask] = index
        return index

    emit(full)
    return builder.build()


def kappa_exact(weighting, max_edges=None) -> KappaResult:
    """
    Exact κ_Δ(G) with a realizing union sequence.

    Binary search over the sorted distinct Δ values of edge subsets; the
    feasibility test is the bounded-union closure.
    """
    graph = weighting.graph
    max_edges = max_edges or get_limit("closure_max_edges")
    if graph.edge_count == 0:
        raise DomainRejection("κ is undefined for a graph without edges")
    if graph.edge_count > max_edges:
        raise DomainRejection(f"exact κ is limited to {max_edges} edges, graph has {graph.edge_count}")
    isolated = graph.isolated_vertices()
    if isolated:
        raise DomainRejection(f"graph has isolated vertices {isolated}")
    if graph.vertex_count <= get_limit("validate_max_vertices"):
        verdict = validate(weighting)
        if not verdict.ok:
            raise DomainRejection(f"weighting not in θ(G): {verdict.reason}")

    deltas, scale = edge_subset_deltas(weighting)
    count = graph.edge_count
    full = (1 << count) - 1
    floor = max(deltas[1 << k] for k in range(count))
    candidates = sorted({d for d in deltas[1:] if d >= floor})

    evaluated = {}
    low, high = 0, len(candidates) - 1
    best = None
    while low <= high:
        middle = (low + high) // 2
        threshold = candidates[middle]
        provenance = _closure(deltas, threshold, count)
        feasible = full in provenance
        evaluated[threshold] = (feasible, len(provenance))
        logger.debug(f"threshold {Fraction(threshold, scale)}: closure {len(provenance)}, feasible={feasible}")
        if feasible:
            best = (threshold, provenance)
            high = middle - 1
        else:
            low = middle + 1

    flags = [evaluated[t][0] for t in sorted(evaluated)]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        raise InternalCheckError("feasible thresholds are not upward closed")
    if best is None:
        raise InternalCheckError("no candidate threshold reached the full graph")

    threshold, provenance = best
    value = Fraction(threshold, scale)
    witness = _witness(graph, provenance, full)
    if validate_sequence(witness, weighting) != value:
        raise InternalCheckError("witness maximum differs from the computed κ")

    stats = {Fraction(t, scale): size for t, (_, size) in sorted(evaluated.items())}
    logger.info(f"κ = {value} over {count} edges ({len(evaluated)} closure tests)")
    return KappaResult(value, witness, EXACT, stats)
