#!/usr/bin/env python3
# scripts/graphs/hypercube.py
"""
Hypercube prefix geometry and the embedding of even-q Hamming graphs into
hypercube blowups.

Prefixes are G(a) = Q_d[{0, ..., a-1}] under the identification u ↔ Σ u_i 2^i.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from graphs.constructions import BlowupMap, blowup, hamming, hamming_coordinates, hypercube
from graphs.pattern_graph import PatternGraph
from utils.errors import DomainRejection, InternalCheckError
from utils.settings import get_limit

logger = logging.getLogger("graph-core")


def _ones_below(a, d):
    """Σ_{x < a} popcount(x), counted bit by bit."""
    total = 0
    for i in range(d):
        period = 1 << (i + 1)
        total += (a // period) << i
        total += max(0, a % period - (1 << i))
    return total


def hypercube_prefix_boundary(d, a):
    """
    Number of Q_d edges with exactly one endpoint in {0, ..., a-1}.

    Adding vertex x to the prefix adds d - 2·popcount(x) to the boundary
    (its popcount(x) neighbours below x are already inside).
    """
    if d < 1 or not 0 <= a <= 2 ** d:
        raise DomainRejection(f"need d >= 1 and 0 <= a <= 2^d, got d={d}, a={a}")
    return a * d - 2 * _ones_below(a, d)


def hypercube_prefix_boundaries(d, max_d=None):
    """Boundary sizes for every a in 0..2^d as an int64 array (incremental scan)."""
    max_d = max_d or get_limit("hamming_scan_max_d")
    if d < 1 or d > max_d:
        raise DomainRejection(f"prefix scan needs 1 <= d <= {max_d}, got {d}")

    popcounts = np.zeros(1 << d, dtype=np.int64)
    for i in range(d):
        popcounts[1 << i:1 << (i + 1)] = popcounts[:1 << i] + 1

    boundaries = np.zeros((1 << d) + 1, dtype=np.int64)
    np.cumsum(d - 2 * popcounts, out=boundaries[1:])
    return boundaries


def hypercube_mu_closed_form(d):
    """2^{d-1} + 2^{d-3} + ... down to 2 or 1."""
    return sum(1 << k for k in range(d - 1, -1, -2))


@dataclass(frozen=True)
class HammingEmbedding:
    source: PatternGraph
    target: BlowupMap
    mapping: Tuple[int, ...]


def verify_embedding(source, target, mapping):
    """Raise InternalCheckError unless mapping is injective and edge preserving."""
    if len(mapping) != source.vertex_count:
        raise InternalCheckError(f"mapping covers {len(mapping)} of {source.vertex_count} vertices")
    if len(set(mapping)) != len(mapping):
        raise InternalCheckError("embedding is not injective")
    for u, v in source.edges:
        if not target.has_edge(mapping[u], mapping[v]):
            raise InternalCheckError(f"edge ({u},{v}) maps to non-edge ({mapping[u]},{mapping[v]})")


def hamming_embed(q, d, vertex_cap=None):
    """
    Injective homomorphism K_q^d → Q_d↑(q/2)^d.

    x ↦ (Σ φ_L(x_i) 2^i, ψ(φ_R(x_1), ..., φ_R(x_d))) with φ_L(x) = x mod 2,
    φ_R(x) = x div 2 and ψ the base-(q/2) index.
    """
    if q % 2:
        raise DomainRejection(f"hamming_embed needs even q, got {q}")
    half = q // 2
    copies = half ** d

    source = hamming(q, d, vertex_cap=vertex_cap)
    target = blowup(hypercube(d, vertex_cap=vertex_cap), copies, vertex_cap=vertex_cap)

    mapping = []
    for x in range(source.vertex_count):
        coordinates = hamming_coordinates(x, q, d)
        corner = sum((c % 2) << i for i, c in enumerate(coordinates))
        copy = sum((c // 2) * half ** i for i, c in enumerate(coordinates))
        mapping.append(corner * copies + copy)

    verify_embedding(source, target.result, mapping)
    logger.debug(f"Embedded K_{q}^{d} into Q_{d} blown up by {copies}")
    return HammingEmbedding(source, target, tuple(mapping))
