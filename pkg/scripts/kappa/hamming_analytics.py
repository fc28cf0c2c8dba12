#!/usr/bin/env python3
# scripts/kappa/hamming_analytics.py
"""
Hamming-graph analytics: the hypercube prefix maximum μ, spectral lower
bounds on κ(K_q^d) and the popcount path decomposition of Q_d.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from graphs.constructions import hamming_coordinates, hamming_edge_list
from graphs.hypercube import hypercube_mu_closed_form, hypercube_prefix_boundaries
from utils.errors import DomainRejection, InternalCheckError
from utils.settings import get_limit

logger = logging.getLogger("hamming-analytics")

EIGENVECTOR_CHECK_LIMIT = 64


def hypercube_mu(d, max_d=None) -> Fraction:
    """μ(d) = max_a e(G(a), Q_d − G(a)) / d, from the incremental prefix scan."""
    max_d = max_d or get_limit("hamming_scan_max_d")
    if d < 1 or d > max_d:
        raise DomainRejection(f"hypercube_mu needs 1 <= d <= {max_d}, got {d}")

    peak = int(hypercube_prefix_boundaries(d, max_d=max_d).max())
    if peak != hypercube_mu_closed_form(d):
        raise InternalCheckError(f"prefix scan maximum {peak} differs from closed form for d={d}")
    if not 3 * peak < 2 ** (d + 1):
        raise InternalCheckError(f"boundary {peak} breaks the 2^(d+1)/3 bound for d={d}")
    return Fraction(peak, d)


def compose_spectrum(q, d):
    """Eigenvalue multiset of K_q^d as a Counter, by summing K_q spectra."""
    clique = Counter({q - 1: 1, -1: q - 1})
    spectrum = Counter({0: 1})
    for _ in range(d):
        combined = Counter()
        for a, ma in spectrum.items():
            for b, mb in clique.items():
                combined[a + b] += ma * mb
        spectrum = combined
    return spectrum


def _clique_eigenvectors(q):
    """(eigenvalue, integer eigenvector) pairs spanning R^q for K_q."""
    pairs = [(q - 1, np.ones(q, dtype=np.int64))]
    for j in range(1, q):
        vector = np.zeros(q, dtype=np.int64)
        vector[0], vector[j] = 1, -1
        pairs.append((-1, vector))
    return pairs


def verify_hamming_spectrum(q, d):
    """
    Check A·x = λx exactly for the tensor-product eigenvectors of K_q^d.

    Returns:
        Counter of verified eigenvalues
    """
    size = q ** d
    adjacency = np.zeros((size, size), dtype=np.int64)
    for u, v in hamming_edge_list(q, d):
        adjacency[u, v] = adjacency[v, u] = 1

    basis = _clique_eigenvectors(q)
    coordinates = [hamming_coordinates(v, q, d) for v in range(size)]
    vectors = np.zeros((size, size), dtype=np.int64)
    eigenvalues = np.zeros(size, dtype=np.int64)
    for column in range(size):
        choice = hamming_coordinates(column, q, d)
        eigenvalues[column] = sum(basis[c][0] for c in choice)
        for v, coords in enumerate(coordinates):
            value = 1
            for c, x in zip(choice, coords):
                value *= int(basis[c][1][x])
            vectors[v, column] = value

    if not np.array_equal(adjacency @ vectors, vectors * eigenvalues):
        raise InternalCheckError(f"tensor eigenvectors of K_{q}^{d} fail A·x = λx")
    if np.linalg.matrix_rank(vectors.astype(float)) != size:
        raise InternalCheckError(f"tensor eigenvectors of K_{q}^{d} are not a basis")
    return Counter(int(x) for x in eigenvalues)


def kappa_lower_bounds(q, d, verify=None):
    """
    Spectral bounds for K_q^d.

    Returns:
        dict with lambda2, cheeger_h_bound, kappa_bound, expansion_bound
        (all Fractions) and the composed spectrum
    """
    if q < 2 or d < 1:
        raise DomainRejection(f"need q >= 2 and d >= 1, got q={q}, d={d}")
    spectrum = compose_spectrum(q, d)
    ordered = sorted(spectrum.elements(), reverse=True)
    lambda2 = Fraction(ordered[1])
    if lambda2 != d * (q - 1) - q:
        raise InternalCheckError(f"composed λ2 = {lambda2} differs from d(q−1)−q")

    if verify is None:
        verify = q ** d <= EIGENVECTOR_CHECK_LIMIT
    if verify and verify_hamming_spectrum(q, d) != spectrum:
        raise InternalCheckError(f"verified eigenvalues of K_{q}^{d} differ from the composed spectrum")

    degree = Fraction(d * (q - 1))
    vertices = Fraction(q ** d)
    cheeger = (degree - lambda2) / 2
    return {
        "lambda2": lambda2,
        "cheeger_h_bound": cheeger,
        "kappa_bound": vertices * (1 - lambda2 / degree) / 6,
        "expansion_bound": vertices * cheeger / (3 * degree),
        "spectrum": dict(sorted(spectrum.items(), reverse=True)),
    }


@dataclass(frozen=True)
class PathDecomposition:
    bags: List[np.ndarray]
    width: int


def hypercube_path_decomposition(d, max_d=None) -> PathDecomposition:
    """Bags U_k = vertices of Q_d with k or k−1 ones, k = 1..d, verified."""
    max_d = max_d or get_limit("path_decomposition_max_d")
    if d < 1 or d > max_d:
        raise DomainRejection(f"path decomposition needs 1 <= d <= {max_d}, got {d}")

    size = 1 << d
    popcounts = np.zeros(size, dtype=np.int64)
    for i in range(d):
        popcounts[1 << i:1 << (i + 1)] = popcounts[:1 << i] + 1

    membership = np.zeros((d, size), dtype=bool)
    for k in range(1, d + 1):
        membership[k - 1] = (popcounts == k) | (popcounts == k - 1)

    if not membership.any(axis=0).all():
        raise InternalCheckError("some vertex lies in no bag")
    vertices = np.arange(size)
    for i in range(d):
        lower = vertices[(vertices >> i) & 1 == 0]
        upper = lower | (1 << i)
        if not (membership[:, lower] & membership[:, upper]).any(axis=0).all():
            raise InternalCheckError(f"an edge along coordinate {i} is in no bag")
    starts = np.diff(membership.astype(np.int8), axis=0, prepend=0) == 1
    if (starts.sum(axis=0) > 1).any():
        raise InternalCheckError("bags containing a vertex are not contiguous")

    bags = [np.nonzero(row)[0] for row in membership]
    width = max(len(bag) for bag in bags) - 1
    logger.debug(f"Q_{d} path decomposition width {width}")
    return PathDecomposition(bags, width)
