#!/usr/bin/env python3
# scripts/kappa/kappa_search.py
"""
Heuristic search for weightings with large κ_Δ(G).

Only α ≡ 1 weightings are searched. A step multiplies one β coordinate by a
random factor, rescales all β so that Δ(G) = 0 again, snaps to a dyadic grid
(the largest coordinate absorbs the rounding) and keeps the candidate when it
validates and does not lower κ. Results are lower bounds on κ(G).
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List

import numpy as np

from kappa.kappa_exact import KappaResult, kappa_exact
from utils.errors import DomainRejection
from utils.settings import get_limit
from weightings.markov import random_markov_weighting
from weightings.threshold_weighting import ThresholdWeighting, uniform_walk, validate

logger = logging.getLogger("kappa-search")

FACTORS = (Fraction(1, 2), Fraction(2, 3), Fraction(4, 5), Fraction(5, 4), Fraction(3, 2), Fraction(2))
GRID = 1 << 10


@dataclass(frozen=True)
class SearchResult:
    weighting: ThresholdWeighting
    result: KappaResult
    baseline: KappaResult
    restarts: int
    iterations: int
    heuristic: bool = True


def _beta_key(weighting):
    return tuple(weighting.beta)


def _project(graph, beta):
    """Rescale to β(G) = v(G) and snap every coordinate but the largest to the grid."""
    total = sum(beta, Fraction(0))
    if total == 0:
        return None
    scaled = [b * graph.vertex_count / total for b in beta]
    anchor = max(range(len(scaled)), key=lambda e: (scaled[e], -e))
    snapped = [Fraction(int(b * GRID), GRID) for b in scaled]
    snapped[anchor] = 0
    snapped[anchor] = graph.vertex_count - sum(snapped, Fraction(0))
    if snapped[anchor] < 0 or snapped[anchor] > 2:
        return None
    return snapped


def _run_restart(graph, iterations, seed, restart, max_edges):
    rng = np.random.default_rng([seed, restart])
    if restart == 0:
        current = uniform_walk(graph)
    else:
        current = random_markov_weighting(graph, rng, unit_alpha=True)
    best = kappa_exact(current, max_edges=max_edges)

    alpha = current.alpha
    for _ in range(iterations):
        edge = int(rng.integers(graph.edge_count))
        factor = FACTORS[int(rng.integers(len(FACTORS)))]
        beta = list(current.beta)
        beta[edge] = beta[edge] * factor
        projected = _project(graph, beta)
        if projected is None:
            continue
        candidate = ThresholdWeighting(graph, alpha, tuple(projected))
        if not validate(candidate).ok:
            continue
        result = kappa_exact(candidate, max_edges=max_edges)
        if result.value >= best.value:
            current, best = candidate, result
    return current, best


class KappaSearch:
    """
    Restarted coordinate search over (1, β) weightings.

    Restart 0 starts from Δ_o; later restarts start from random chains.
    """

    def __init__(self, iterations=50, restarts=4, seed=0, max_workers=1, max_edges=None):
        self.iterations = iterations
        self.restarts = restarts
        self.seed = seed
        self.max_workers = max_workers
        self.max_edges = max_edges or get_limit("closure_max_edges")

    def run(self, graph) -> SearchResult:
        if graph.edge_count == 0 or graph.isolated_vertices():
            raise DomainRejection("κ search needs a graph with edges and no isolated vertices")
        if graph.edge_count > self.max_edges:
            raise DomainRejection(f"κ search needs exact κ, limited to {self.max_edges} edges")
        restarts = max(1, self.restarts)

        baseline = kappa_exact(uniform_walk(graph), max_edges=self.max_edges)
        args = [(graph, self.iterations, self.seed, r, self.max_edges) for r in range(restarts)]
        if self.max_workers > 1:
            with ProcessPoolExecutor(max_workers=self.max_workers) as pool:
                outcomes: List = list(pool.map(_run_restart, *zip(*args)))
        else:
            outcomes = [_run_restart(*a) for a in args]

        weighting, result = outcomes[0]
        for candidate, candidate_result in outcomes[1:]:
            better = candidate_result.value > result.value
            tie = candidate_result.value == result.value and _beta_key(candidate) < _beta_key(weighting)
            if better or tie:
                weighting, result = candidate, candidate_result

        logger.info(f"κ search: best {result.value} (Δ_o baseline {baseline.value}) over {restarts} restarts")
        return SearchResult(weighting, result, baseline, restarts, self.iterations)


def kappa_search(graph, iterations=50, restarts=4, seed=0, max_workers=1) -> SearchResult:
    return KappaSearch(iterations, restarts, seed, max_workers).run(graph)
