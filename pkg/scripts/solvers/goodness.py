#!/usr/bin/env python3
# scripts/solvers/goodness.py
"""
Goodness statistics: how many v-candidates extend an A-instance to U, against
the predicted n^{Δ*_U(A∪v) − Δ*_U(A)}.
"""
import logging
from fractions import Fraction

import numpy as np
import pandas as pd

from graphs.pattern_graph import Subgraph, iter_bits, iter_submasks, iter_subgraphs
from solvers.instances import enumerate_instances
from utils.errors import DomainRejection
from weightings.threshold_weighting import delta_star

logger = logging.getLogger("goodness-report")

GOODNESS_COLUMNS = ["U", "A", "v", "count", "exponent", "predicted", "ratio"]


def _max_distinct_per_group(rows, group_columns, value_column):
    """Largest number of distinct values in value_column among rows sharing group_columns."""
    if not len(rows):
        return 0
    keys = np.concatenate([rows[:, group_columns], rows[:, [value_column]]], axis=1)
    pairs = np.unique(keys, axis=0)
    if not group_columns:
        return len(pairs)
    _, counts = np.unique(pairs[:, :-1], axis=0, return_counts=True)
    return int(counts.max())


def goodness_report(host, size_cap, row_cap=None) -> pd.DataFrame:
    """
    Extension-count table over every (U, A, v) with v(U) ≤ size_cap.

    U ranges over subgraphs of G without isolated vertices, A over vertex
    sets of U (edges of A do not change which v-values extend), and v over
    V(U) − V(A). count is the maximum over A-instances of the number of
    distinct v-values appearing in U-instances above it.

    Returns:
        DataFrame with columns U, A, v, count, exponent, predicted, ratio
    """
    graph = host.pattern
    if size_cap < 1:
        raise DomainRejection(f"size cap must be positive, got {size_cap}")
    weighting = host.weighting
    records = []

    for upper in iter_subgraphs(graph, max_vertices=size_cap):
        if upper.is_empty() or upper.has_isolated_vertices():
            continue
        instances = enumerate_instances(host, upper, row_cap=row_cap)
        columns = {v: instances.column(v) for v in instances.vertices}

        for a_mask in iter_submasks(upper.vertices):
            if a_mask == upper.vertices:
                continue
            lower = Subgraph(graph, a_mask, 0)
            base = delta_star(weighting, upper, lower)
            group = [columns[u] for u in iter_bits(a_mask)]
            for v in iter_bits(upper.vertices & ~a_mask):
                exponent = delta_star(weighting, upper, Subgraph(graph, a_mask | 1 << v, 0)) - base
                count = _max_distinct_per_group(instances.rows, group, columns[v])
                predicted = float(host.n) ** float(exponent)
                records.append({
                    "U": upper.label(),
                    "A": lower.label(),
                    "v": v,
                    "count": count,
                    "exponent": str(Fraction(exponent)),
                    "predicted": predicted,
                    "ratio": count / predicted,
                })

    table = pd.DataFrame.from_records(records, columns=GOODNESS_COLUMNS)
    if len(table):
        logger.debug(f"goodness n={host.n}: {len(table)} triples, worst ratio {table['ratio'].max():.3f}")
    return table
