#!/usr/bin/env python3
# scripts/solvers/sort_merge_join.py
"""
Sort-merge join along a union sequence.

Edge steps read the stored block pairs. A union step H = A ∪ B sorts both
lists lexicographically on their projection onto V(A ∩ B) and merges them:
two cursors walk the runs of equal keys, advancing whichever key is smaller;
on equal keys the whole run of A is paired with the whole run of B.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from kappa.union_sequence import check_sequence
from solvers.instances import InstanceList
from utils.errors import CapacityExceeded, DomainRejection
from utils.settings import get_limit

logger = logging.getLogger("join-solver")


@dataclass
class JoinResult:
    decision: bool
    counts: List[int]
    peak: int
    lists: Optional[List[InstanceList]] = field(default=None, repr=False)

    def to_dict(self):
        return {"decision": self.decision, "counts": self.counts, "peak": self.peak}


def edge_instances(host, subgraph) -> InstanceList:
    """Sub_e(X) for a single-edge subgraph: the stored block pairs."""
    (index,) = subgraph.edge_list()
    block = host.edge_block(index)
    return InstanceList(subgraph, (block.u, block.v), block.pairs.copy(), (block.u, block.v))


def _runs(keys):
    """(key values, run starts, run lengths) of a sorted key array."""
    if not len(keys):
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    starts = np.flatnonzero(np.concatenate([[True], keys[1:] != keys[:-1]]))
    lengths = np.diff(np.append(starts, len(keys)))
    return keys[starts], starts, lengths


def _shared_keys(left_rows, right_rows):
    """Joint lexicographic ranks of both projections, so equal tuples get equal keys."""
    if left_rows.shape[1] == 0:
        return np.zeros(len(left_rows), dtype=np.int64), np.zeros(len(right_rows), dtype=np.int64)
    combined = np.concatenate([left_rows, right_rows], axis=0)
    _, inverse = np.unique(combined, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1).astype(np.int64)
    return inverse[:len(left_rows)], inverse[len(left_rows):]


def merge_join(left: InstanceList, right: InstanceList, row_cap=None, step=None) -> InstanceList:
    """
    Natural join of two instance lists on their shared pattern vertices.

    Raises:
        CapacityExceeded (carrying the step) when the output outgrows row_cap
    """
    row_cap = row_cap or get_limit("join_row_cap")
    merged = left.subgraph.union(right.subgraph)
    shared = tuple(sorted(set(left.vertices) & set(right.vertices)))
    vertices = tuple(merged.vertex_list())
    if not len(left) or not len(right):
        return InstanceList(merged, vertices, np.zeros((0, len(vertices)), dtype=np.int64), shared)

    left = left.sort_on(shared)
    right = right.sort_on(shared)
    left_keys, right_keys = _shared_keys(left.project(shared), right.project(shared))
    left_values, left_starts, left_lengths = _runs(left_keys)
    right_values, right_starts, right_lengths = _runs(right_keys)

    matched = []
    i = j = 0
    while i < len(left_values) and j < len(right_values):
        if left_values[i] < right_values[j]:
            i += 1
        elif left_values[i] > right_values[j]:
            j += 1
        else:
            matched.append((left_starts[i], left_lengths[i], right_starts[j], right_lengths[j]))
            i += 1
            j += 1

    total = sum(int(a) * int(b) for _, a, _, b in matched)
    if total > row_cap:
        raise CapacityExceeded(f"join output of {total} rows exceeds the row cap {row_cap}", limit=row_cap, step=step)
    if not matched:
        return InstanceList(merged, vertices, np.zeros((0, len(vertices)), dtype=np.int64), shared)

    runs = np.array(matched, dtype=np.int64)
    sizes = runs[:, 1] * runs[:, 3]
    run_of = np.repeat(np.arange(len(runs)), sizes)
    offset = np.arange(total) - np.repeat(np.cumsum(sizes) - sizes, sizes)
    left_index = runs[run_of, 0] + offset // runs[run_of, 3]
    right_index = runs[run_of, 2] + offset % runs[run_of, 3]

    columns = []
    for v in vertices:
        if v in left.vertices:
            columns.append(left.rows[left_index, left.column(v)])
        else:
            columns.append(right.rows[right_index, right.column(v)])
    return InstanceList(merged, vertices, np.stack(columns, axis=1), shared)


def join_solve(host, sequence, row_cap=None, keep_lists=False) -> JoinResult:
    """
    Decide Sub_G(X) ≠ ∅ by joining along a union sequence.

    Args:
        host: ColoredHostGraph
        sequence: UnionSequence over the host's pattern
        row_cap: largest list allowed at any step
        keep_lists: return every step's InstanceList

    Returns:
        JoinResult with per-step counts and the peak list size
    """
    if sequence.graph != host.pattern:
        raise DomainRejection("sequence and host graph use different patterns")
    check_sequence(sequence)

    lists: List[InstanceList] = []
    for position, step in enumerate(sequence):
        if step.is_edge:
            lists.append(edge_instances(host, step.subgraph))
        else:
            lists.append(merge_join(lists[step.left], lists[step.right], row_cap=row_cap, step=position))
        logger.debug(f"step {position} ({step.provenance()}): {len(lists[-1])} rows")

    counts = [len(rows) for rows in lists]
    result = JoinResult(counts[-1] > 0, counts, max(counts), lists if keep_lists else None)
    logger.info(f"join solve n={host.n}: decision {result.decision}, peak {result.peak}")
    return result
