#!/usr/bin/env python3
# scripts/solvers/subgraph_trie.py
"""
Subgraph tries T(H, π).

Level t holds the nodes at depth t + 1, labelled by block indices of the
pattern vertex π[t]. Non-null nodes are kept packed in two arrays per level
(labels and parent positions), sorted by (parent, label), so null slots are
never stored. Every node above the leaf level has at least one child, and
the root-to-leaf label paths are exactly the rows of Sub_H(X).

Each node at depth t may have at most c_t = ceil(n^{φ_t} (log₂ n)^a)
children, where φ_t = δ_{t+1} − δ_t and δ_t = Δ*_H({π[0], …, π[t−1]}).
Exceeding a capacity raises TrieOverflow.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from graphs.pattern_graph import Subgraph
from kappa.union_sequence import check_sequence
from solvers.instances import InstanceList
from solvers.sort_merge_join import join_solve
from utils.errors import DomainRejection, InternalCheckError, TrieOverflow
from utils.settings import get_limit
from weightings.threshold_weighting import delta_star

logger = logging.getLogger("subgraph-trie")


def level_profile(weighting, pattern: Subgraph, order):
    """(δ_0..δ_k, φ_0..φ_{k−1}) for H under the vertex order."""
    graph = pattern.graph
    delta = [delta_star(weighting, pattern, Subgraph.vertex_only(graph, order[:t])) for t in range(len(order) + 1)]
    phi = [delta[t + 1] - delta[t] for t in range(len(order))]
    for t, value in enumerate(phi):
        if not 0 <= value <= 1:
            raise InternalCheckError(f"φ_{t} = {value} outside [0, 1] for order {tuple(order)}")
    if sum(phi, Fraction(0)) != weighting.delta(pattern):
        raise InternalCheckError(f"Σφ = {sum(phi, Fraction(0))} differs from Δ(H) = {weighting.delta(pattern)}")
    return tuple(delta), tuple(phi)


def level_capacities(n, phi, exponent):
    polylog = math.log2(n) ** exponent
    return tuple(int(math.ceil(n ** float(value) * polylog)) for value in phi)


def _children_counts(parents, parent_count):
    return np.bincount(parents, minlength=parent_count) if len(parents) else np.zeros(parent_count, dtype=np.int64)


def _prune(labels, parents):
    """Drop non-leaf nodes without children, bottom-up, reindexing parents."""
    for t in range(len(labels) - 2, -1, -1):
        keep = _children_counts(parents[t + 1], len(labels[t])) > 0
        if keep.all():
            continue
        position = np.cumsum(keep) - 1
        labels[t] = labels[t][keep]
        parents[t] = parents[t][keep]
        parents[t + 1] = position[parents[t + 1]]


@dataclass(frozen=True, eq=False)
class SubgraphTrie:
    host: object
    pattern: Subgraph
    order: Tuple[int, ...]
    labels: Tuple[np.ndarray, ...]
    parents: Tuple[np.ndarray, ...]
    delta: Tuple[Fraction, ...]
    phi: Tuple[Fraction, ...]
    capacities: Tuple[int, ...]
    exponent: float = 2

    @property
    def depth(self):
        return len(self.order)

    @property
    def node_count(self):
        return sum(len(level) for level in self.labels)

    @property
    def leaf_count(self):
        return len(self.labels[-1])

    def is_empty(self):
        return self.leaf_count == 0

    def rows(self):
        """Represented rows, columns in trie order."""
        index = np.arange(self.leaf_count)
        columns = [None] * self.depth
        for t in range(self.depth - 1, -1, -1):
            columns[t] = self.labels[t][index]
            index = self.parents[t][index]
        return np.stack(columns, axis=1).astype(np.int64) if self.depth else np.zeros((0, 0), dtype=np.int64)

    def instance_list(self) -> InstanceList:
        return InstanceList(self.pattern, self.order, self.rows()).canonical()

    def row_set(self):
        return self.instance_list().row_set()

    @classmethod
    def from_rows(cls, host, pattern: Subgraph, order, rows, vertices=None, exponent=None, step=None):
        """
        Compact an instance array into a trie.

        Args:
            rows: array whose columns follow `vertices` (default: increasing
                pattern vertex order)
            order: vertex order π of the trie
        """
        order = tuple(order)
        vertices = tuple(vertices or pattern.vertex_list())
        if sorted(order) != sorted(vertices) or sorted(order) != pattern.vertex_list():
            raise DomainRejection(f"order {order} is not a permutation of the vertices of {pattern!r}")
        if not order:
            raise DomainRejection("a trie needs at least one vertex")

        rows = np.asarray(rows, dtype=np.int64).reshape(-1, len(vertices))
        rows = rows[:, [vertices.index(v) for v in order]]
        if len(rows):
            rows = np.unique(rows, axis=0)

        labels, parents = [], []
        previous = np.zeros(len(rows), dtype=np.int64)
        for t in range(len(order)):
            if len(rows):
                changed = np.any(rows[1:, :t + 1] != rows[:-1, :t + 1], axis=1)
                starts = np.concatenate([[True], changed])
            else:
                starts = np.zeros(0, dtype=bool)
            labels.append(rows[starts, t])
            parents.append(previous[starts])
            previous = np.cumsum(starts) - 1
        return assemble(host, pattern, order, labels, parents, exponent, step)


def assemble(host, pattern, order, labels, parents, exponent=None, step=None) -> SubgraphTrie:
    """Prune, compute the level profile and enforce capacities."""
    exponent = get_limit("trie_polylog_exponent") if exponent is None else exponent
    labels = [np.asarray(x, dtype=np.int64) for x in labels]
    parents = [np.asarray(x, dtype=np.int64) for x in parents]
    _prune(labels, parents)

    delta, phi = level_profile(host.weighting, pattern, order)
    capacities = level_capacities(host.n, phi, exponent)
    for t, capacity in enumerate(capacities):
        parent_count = 1 if t == 0 else len(labels[t - 1])
        counts = _children_counts(parents[t], parent_count)
        worst = int(counts.max()) if len(counts) else 0
        if worst > capacity:
            raise TrieOverflow(level=t, count=worst, capacity=capacity, step=step)
    return SubgraphTrie(host, pattern, tuple(order), tuple(labels), tuple(parents), delta, phi, capacities, exponent)


def trie_build(host, edge: Subgraph, order=None, exponent=None, step=None) -> SubgraphTrie:
    """T(uv): first-vertex indices with a stored edge, each with its partners."""
    if edge.edge_count != 1 or edge.has_isolated_vertices():
        raise DomainRejection(f"trie_build needs a single-edge subgraph, got {edge!r}")
    block = host.edge_block(edge.edge_list()[0])
    order = tuple(order or (block.u, block.v))
    return SubgraphTrie.from_rows(host, edge, order, block.pairs, vertices=(block.u, block.v),
                                  exponent=exponent, step=step)


def _swap_levels(labels, parents, t):
    """Exchange the vertices at levels t and t + 1 in place."""
    x_of = parents[t + 1]
    grand = parents[t][x_of]
    x_labels = labels[t][x_of]
    y_labels = labels[t + 1]

    tau = np.lexsort((x_labels, y_labels, grand))
    grand, y_sorted, x_sorted = grand[tau], y_labels[tau], x_labels[tau]
    if len(tau):
        starts = np.concatenate([[True], (grand[1:] != grand[:-1]) | (y_sorted[1:] != y_sorted[:-1])])
    else:
        starts = np.zeros(0, dtype=bool)
    group = np.cumsum(starts) - 1

    labels[t], parents[t] = y_sorted[starts], grand[starts]
    labels[t + 1], parents[t + 1] = x_sorted, group

    # old level t+1 node tau[r] now sits at position r; carry the moves down
    rank = np.empty(len(tau), dtype=np.int64)
    rank[tau] = np.arange(len(tau))
    for lower in range(t + 2, len(labels)):
        moved = rank[parents[lower]]
        perm = np.argsort(moved, kind="stable")
        labels[lower], parents[lower] = labels[lower][perm], moved[perm]
        rank = np.empty(len(perm), dtype=np.int64)
        rank[perm] = np.arange(len(perm))


def trie_reorder(trie: SubgraphTrie, new_order, step=None) -> SubgraphTrie:
    """
    T(H, π′) from T(H, π) by adjacent level swaps.

    Each swap keeps φ_t + φ_{t+1} and is followed by a capacity check.
    """
    new_order = tuple(new_order)
    if sorted(new_order) != sorted(trie.order):
        raise DomainRejection(f"{new_order} is not a permutation of {trie.order}")
    if new_order == trie.order:
        return trie

    order = list(trie.order)
    labels, parents = list(trie.labels), list(trie.parents)
    current = trie
    for position, vertex in enumerate(new_order):
        at = order.index(vertex)
        while at > position:
            t = at - 1
            _swap_levels(labels, parents, t)
            order[t], order[t + 1] = order[t + 1], order[t]
            swapped = assemble(trie.host, trie.pattern, order, labels, parents, trie.exponent, step)
            if swapped.phi[t] + swapped.phi[t + 1] != current.phi[t] + current.phi[t + 1]:
                raise InternalCheckError(f"swap at level {t} changed φ_t + φ_(t+1)")
            current = swapped
            labels, parents = list(current.labels), list(current.parents)
            at -= 1
    logger.debug(f"reordered {trie.pattern!r}: {trie.order} -> {new_order}")
    return current


def _select_children(parents, parent_count, selected):
    """Nodes whose parent is in `selected`; returns (node positions, position of the parent in selected)."""
    lookup = np.full(parent_count, -1, dtype=np.int64)
    lookup[selected] = np.arange(len(selected))
    owner = lookup[parents] if len(parents) else np.zeros(0, dtype=np.int64)
    chosen = np.flatnonzero(owner >= 0)
    return chosen, owner[chosen]


def _expand_children(parents, parent_count, origins):
    """All children of each origin, repeated per origin; returns (owner, child)."""
    indptr = np.searchsorted(parents, np.arange(parent_count + 1))
    starts = indptr[origins]
    degrees = indptr[origins + 1] - starts
    total = int(degrees.sum())
    owner = np.repeat(np.arange(len(origins)), degrees)
    child = np.arange(total) - np.repeat(np.cumsum(degrees) - degrees, degrees) + np.repeat(starts, degrees)
    return owner, child


def _level_size(trie, t):
    return 1 if t < 0 else len(trie.labels[t])


def trie_merge(left: SubgraphTrie, right: SubgraphTrie, step=None) -> SubgraphTrie:
    """
    T(H ∪ H′) from T(H) and T(H′) whose orders start with V(H ∩ H′) in the
    same sequence.

    Shared levels are intersected label by label, the suffix of H is kept
    under every surviving shared path, and the suffix of H′ is appended under
    every leaf of that part.
    """
    if left.host is not right.host:
        raise DomainRejection("tries were built over different host graphs")
    shared = set(left.order) & set(right.order)
    s = len(shared)
    if left.order[:s] != right.order[:s] or set(left.order[:s]) != shared:
        raise DomainRejection(f"orders {left.order} and {right.order} do not share a common prefix of V(H ∩ H′)")

    host = left.host
    order = left.order + right.order[s:]
    labels: List[np.ndarray] = []
    parents: List[np.ndarray] = []

    pair_left = np.zeros(1, dtype=np.int64)
    pair_right = np.zeros(1, dtype=np.int64)
    for t in range(s):
        radix = host.block_sizes[order[t]]
        chosen_l, owner_l = _select_children(left.parents[t], _level_size(left, t - 1), pair_left)
        chosen_r, owner_r = _select_children(right.parents[t], _level_size(right, t - 1), pair_right)
        keys_l = owner_l * radix + left.labels[t][chosen_l]
        keys_r = owner_r * radix + right.labels[t][chosen_r]
        common, index_l, index_r = np.intersect1d(keys_l, keys_r, assume_unique=True, return_indices=True)
        labels.append(common % radix)
        parents.append(common // radix)
        pair_left, pair_right = chosen_l[index_l], chosen_r[index_r]

    frontier = pair_left
    pair_of = np.arange(len(pair_left))
    for t in range(s, left.depth):
        chosen, owner = _select_children(left.parents[t], _level_size(left, t - 1), frontier)
        labels.append(left.labels[t][chosen])
        parents.append(owner)
        pair_of = pair_of[owner]
        frontier = chosen

    origins = pair_right[pair_of]
    for t in range(s, right.depth):
        owner, child = _expand_children(right.parents[t], _level_size(right, t - 1), origins)
        labels.append(right.labels[t][child])
        parents.append(owner)
        origins = child

    merged = assemble(host, left.pattern.union(right.pattern), order, labels, parents, left.exponent, step)
    logger.debug(f"merged {left.pattern!r} and {right.pattern!r}: {merged.leaf_count} leaves")
    return merged


@dataclass
class TrieSolveResult:
    decision: Optional[bool]
    overflow: bool
    sizes: List[int]
    overflow_step: Optional[int] = None
    overflow_level: Optional[int] = None
    fell_back: bool = False
    tries: Optional[List[SubgraphTrie]] = field(default=None, repr=False)

    def to_dict(self):
        return {
            "decision": self.decision,
            "overflow": self.overflow,
            "sizes": self.sizes,
            "overflow_step": self.overflow_step,
            "overflow_level": self.overflow_level,
            "fell_back": self.fell_back,
        }


def _shared_first(trie, shared):
    return tuple(shared) + tuple(v for v in trie.order if v not in shared)


def trie_solve(host, sequence, exponent=None, fallback=True, keep_tries=False) -> TrieSolveResult:
    """
    Decide Sub_G(X) ≠ ∅ by merging tries along a union sequence.

    On overflow the result is flagged; with fallback the decision comes from
    join_solve instead.
    """
    if sequence.graph != host.pattern:
        raise DomainRejection("sequence and host graph use different patterns")
    check_sequence(sequence)

    tries: List[SubgraphTrie] = []
    sizes: List[int] = []
    try:
        for position, step in enumerate(sequence):
            if step.is_edge:
                trie = trie_build(host, step.subgraph, exponent=exponent, step=position)
            else:
                a, b = tries[step.left], tries[step.right]
                shared = sorted(set(a.order) & set(b.order))
                a = trie_reorder(a, _shared_first(a, shared), step=position)
                b = trie_reorder(b, _shared_first(b, shared), step=position)
                trie = trie_merge(a, b, step=position)
            tries.append(trie)
            sizes.append(trie.node_count)
    except TrieOverflow as overflow:
        logger.warning(f"trie overflow at step {overflow.step}, level {overflow.level}: "
                       f"{overflow.count} children over capacity {overflow.capacity}")
        decision = join_solve(host, sequence).decision if fallback else None
        return TrieSolveResult(decision, True, sizes, overflow.step, overflow.level, fallback,
                               tries if keep_tries else None)

    final = tries[-1]
    return TrieSolveResult(not final.is_empty(), False, sizes, tries=tries if keep_tries else None)
