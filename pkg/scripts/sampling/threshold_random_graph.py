#!/usr/bin/env python3
# scripts/sampling/threshold_random_graph.py
"""
Seeded sampling of threshold random graphs X_Δ(n).

Pattern vertex u gets a block of m_u = max(1, round(n^{α(u)})) host vertices.
For each pattern edge uv every pair (i, j) ∈ [m_u]×[m_v] is present
independently with probability n^{−β(uv)}.

Each pattern edge draws from its own Philox stream keyed by (seed, edge id).
Block pairs up to `dense_pair_limit` consume one uniform per pair at counter
position i·m_v + j; larger pairs draw a binomial count and a uniform subset
from the same stream. Both give the same distribution, and neither depends on
the order in which edges are sampled. Results are bit-identical for a given
numpy release.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from graphs.pattern_graph import Subgraph, iter_bits
from graphs.pattern_io import pattern_hash
from utils.errors import CapacityExceeded, DomainRejection, GraphFormatError
from utils.settings import get_limit
from weightings.threshold_weighting import ThresholdWeighting, require_valid

logger = logging.getLogger("threshold-sampler")

SEED_MASK = (1 << 64) - 1


def block_size(n, alpha):
    return max(1, int(round(n ** float(alpha))))


def block_sizes(weighting, n):
    return tuple(block_size(n, a) for a in weighting.alpha)


def edge_probability(n, beta):
    return n ** (-float(beta))


def edge_generator(seed, edge_index):
    sequence = np.random.SeedSequence([int(seed) & SEED_MASK, int(edge_index)])
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True, eq=False)
class EdgeBlock:
    """Host edges between the blocks of pattern vertices u < v."""
    edge_index: int
    u: int
    v: int
    rows: int
    cols: int
    pairs: np.ndarray

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        codes = pairs[:, 0] * self.cols + pairs[:, 1]
        order = np.argsort(codes, kind="stable")
        pairs, codes = pairs[order], codes[order]
        if len(codes) and (np.any(np.diff(codes) == 0)):
            raise DomainRejection(f"duplicate host edge in block of pattern edge {self.edge_index}")
        if len(pairs) and (pairs.min() < 0 or pairs[:, 0].max() >= self.rows or pairs[:, 1].max() >= self.cols):
            raise DomainRejection(f"host edge outside the blocks of pattern edge {self.edge_index}")

        reverse = np.lexsort((pairs[:, 0], pairs[:, 1]))
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "forward_indptr", np.searchsorted(pairs[:, 0], np.arange(self.rows + 1)))
        object.__setattr__(self, "reverse_pairs", pairs[reverse])
        object.__setattr__(self, "reverse_indptr",
                           np.searchsorted(pairs[reverse][:, 1], np.arange(self.cols + 1)))

    @property
    def count(self):
        return len(self.pairs)

    def has_edges(self, i, j):
        """Vectorized membership of (i, j) pairs, i on the u side."""
        queries = np.asarray(i, dtype=np.int64) * self.cols + np.asarray(j, dtype=np.int64)
        if not len(self.codes):
            return np.zeros(queries.shape, dtype=bool)
        positions = np.clip(np.searchsorted(self.codes, queries), 0, len(self.codes) - 1)
        return self.codes[positions] == queries

    def has_edge(self, i, j):
        return bool(self.has_edges(np.array([i]), np.array([j]))[0])

    def neighbours(self, vertex, index):
        """Partners of host vertex `index` in the block of pattern vertex `vertex`."""
        if vertex == self.u:
            return self.pairs[self.forward_indptr[index]:self.forward_indptr[index + 1], 1]
        return self.reverse_pairs[self.reverse_indptr[index]:self.reverse_indptr[index + 1], 0]

    def expand(self, vertex, indices):
        """
        Partners of many host vertices at once.

        Returns:
            (owner, partner): owner[k] is the position in `indices` whose
            neighbour list produced partner[k]
        """
        indices = np.asarray(indices, dtype=np.int64)
        if vertex == self.u:
            indptr, column = self.forward_indptr, self.pairs[:, 1]
        else:
            indptr, column = self.reverse_indptr, self.reverse_pairs[:, 0]
        starts = indptr[indices]
        degrees = indptr[indices + 1] - starts
        total = int(degrees.sum())
        owner = np.repeat(np.arange(len(indices)), degrees)
        offsets = np.arange(total) - np.repeat(np.cumsum(degrees) - degrees, degrees) + np.repeat(starts, degrees)
        return owner, column[offsets]

    def adjacency(self):
        """Dense boolean bitset view of the block pair."""
        matrix = np.zeros((self.rows, self.cols), dtype=bool)
        matrix[self.pairs[:, 0], self.pairs[:, 1]] = True
        return matrix


@dataclass(frozen=True, eq=False)
class ColoredHostGraph:
    weighting: ThresholdWeighting
    n: int
    seed: int
    block_sizes: Tuple[int, ...]
    blocks: Tuple[EdgeBlock, ...]

    @property
    def pattern(self):
        return self.weighting.graph

    def edge_block(self, edge_index) -> EdgeBlock:
        return self.blocks[edge_index]

    def block_between(self, u, v) -> Optional[EdgeBlock]:
        index = self.pattern.edge_index(u, v)
        return None if index is None else self.blocks[index]

    def edge_count(self):
        return sum(block.count for block in self.blocks)

    def fingerprint(self):
        """Tuple of per-block pair arrays as bytes, for determinism checks."""
        return tuple(block.pairs.tobytes() for block in self.blocks)


def _sample_block(weighting, n, seed, sizes, edge_index, dense_pair_limit):
    u, v = weighting.graph.edges[edge_index]
    rows, cols = sizes[u], sizes[v]
    total = rows * cols
    probability = edge_probability(n, weighting.beta[edge_index])
    generator = edge_generator(seed, edge_index)

    if probability >= 1.0:
        chosen = np.arange(total, dtype=np.int64)
    elif total <= dense_pair_limit:
        chosen = np.flatnonzero(generator.random(total) < probability)
    else:
        count = int(generator.binomial(total, probability))
        chosen = np.sort(generator.choice(total, size=count, replace=False)).astype(np.int64)

    pairs = np.stack([chosen // cols, chosen % cols], axis=1)
    return EdgeBlock(edge_index, u, v, rows, cols, pairs)


def sample(weighting, n, seed, vertex_budget=None, dense_pair_limit=None, max_workers=1) -> ColoredHostGraph:
    """
    Draw X_Δ(n) for a valid weighting.

    Args:
        weighting: ThresholdWeighting in θ(G)
        n: scale, at least 2
        seed: 64-bit integer seed
        vertex_budget: cap on Σ m_u (default from settings)
        dense_pair_limit: largest block pair sampled pair by pair
        max_workers: threads used across pattern edges

    Returns:
        ColoredHostGraph
    """
    if n < 2:
        raise DomainRejection(f"n must be at least 2, got {n}")
    require_valid(weighting)
    vertex_budget = vertex_budget or get_limit("sample_vertex_budget")
    dense_pair_limit = dense_pair_limit or get_limit("dense_pair_limit")

    sizes = block_sizes(weighting, n)
    if sum(sizes) > vertex_budget:
        raise CapacityExceeded(f"{sum(sizes)} host vertices exceed the budget {vertex_budget}", limit=vertex_budget)

    def work(edge_index):
        return _sample_block(weighting, n, seed, sizes, edge_index, dense_pair_limit)

    edge_ids = range(weighting.graph.edge_count)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            blocks = tuple(pool.map(work, edge_ids))
    else:
        blocks = tuple(work(e) for e in edge_ids)

    host = ColoredHostGraph(weighting, n, seed, sizes, blocks)
    logger.debug(f"Sampled n={n} seed={seed}: blocks {sizes}, {host.edge_count()} edges")
    return host


@dataclass(frozen=True)
class ExpectedCount:
    realized: float
    idealized: float


def expected_count(weighting, subgraph: Subgraph, n, sizes=None) -> ExpectedCount:
    """E|Sub_H(X)| = Π m_u · Π n^{−β(e)}, plus the idealized n^{Δ(H)}."""
    sizes = sizes or block_sizes(weighting, n)
    realized = 1.0
    for u in iter_bits(subgraph.vertices):
        realized *= sizes[u]
    for e in iter_bits(subgraph.edges):
        realized *= edge_probability(n, weighting.beta[e])
    return ExpectedCount(realized, float(n) ** float(weighting.delta(subgraph)))


def dump_host(host: ColoredHostGraph):
    lines = [f"x {pattern_hash(host.pattern)} {host.n} {host.seed}"]
    for block in host.blocks:
        lines.append(f"b {block.u} {block.v} {block.count}")
        lines.extend(f"{i} {j}" for i, j in block.pairs.tolist())
    return "\n".join(lines) + "\n"


def _integers(tokens, line):
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise GraphFormatError(f"non-integer token in {line!r}")


def _pair(row):
    tokens = row.split()
    if len(tokens) != 2:
        raise GraphFormatError(f"expected an '<i> <j>' pair, got {row!r}")
    return _integers(tokens, row)


def parse_host(text, weighting) -> ColoredHostGraph:
    """Inverse of dump_host; block sizes are recomputed from the weighting and n."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("x "):
        raise GraphFormatError("host dump must start with 'x <hash> <n> <seed>'")
    header = lines[0].split()
    if len(header) != 4:
        raise GraphFormatError(f"bad host header {lines[0]!r}")
    if header[1] != pattern_hash(weighting.graph):
        raise GraphFormatError("host dump was produced for a different pattern graph")
    n, seed = _integers(header[2:], lines[0])
    sizes = block_sizes(weighting, n)

    graph = weighting.graph
    blocks = {}
    position = 1
    while position < len(lines):
        tokens = lines[position].split()
        if tokens[0] != "b" or len(tokens) != 4:
            raise GraphFormatError(f"expected a 'b <u> <v> <count>' line, got {lines[position]!r}")
        u, v, count = _integers(tokens[1:], lines[position])
        index = graph.edge_index(u, v)
        if index is None or index in blocks:
            raise GraphFormatError(f"block ({u},{v}) is not a new pattern edge")
        rows = lines[position + 1:position + 1 + count]
        if len(rows) != count:
            raise GraphFormatError(f"block ({u},{v}) declares {count} pairs but the dump ends early")
        pairs = np.array([_pair(row) for row in rows], dtype=np.int64).reshape(-1, 2)
        a, b = graph.edges[index]
        blocks[index] = EdgeBlock(index, a, b, sizes[a], sizes[b], pairs)
        position += 1 + count

    if len(blocks) != graph.edge_count:
        raise GraphFormatError(f"dump holds {len(blocks)} of {graph.edge_count} blocks")
    return ColoredHostGraph(weighting, n, seed, sizes, tuple(blocks[e] for e in range(graph.edge_count)))
