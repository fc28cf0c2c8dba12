#!/usr/bin/env python3
# scripts/kappa/witnesses.py
"""
Constructive union sequences with checked upper bounds:

- cliques: nested vertex sets chosen by greedy vertex drops,
- hypercubes: prefix recursion over subcubes in relabelled coordinates,
- blowups: lifting a sequence for G to one for G↑q.

Every "some choice beats the average" step takes the argmax of the relevant
β surplus, ties to the smallest index.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from graphs.constructions import BlowupMap, hamming_edge_list
from graphs.pattern_graph import Subgraph, iter_bits, mask_of
from kappa.hamming_analytics import hypercube_mu
from kappa.kappa_exact import WITNESS_ONLY, KappaResult
from kappa.union_sequence import SequenceBuilder, UnionSequence, check_sequence, validate_sequence
from utils.errors import DomainRejection, InternalCheckError
from weightings.threshold_weighting import blowup_project, require_valid

logger = logging.getLogger("kappa-witness")


def _require_unit_alpha(weighting):
    if not weighting.has_unit_alpha():
        raise DomainRejection("this construction needs α ≡ 1")
    require_valid(weighting)


def clique_bound(k):
    """max_i i(k−i)/(k−1) + 1."""
    return max(Fraction(i * (k - i), k - 1) for i in range(1, k + 1)) + 1


def clique_sequence(weighting) -> UnionSequence:
    """
    Witness for K_k: all edges, then K[U_i] grown one vertex at a time.

    U_k ⊃ U_{k−1} ⊃ ... drops the vertex whose removal keeps the most β.
    """
    graph = weighting.graph
    k = graph.vertex_count
    if k < 2 or graph.edge_count != k * (k - 1) // 2:
        raise DomainRejection(f"clique_sequence needs a complete graph, got {k} vertices and {graph.edge_count} edges")
    _require_unit_alpha(weighting)

    remaining = graph.full_vertex_mask
    dropped = []
    for _ in range(k - 1):
        best, best_beta = None, None
        for x in iter_bits(remaining):
            kept = weighting.beta_of(graph.induced_edge_mask(remaining & ~(1 << x)))
            if best_beta is None or kept > best_beta:
                best, best_beta = x, kept
        dropped.append(best)
        remaining &= ~(1 << best)

    # growth order: the survivor first, then dropped vertices in reverse
    growth = [remaining.bit_length() - 1] + dropped[::-1]

    builder = SequenceBuilder(graph)
    for e in range(graph.edge_count):
        builder.add_edge(e)
    current = None
    inside = 1 << growth[0]
    for x in growth[1:]:
        cut = sorted(graph.edge_index(x, u) for u in iter_bits(inside))
        current = builder.add_edges_cumulative(cut, start=current)
        inside |= 1 << x
    sequence = builder.build()

    worst = validate_sequence(sequence, weighting)
    if worst > clique_bound(k):
        raise InternalCheckError(f"clique witness reaches Δ = {worst} above {clique_bound(k)}")
    logger.debug(f"K_{k} witness: {len(sequence)} steps, max Δ {worst}")
    return sequence


@dataclass(frozen=True)
class Frame:
    """
    Hypercube relabelling: local coordinate i is original coordinate perm[i],
    and the result is XORed with flip (original coordinates).
    """
    perm: Tuple[int, ...]
    flip: int = 0

    @classmethod
    def identity(cls, d):
        return cls(tuple(range(d)), 0)

    def _permute(self, x):
        y = 0
        for i, p in enumerate(self.perm):
            if x >> i & 1:
                y |= 1 << p
        return y

    def apply(self, x):
        return self._permute(x) ^ self.flip

    def then(self, perm, flip):
        """Frame for local x ↦ self.apply(perm(x) ^ flip)."""
        return Frame(tuple(self.perm[perm[i]] for i in range(len(perm))), self._permute(flip) ^ self.flip)


class HypercubeWitness:
    """Builds the prefix-recursion witness for a (1, β) weighting on Q_d."""

    def __init__(self, weighting):
        self.weighting = weighting
        self.graph = weighting.graph
        self.d = self.graph.vertex_count.bit_length() - 1
        self.beta_uniform = Fraction(2, self.d)
        self.builder = SequenceBuilder(self.graph)

    def _mask(self, frame, local_vertices):
        return mask_of(frame.apply(x) for x in local_vertices)

    def _surplus(self, vertex_mask):
        edges = self.graph.induced_edge_mask(vertex_mask)
        return self.weighting.beta_of(edges) - self.beta_uniform * bin(edges).count("1")

    def _cut_edges(self, inside, outside):
        cut = []
        for index, (u, v) in enumerate(self.graph.edges):
            if (inside >> u & 1 and outside >> v & 1) or (inside >> v & 1 and outside >> u & 1):
                cut.append(index)
        return cut

    def _best_split(self, frame, k, region):
        """(i, b) maximizing the surplus of region(i, b), ties to smallest (i, b)."""
        best, best_value = None, None
        for i in range(k):
            for b in (0, 1):
                value = self._surplus(self._mask(frame, region(i, b)))
                if best_value is None or value > best_value:
                    best, best_value = (i, b), value
        return best

    @staticmethod
    def _swap_to_top(k, i, b, d):
        """Relabelling that sends G(2^{k−1}) (bit k−1 clear) onto {bit i = b}."""
        perm = list(range(d))
        perm[i], perm[k - 1] = perm[k - 1], perm[i]
        return tuple(perm), b << i

    def build(self, a, k, frame, prefix):
        """Extend the step for G(a) (index prefix, None when edgeless) to G(a + 2^k)."""
        d = self.d
        prefix_mask = self._mask(frame, range(a))
        if k == 0:
            vertex = self._mask(frame, [a])
            return self.builder.add_edges_cumulative(self._cut_edges(vertex, prefix_mask), start=prefix)

        block = range(a, a + (1 << k))
        block_mask = self._mask(frame, block)
        if self._surplus(block_mask) >= 0:
            inner = frame.then(tuple(range(d)), a)
            i, b = self._best_split(inner, k, lambda i, b: [x for x in range(1 << k) if x >> i & 1 == b])
            relabelled = inner.then(*self._swap_to_top(k, i, b, d))
            half = self.build(0, k - 1, relabelled, None)
            whole = self.build(1 << (k - 1), k - 1, relabelled, half)
            joined = self.builder.add_union(prefix, whole)
            return self.builder.add_edges_cumulative(self._cut_edges(prefix_mask, block_mask), start=joined)

        i, b = self._best_split(
            frame, k, lambda i, b: list(range(a)) + [x for x in block if x >> i & 1 == b])
        relabelled = frame.then(*self._swap_to_top(k, i, b, d))
        middle = self.build(a, k - 1, relabelled, prefix)
        return self.build(a + (1 << (k - 1)), k - 1, relabelled, middle)

    def sequence(self):
        if self.d == 1:
            self.builder.add_edge(0)
        else:
            self.build(0, self.d, Frame.identity(self.d), None)
        return self.builder.build()


def hypercube_sequence(weighting) -> UnionSequence:
    """Witness for Q_d with max Δ ≤ 2μ(d)."""
    graph = weighting.graph
    v = graph.vertex_count
    d = v.bit_length() - 1
    if v < 2 or v != 1 << d or list(graph.edges) != hamming_edge_list(2, d):
        raise DomainRejection("hypercube_sequence needs Q_d in the lexicographic labelling")
    _require_unit_alpha(weighting)

    sequence = HypercubeWitness(weighting).sequence()
    worst = validate_sequence(sequence, weighting)
    bound = 2 * hypercube_mu(d)
    if worst > bound:
        raise InternalCheckError(f"hypercube witness reaches Δ = {worst} above 2μ = {bound}")
    logger.debug(f"Q_{d} witness: {len(sequence)} steps, max Δ {worst}")
    return sequence


def blowup_sequence(sequence: UnionSequence, blowup_map: BlowupMap, weighting=None) -> UnionSequence:
    """
    Lift a union sequence for G to G↑q.

    Each e↑q is built edge by edge first; every step H then becomes H↑q with
    provenance A↑q ∪ B↑q. With a weighting on G↑q the result is checked
    against max(2q, q·max Δ′) for the projected Δ′.
    """
    if sequence.graph != blowup_map.source:
        raise DomainRejection("sequence is not over the blowup source graph")
    check_sequence(sequence)

    source = blowup_map.source
    builder = SequenceBuilder(blowup_map.result)
    lifted_edges = []
    for e in range(source.edge_count):
        u, v = source.edges[e]
        mask = blowup_map.clique_edge_mask(u) | blowup_map.clique_edge_mask(v) | blowup_map.cross_edge_mask(e)
        lifted_edges.append(builder.add_edges_cumulative(list(iter_bits(mask))))

    lifted_steps = []
    for step in sequence:
        if step.is_edge:
            lifted_steps.append(lifted_edges[step.edge])
        else:
            lifted_steps.append(builder.add_union(lifted_steps[step.left], lifted_steps[step.right]))
    result = builder.build()

    if weighting is not None:
        projected = blowup_project(weighting, blowup_map)
        q = blowup_map.q
        bound = max(Fraction(2 * q), q * validate_sequence(sequence, projected))
        worst = validate_sequence(result, weighting)
        if worst > bound:
            raise InternalCheckError(f"blowup witness reaches Δ = {worst} above {bound}")
    else:
        check_sequence(result)
    return result


def kappa_witness(weighting, kind) -> KappaResult:
    """Witness-only κ upper bound from a named construction."""
    constructions = {"clique": clique_sequence, "hypercube": hypercube_sequence}
    if kind not in constructions:
        raise DomainRejection(f"unknown witness kind {kind!r}; choose from {sorted(constructions)}")
    sequence = constructions[kind](weighting)
    return KappaResult(sequence.max_delta(weighting), sequence, WITNESS_ONLY, {})
