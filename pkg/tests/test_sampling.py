import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))

from graphs.constructions import complete_graph, path_graph
from graphs.pattern_graph import Subgraph, iter_subgraphs
from graphs.pattern_io import pattern_hash
from sampling.threshold_random_graph import (EdgeBlock, block_size, block_sizes, dump_host, edge_probability,
                                             expected_count, parse_host, sample)
from solvers.instances import count_instances
from utils.errors import CapacityExceeded, DomainRejection, GraphFormatError
from weightings.threshold_weighting import ThresholdWeighting, uniform_walk


def triangle_with_free_edge():
    """K_3 whose edge 01 has β = 0, so its block pair is complete."""
    half = Fraction(3, 2)
    return ThresholdWeighting(complete_graph(3), (1, 1, 1), (Fraction(0), half, half))


class TestBlockSizes:
    """m_u = max(1, round(n^α(u))) and p = n^−β"""

    def test_block_size(self):
        assert block_size(100, Fraction(1)) == 100
        assert block_size(100, Fraction(1, 2)) == 10
        assert block_size(2, Fraction(0)) == 1
        assert block_size(10, Fraction(0)) == 1

    def test_block_sizes_follow_alpha(self):
        weighting = ThresholdWeighting(path_graph(2), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1),))
        assert block_sizes(weighting, 64) == (8, 8)

    def test_edge_probability(self):
        assert edge_probability(100, Fraction(0)) == 1.0
        assert edge_probability(100, Fraction(1, 2)) == pytest.approx(0.1)


class TestSample:
    """Seeded sampling of X_Δ(n)"""

    def test_same_seed_same_graph(self):
        weighting = uniform_walk(complete_graph(3))
        first = sample(weighting, 60, 42)
        second = sample(weighting, 60, 42)
        assert first.fingerprint() == second.fingerprint()
        assert first.block_sizes == (60, 60, 60)

    def test_different_seed_different_graph(self):
        weighting = uniform_walk(complete_graph(3))
        assert sample(weighting, 60, 1).fingerprint() != sample(weighting, 60, 2).fingerprint()

    def test_threads_do_not_change_the_result(self):
        weighting = uniform_walk(complete_graph(4))
        assert sample(weighting, 40, 9, max_workers=3).fingerprint() == sample(weighting, 40, 9).fingerprint()

    def test_zero_beta_gives_complete_block(self):
        host = sample(triangle_with_free_edge(), 10, 3)
        block = host.edge_block(0)
        assert block.count == 100
        assert block.adjacency().all()

    @pytest.mark.parametrize("dense_pair_limit", [1, 4_000_000])
    def test_edge_count_near_expectation(self, dense_pair_limit):
        weighting = uniform_walk(complete_graph(3))
        host = sample(weighting, 400, 17, dense_pair_limit=dense_pair_limit)
        for block in host.blocks:
            # mean 400, standard deviation about 20
            assert 250 < block.count < 550

    def test_rejections(self):
        weighting = uniform_walk(complete_graph(3))
        with pytest.raises(DomainRejection):
            sample(weighting, 1, 0)
        with pytest.raises(CapacityExceeded):
            sample(weighting, 100, 0, vertex_budget=50)
        invalid = ThresholdWeighting(path_graph(3), (1, 1, 1), (Fraction(1), Fraction(1)))
        with pytest.raises(DomainRejection):
            sample(invalid, 10, 0)


class TestExpectedCount:
    """E|Sub_H(X)| against n^Δ(H)"""

    def test_edge_of_path(self):
        weighting = uniform_walk(path_graph(3))
        edge = Subgraph.from_edges(weighting.graph, [0])
        expected = expected_count(weighting, edge, 100)
        assert expected.realized == pytest.approx(10.0)
        assert expected.idealized == pytest.approx(10.0)

    def test_empty_subgraph(self):
        weighting = uniform_walk(complete_graph(3))
        expected = expected_count(weighting, Subgraph.empty(weighting.graph), 50)
        assert expected.realized == 1.0
        assert expected.idealized == 1.0

    def test_rounded_block_sizes(self):
        weighting = ThresholdWeighting(path_graph(2), (Fraction(1, 2), Fraction(1, 2)), (Fraction(1),))
        expected = expected_count(weighting, Subgraph.vertex_only(weighting.graph, [0]), 50)
        assert expected.realized == 7.0
        assert expected.idealized == pytest.approx(50 ** 0.5)


def pair_set(block):
    return {tuple(pair) for pair in block.pairs.tolist()}


class TestCoupling:
    """Same seed and n: lowering β on an edge only adds pairs to its block"""

    def weightings(self):
        graph = complete_graph(3)
        lowered = ThresholdWeighting(graph, (1, 1, 1), (Fraction(1, 2), Fraction(5, 4), Fraction(5, 4)))
        return [uniform_walk(graph), lowered, triangle_with_free_edge()]

    def test_blocks_are_nested(self):
        chain = self.weightings()
        for seed in range(10):
            hosts = [sample(weighting, 50, seed) for weighting in chain]
            first, second, third = ([pair_set(host.edge_block(e)) for host in hosts] for e in range(3))
            # β on edge 0 falls along the chain, β on edges 1 and 2 rises
            assert first[0] <= first[1] <= first[2]
            assert second[2] <= second[1] <= second[0]
            assert third[2] <= third[1] <= third[0]

    def test_expected_counts_follow_beta(self):
        chain = self.weightings()
        graph = chain[0].graph
        for e, falling in [(0, True), (1, False), (2, False)]:
            edge = Subgraph.from_edges(graph, [e])
            values = [expected_count(weighting, edge, 50).realized for weighting in chain]
            assert values == sorted(values, reverse=not falling)

    def test_mean_count_matches_expectation(self):
        weighting = uniform_walk(complete_graph(3))
        graph = weighting.graph
        n, trials = 30, 200
        subgraphs = [h for h in iter_subgraphs(graph) if h.edge_count]
        counts = np.zeros((trials, len(subgraphs)))
        for seed in range(trials):
            host = sample(weighting, n, seed)
            counts[seed] = [count_instances(host, h) for h in subgraphs]
        means = counts.mean(axis=0)
        errors = counts.std(axis=0, ddof=1) / np.sqrt(trials)
        for h, mean, error in zip(subgraphs, means, errors):
            expected = expected_count(weighting, h, n).realized
            assert abs(mean - expected) <= 5 * error, (h, mean, expected)


class TestEdgeBlock:
    """Sorted block storage and lookups"""

    def setup_method(self):
        pairs = np.array([[2, 0], [0, 1], [0, 2], [1, 1]])
        self.block = EdgeBlock(0, 0, 1, 3, 3, pairs)

    def test_pairs_are_sorted(self):
        assert self.block.pairs.tolist() == [[0, 1], [0, 2], [1, 1], [2, 0]]

    def test_membership(self):
        assert self.block.has_edge(0, 2)
        assert not self.block.has_edge(2, 2)
        found = self.block.has_edges(np.array([0, 1, 2]), np.array([0, 1, 0]))
        assert found.tolist() == [False, True, True]

    def test_neighbours_both_sides(self):
        assert self.block.neighbours(0, 0).tolist() == [1, 2]
        assert self.block.neighbours(1, 1).tolist() == [0, 1]
        assert self.block.neighbours(1, 0).tolist() == [2]

    def test_expand(self):
        owner, partner = self.block.expand(0, [0, 2, 1])
        assert owner.tolist() == [0, 0, 1, 2]
        assert partner.tolist() == [1, 2, 0, 1]

    def test_rejects_bad_pairs(self):
        with pytest.raises(DomainRejection):
            EdgeBlock(0, 0, 1, 2, 2, np.array([[0, 1], [0, 1]]))
        with pytest.raises(DomainRejection):
            EdgeBlock(0, 0, 1, 2, 2, np.array([[0, 2]]))


class TestHostDump:
    """Text dump of a sampled host graph"""

    def test_round_trip(self):
        weighting = uniform_walk(complete_graph(3))
        host = sample(weighting, 30, 5)
        parsed = parse_host(dump_host(host), weighting)
        assert parsed.fingerprint() == host.fingerprint()
        assert (parsed.n, parsed.seed) == (30, 5)
        assert dump_host(parsed) == dump_host(host)

    def test_rejects_other_patterns_and_truncation(self):
        weighting = uniform_walk(complete_graph(3))
        text = dump_host(sample(weighting, 20, 5))
        with pytest.raises(GraphFormatError):
            parse_host(text, uniform_walk(path_graph(3)))
        with pytest.raises(GraphFormatError):
            parse_host("b 0 1 0\n", weighting)
        first_block_only = text.split("\nb 0 2")[0] + "\n"
        with pytest.raises(GraphFormatError):
            parse_host(first_block_only, weighting)

    def test_rejects_malformed_tokens(self):
        weighting = uniform_walk(path_graph(2))
        header = f"x {pattern_hash(weighting.graph)} 4 1\n"
        bad_texts = {
            "pair token": header + "b 0 1 1\n0 x\n",
            "fractional pair": header + "b 0 1 1\n1.5 0\n",
            "three tokens": header + "b 0 1 2\n0 1 2\n1 0\n",
            "one token": header + "b 0 1 1\n3\n",
            "block count": header + "b 0 1 one\n",
            "header n": f"x {pattern_hash(weighting.graph)} four 1\nb 0 1 0\n",
        }
        for name, text in bad_texts.items():
            with pytest.raises(GraphFormatError):
                parse_host(text, weighting)
        parsed = parse_host(header + "b 0 1 2\n0 1\n3 3\n", weighting)
        assert parsed.edge_block(0).pairs.tolist() == [[0, 1], [3, 3]]
