import os
import sys
import tempfile
import unittest
from fractions import Fraction

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))

from graphs.constructions import blowup, complete_graph, cycle_graph, path_graph
from graphs.pattern_graph import Subgraph, build_pattern, iter_subgraphs
from utils.errors import InvalidWeighting
from weightings.markov import MarkovChain, from_markov, markov_decompose, random_markov_weighting
from weightings.threshold_weighting import (ThresholdWeighting, beta_uniform, blowup_project, delta_eval,
                                            delta_star, extension_table, gamma, hamming_uniform_weighting,
                                            require_valid, uniform_walk, validate)
from weightings.weighting_io import UNIFORM_WALK, format_weighting, load_weighting, parse_weighting


def random_pattern(rng, max_vertices=6, density=0.6):
    """Random pattern graph on 2..max_vertices vertices; isolated vertices allowed."""
    size = int(rng.integers(2, max_vertices + 1))
    edges = [(u, v) for u in range(size) for v in range(u + 1, size) if rng.random() < density]
    return build_pattern(size, edges or [(0, 1)])


def random_weighting(rng, graph):
    """Valid weighting from a random chain; unit α only when no vertex is isolated."""
    unit = not graph.isolated_vertices() and rng.random() < 0.5
    return random_markov_weighting(graph, rng, unit_alpha=unit)


def random_between(rng, lower, upper):
    """Random subgraph H with lower ⊆ H ⊆ upper."""
    graph = upper.graph
    vertices = lower.vertices | (int(rng.integers(0, 1 << graph.vertex_count)) & upper.vertices)
    available = graph.induced_edge_mask(vertices) & upper.edges
    edges = lower.edges | (int(rng.integers(0, 1 << max(graph.edge_count, 1))) & available)
    return Subgraph(graph, vertices, edges)


class TestThresholdWeighting(unittest.TestCase):
    """Δ evaluation, validation, Δ* and Γ"""

    def test_uniform_walk_on_triangle(self):
        graph = complete_graph(3)
        weighting = uniform_walk(graph)
        self.assertEqual(weighting.beta, (Fraction(1),) * 3)
        self.assertTrue(validate(weighting).ok)
        self.assertEqual(delta_eval(weighting, Subgraph.full(graph)), 0)
        self.assertEqual(weighting.delta(Subgraph.from_edges(graph, [0])), 1)

    def test_uniform_walk_is_always_valid(self):
        graphs = [path_graph(4), cycle_graph(5), complete_graph(5)]
        for graph in graphs:
            with self.subTest(vertices=graph.vertex_count, edges=graph.edge_count):
                weighting = uniform_walk(graph)
                self.assertTrue(validate(weighting).ok)
                for h in iter_subgraphs(graph):
                    self.assertGreaterEqual(weighting.delta(h), 0)
                self.assertEqual(beta_uniform(Subgraph.full(graph)), graph.vertex_count)

    def test_uniform_walk_needs_edges_everywhere(self):
        lonely = build_pattern(3, [(0, 1)])
        with self.assertRaises(InvalidWeighting):
            uniform_walk(lonely)

    def test_validation_failures(self):
        graph = path_graph(3)
        cases = [
            ("alpha above one", (Fraction(2), 1, 1), (Fraction(3, 2), Fraction(3, 2))),
            ("negative subgraph", (1, 1, 1), (Fraction(5, 2), Fraction(1, 2))),
            ("nonzero total", (1, 1, 1), (Fraction(1), Fraction(1))),
        ]
        for name, alpha, beta in cases:
            with self.subTest(case=name):
                weighting = ThresholdWeighting(graph, alpha, beta)
                result = validate(weighting)
                self.assertFalse(result.ok)
                self.assertIsNotNone(result.vertices)
                with self.assertRaises(InvalidWeighting):
                    require_valid(weighting)

    def test_rejects_float_and_negative_beta(self):
        graph = path_graph(2)
        with self.assertRaises(InvalidWeighting):
            ThresholdWeighting(graph, (1, 1), (2.0,))
        with self.assertRaises(InvalidWeighting):
            ThresholdWeighting(graph, (1, 1), (Fraction(-1),))
        with self.assertRaises(InvalidWeighting):
            ThresholdWeighting(graph, (1,), (Fraction(2),))

    def test_extension_table_matches_delta(self):
        graph = cycle_graph(4)
        weighting = uniform_walk(graph)
        free = list(range(graph.vertex_count))
        table, scale = extension_table(weighting, 0, free, graph.full_edge_mask)
        for mask in range(1 << graph.vertex_count):
            with self.subTest(mask=mask):
                induced = Subgraph.induced(graph, mask)
                self.assertEqual(Fraction(int(table[mask]), scale), weighting.delta(induced))

    def test_delta_star_and_gamma_on_path(self):
        graph = path_graph(3)
        weighting = uniform_walk(graph)
        first_vertex = Subgraph.vertex_only(graph, [0])
        first_edge = Subgraph.from_edges(graph, [0])
        full = Subgraph.full(graph)

        self.assertEqual(delta_star(weighting, first_edge, first_vertex), Fraction(1, 2))
        self.assertEqual(gamma(weighting, first_edge, first_vertex), first_edge)
        self.assertEqual(delta_star(weighting, full, first_vertex), 0)
        self.assertEqual(gamma(weighting, full, first_vertex), full)

    def test_gamma_is_intersection_of_minimizers(self):
        graph = complete_graph(3)
        weighting = uniform_walk(graph)
        empty = Subgraph.empty(graph)
        # both ∅ and K_3 reach Δ = 0
        self.assertEqual(delta_star(weighting, Subgraph.full(graph), empty), 0)
        self.assertEqual(gamma(weighting, Subgraph.full(graph), empty), empty)

    def test_hamming_uniform_weighting(self):
        weighting = hamming_uniform_weighting(2, 3)
        self.assertTrue(all(b == Fraction(2, 3) for b in weighting.beta))
        self.assertEqual(weighting.delta(Subgraph.full(weighting.graph)), 0)

    def test_blowup_projection(self):
        blown = blowup(path_graph(2), 2)
        projected = blowup_project(uniform_walk(blown.result), blown)
        self.assertEqual(projected.alpha, (Fraction(2, 3), Fraction(2, 3)))
        self.assertEqual(projected.beta, (Fraction(4, 3),))
        self.assertTrue(validate(projected).ok)


class TestLatticeIdentities(unittest.TestCase):
    """Randomized identities of Δ, Δ* and Γ on graphs with at most six vertices"""

    WEIGHTINGS = 250
    CASES_PER_WEIGHTING = 40

    def weighted_patterns(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(self.WEIGHTINGS):
            graph = random_pattern(rng)
            yield rng, graph, random_weighting(rng, graph)

    def test_delta_is_modular(self):
        cases = 0
        for rng, graph, weighting in self.weighted_patterns(101):
            empty, full = Subgraph.empty(graph), Subgraph.full(graph)
            for _ in range(self.CASES_PER_WEIGHTING):
                a = random_between(rng, empty, full)
                b = random_between(rng, empty, full)
                self.assertEqual(weighting.delta(a) + weighting.delta(b),
                                 weighting.delta(a.intersection(b)) + weighting.delta(a.union(b)))
                cases += 1
        self.assertGreaterEqual(cases, 10 ** 4)

    def test_gamma_properties(self):
        cases = 0
        for rng, graph, weighting in self.weighted_patterns(202):
            empty, full = Subgraph.empty(graph), Subgraph.full(graph)
            for _ in range(self.CASES_PER_WEIGHTING):
                upper = random_between(rng, empty, full)
                lower = random_between(rng, empty, upper)
                larger = random_between(rng, lower, upper)
                closure = gamma(weighting, upper, lower)

                self.assertTrue(lower.issubset(closure))
                self.assertTrue(closure.issubset(upper))
                self.assertEqual(weighting.delta(closure), delta_star(weighting, upper, lower))
                self.assertTrue(closure.issubset(gamma(weighting, upper, larger)))

                middle = random_between(rng, closure, upper)
                self.assertEqual(delta_star(weighting, middle, closure), weighting.delta(closure))
                cases += 1
        self.assertGreaterEqual(cases, 10 ** 4)

    def test_gamma_matches_enumerated_minimizers(self):
        for rng, graph, weighting in self.weighted_patterns(303):
            empty, full = Subgraph.empty(graph), Subgraph.full(graph)
            for _ in range(4):
                upper = random_between(rng, empty, full)
                if upper.edge_count > 6:
                    continue
                lower = random_between(rng, empty, upper)
                interval = list(iter_subgraphs(graph, within=upper, contains=lower))
                minimum = min(weighting.delta(h) for h in interval)
                common = Subgraph(graph, upper.vertices, upper.edges)
                for h in interval:
                    if weighting.delta(h) == minimum:
                        common = common.intersection(h)
                self.assertEqual(delta_star(weighting, upper, lower), minimum)
                self.assertEqual(gamma(weighting, upper, lower), common)

    def test_delta_star_is_supermodular(self):
        cases = 0
        for rng, graph, weighting in self.weighted_patterns(404):
            empty, full = Subgraph.empty(graph), Subgraph.full(graph)
            for _ in range(self.CASES_PER_WEIGHTING):
                a = random_between(rng, empty, full)
                b = random_between(rng, a, full)
                f = random_between(rng, b, full)
                h = random_between(rng, f, full)
                wide = delta_star(weighting, h, b) - delta_star(weighting, h, a)
                narrow = delta_star(weighting, f, b) - delta_star(weighting, f, a)
                self.assertLessEqual(wide, narrow)
                cases += 1
        self.assertGreaterEqual(cases, 10 ** 4)

    def test_delta_star_splits_across_a_union(self):
        cases = 0
        for rng, graph, weighting in self.weighted_patterns(505):
            empty, full = Subgraph.empty(graph), Subgraph.full(graph)
            for _ in range(self.CASES_PER_WEIGHTING):
                left = random_between(rng, empty, full)
                right = random_between(rng, empty, full)
                shared = left.intersection(right)
                a = random_between(rng, shared, left)
                b = random_between(rng, a, left)
                c = random_between(rng, shared, right)
                union = left.union(right)
                joined = delta_star(weighting, union, b.union(c)) - delta_star(weighting, union, a.union(c))
                self.assertEqual(joined, delta_star(weighting, left, b) - delta_star(weighting, left, a))
                cases += 1
        self.assertGreaterEqual(cases, 10 ** 4)


class TestMarkov(unittest.TestCase):
    """Markov-chain view of weightings"""

    def test_round_trip_on_random_weightings(self):
        rng = np.random.default_rng(2024)
        unit_seen = 0
        for trial in range(500):
            graph = random_pattern(rng, max_vertices=8, density=0.5)
            weighting = random_weighting(rng, graph)
            unit_seen += weighting.has_unit_alpha()
            chain = markov_decompose(weighting)
            with self.subTest(trial=trial):
                self.assertEqual(chain.flow_violations(weighting), [])
                self.assertEqual(from_markov(graph, chain), weighting)
        self.assertGreater(unit_seen, 0)

    def test_decompose_then_compose_returns_the_weighting(self):
        graphs = [complete_graph(3), path_graph(4), cycle_graph(5)]
        for graph in graphs:
            with self.subTest(vertices=graph.vertex_count, edges=graph.edge_count):
                weighting = uniform_walk(graph)
                chain = markov_decompose(weighting)
                self.assertEqual(chain.flow_violations(weighting), [])
                self.assertEqual(from_markov(graph, chain), weighting)

    def test_from_markov_on_path(self):
        graph = path_graph(3)
        half = Fraction(1, 2)
        matrix = [
            [0, half, 0],
            [1, 0, 1],
            [0, half, 0],
        ]
        self.assertEqual(from_markov(graph, matrix), uniform_walk(graph))

    def test_from_markov_rejections(self):
        graph = path_graph(3)
        half = Fraction(1, 2)
        cases = {
            "column sum": [[0, half, 0], [1, 0, 1], [0, 0, 0]],
            "non-edge": [[0, half, 1], [1, 0, 0], [0, half, 0]],
            "negative": [[0, Fraction(3, 2), 0], [1, 0, 1], [0, -half, 0]],
        }
        for name, matrix in cases.items():
            with self.subTest(case=name):
                with self.assertRaises(InvalidWeighting):
                    from_markov(graph, matrix)

    def test_random_markov_weighting_is_valid(self):
        rng = np.random.default_rng(7)
        graph = cycle_graph(5)
        for _ in range(5):
            weighting = random_markov_weighting(graph, rng)
            self.assertTrue(weighting.has_unit_alpha())
            self.assertTrue(validate(weighting).ok)

    def test_stochastic_form_of_flow(self):
        weighting = uniform_walk(complete_graph(3))
        chain = markov_decompose(weighting)
        stochastic = chain.to_stochastic()
        for v in range(3):
            self.assertEqual(sum(stochastic[u, v] for u in range(3)), 1)
        self.assertIsInstance(stochastic, MarkovChain)


class TestWeightingFormat(unittest.TestCase):
    """alpha/beta text format"""

    def test_defaults_and_round_trip(self):
        graph = path_graph(3)
        text = "c path weights\nbeta 0 1 3/2\nbeta 2 1 3/2\n"
        weighting = parse_weighting(graph, text)
        self.assertEqual(weighting, uniform_walk(graph))
        self.assertEqual(parse_weighting(graph, format_weighting(weighting)), weighting)

    def test_parse_errors(self):
        graph = path_graph(3)
        bad_texts = [
            "beta 0 2 1/2\n",
            "alpha 0 1\nalpha 0 1\n",
            "alpha 5 1\n",
            "alpha 0 x/y\n",
            "gamma 0 1\n",
        ]
        for text in bad_texts:
            with self.subTest(text=text):
                with self.assertRaises(InvalidWeighting):
                    parse_weighting(graph, text)

    def test_load_weighting(self):
        graph = complete_graph(3)
        self.assertEqual(load_weighting(graph, UNIFORM_WALK), uniform_walk(graph))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "w.txt")
            with open(path, "w") as f:
                f.write(format_weighting(uniform_walk(graph)))
            self.assertEqual(load_weighting(graph, path), uniform_walk(graph))
            with self.assertRaises(InvalidWeighting):
                load_weighting(graph, os.path.join(tmp, "missing.txt"))


if __name__ == '__main__':
    unittest.main()
