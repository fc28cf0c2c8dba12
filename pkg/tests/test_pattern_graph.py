import os
import sys
import tempfile
import unittest
from fractions import Fraction

import networkx as nx
import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'scripts'))

from graphs.constructions import (blowup, complete_graph, cycle_graph, hamming, hamming_edge_list, hypercube,
                                  path_graph)
from graphs.hypercube import (hamming_embed, hypercube_mu_closed_form, hypercube_prefix_boundaries,
                              hypercube_prefix_boundary)
from graphs.pattern_graph import Subgraph, build_pattern, combine, iter_submasks, iter_subgraphs, popcount
from graphs.pattern_io import format_pattern, load_pattern, parse_pattern, pattern_hash
from kappa.hamming_analytics import hypercube_mu
from utils.errors import DomainRejection, GraphFormatError


class TestPatternGraph(unittest.TestCase):
    """Pattern graph construction and the subgraph lattice"""

    def test_edge_indices_follow_input_order(self):
        graph = build_pattern(3, [(2, 1), (0, 1)])
        self.assertEqual(graph.edges, ((1, 2), (0, 1)))
        self.assertEqual(graph.edge_index(1, 2), 0)
        self.assertEqual(graph.edge_index(1, 0), 1)
        self.assertIsNone(graph.edge_index(0, 2))

    def test_rejects_malformed_edges(self):
        bad_inputs = [
            (3, [(0, 0)]),
            (3, [(0, 3)]),
            (3, [(0, 1), (1, 0)]),
            (-1, []),
        ]
        for vertex_count, edges in bad_inputs:
            with self.subTest(vertex_count=vertex_count, edges=edges):
                with self.assertRaises(GraphFormatError):
                    build_pattern(vertex_count, edges)

    def test_vertex_cap(self):
        with self.assertRaises(GraphFormatError):
            build_pattern(5, [], vertex_cap=4)

    def test_subgraph_needs_edge_endpoints(self):
        graph = path_graph(3)
        with self.assertRaises(DomainRejection):
            Subgraph(graph, 0b001, 0b01)

    def test_isolated_vertices_and_labels(self):
        graph = path_graph(3)
        edge = Subgraph.from_edges(graph, [0])
        self.assertEqual(edge.label(), "v0.1|e0")
        self.assertFalse(edge.has_isolated_vertices())
        padded = Subgraph.from_edges(graph, [0], extra_vertices=[2])
        self.assertTrue(padded.has_isolated_vertices())
        self.assertEqual(padded.vertex_count, 3)
        self.assertEqual(padded.edge_count, 1)

    def test_union_and_intersection(self):
        graph = complete_graph(3)
        a = Subgraph.from_edges(graph, [0])
        b = Subgraph.from_edges(graph, [1])
        self.assertEqual(combine(a, b).edge_count, 2)
        self.assertEqual(a.intersection(b).edge_count, 0)
        self.assertEqual(a.intersection(b).vertex_count, 1)
        self.assertTrue(a.issubset(a.union(b)))

    def test_induced(self):
        graph = complete_graph(4)
        induced = Subgraph.induced(graph, [0, 1, 2])
        self.assertEqual(induced.edge_count, 3)

    def test_submask_enumeration(self):
        masks = list(iter_submasks(0b1010))
        self.assertEqual(masks, [0b0000, 0b0010, 0b1000, 0b1010])

    def test_lattice_sizes(self):
        # a triangle has 18 subgraphs including the empty one
        graph = complete_graph(3)
        self.assertEqual(sum(1 for _ in iter_subgraphs(graph)), 18)
        edge = Subgraph.from_edges(graph, [0])
        above = list(iter_subgraphs(graph, contains=edge))
        self.assertTrue(all(edge.issubset(h) for h in above))
        small = list(iter_subgraphs(graph, max_vertices=1))
        self.assertEqual(len(small), 4)

    def test_networkx_view(self):
        nx_graph = cycle_graph(5).to_networkx()
        self.assertEqual(nx_graph.number_of_edges(), 5)
        self.assertTrue(all(d == 2 for _, d in nx_graph.degree()))

    def test_hamming_matches_networkx_products(self):
        self.assertTrue(nx.is_isomorphic(hamming(2, 3).to_networkx(), nx.hypercube_graph(3)))
        rook = nx.cartesian_product(nx.complete_graph(3), nx.complete_graph(3))
        self.assertTrue(nx.is_isomorphic(hamming(3, 2).to_networkx(), rook))
        self.assertTrue(nx.is_connected(hypercube(4).to_networkx()))


class TestConstructions(unittest.TestCase):
    """Named graphs, Hamming graphs and blowups"""

    def test_hamming_sizes(self):
        cases = [(2, 1, 2, 1), (2, 3, 8, 12), (3, 2, 9, 18), (4, 2, 16, 48)]
        for q, d, vertices, edges in cases:
            with self.subTest(q=q, d=d):
                graph = hamming(q, d)
                self.assertEqual(graph.vertex_count, vertices)
                self.assertEqual(graph.edge_count, edges)
                self.assertTrue(all(deg == d * (q - 1) for deg in graph.degree))

    def test_hamming_cap(self):
        with self.assertRaises(DomainRejection):
            hamming(2, 6, vertex_cap=32)

    def test_blowup(self):
        result = blowup(path_graph(2), 2)
        self.assertEqual(result.result.vertex_count, 4)
        # every pair of the four copies is adjacent
        self.assertEqual(result.result.edge_count, 6)
        lifted = result.lift(Subgraph.from_edges(path_graph(2), [0]))
        self.assertEqual(lifted, Subgraph.full(result.result))

    def test_hypercube_prefix_boundaries(self):
        d = 4
        graph = hypercube(d)
        scan = hypercube_prefix_boundaries(d)
        for a in range(2 ** d + 1):
            with self.subTest(a=a):
                inside = (1 << a) - 1
                cut = sum(1 for u, v in graph.edges if (inside >> u & 1) != (inside >> v & 1))
                self.assertEqual(hypercube_prefix_boundary(d, a), cut)
                self.assertEqual(int(scan[a]), cut)

    def test_mu_closed_form(self):
        for d in range(1, 21):
            with self.subTest(d=d):
                closed = hypercube_mu_closed_form(d)
                self.assertEqual(int(hypercube_prefix_boundaries(d).max()), closed)
                self.assertEqual(closed, 2 ** (d + 1) // 3)
                self.assertEqual(hypercube_mu(d), Fraction(closed, d))

    def test_prefix_scan_matches_counted_cuts(self):
        for d in range(1, 11):
            with self.subTest(d=d):
                edges = np.array(hamming_edge_list(2, d), dtype=np.int64)
                prefixes = np.arange(2 ** d + 1)[:, None]
                cuts = ((edges[:, 0] < prefixes) != (edges[:, 1] < prefixes)).sum(axis=1)
                np.testing.assert_array_equal(hypercube_prefix_boundaries(d), cuts)

    def test_hamming_embedding(self):
        embedding = hamming_embed(4, 2)
        self.assertEqual(len(set(embedding.mapping)), 16)
        self.assertEqual(embedding.target.result.vertex_count, 16)
        with self.assertRaises(DomainRejection):
            hamming_embed(3, 2)


class TestPatternFormat(unittest.TestCase):
    """p/e text format"""

    def test_parse_with_comments(self):
        text = "c triangle\np 3 3\ne 0 1\n\ne 1 2\ne 0 2\n"
        graph = parse_pattern(text)
        self.assertEqual(graph, complete_graph(3))
        self.assertEqual(parse_pattern(format_pattern(graph)), graph)

    def test_parse_errors(self):
        bad_texts = [
            "",
            "e 0 1\n",
            "p 3 2\ne 0 1\n",
            "p 3 1\ne 0 1\ne 1 2\n",
            "p 3 1\ne 0 x\n",
            "p 2 1\ne 0 1\nq\n",
        ]
        for text in bad_texts:
            with self.subTest(text=text):
                with self.assertRaises(GraphFormatError):
                    parse_pattern(text)

    def test_load_and_hash(self):
        graph = path_graph(4)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "p4.txt")
            with open(path, "w") as f:
                f.write(format_pattern(graph))
            self.assertEqual(load_pattern(path), graph)
            with self.assertRaises(GraphFormatError):
                load_pattern(os.path.join(tmp, "missing.txt"))
        self.assertEqual(pattern_hash(graph), pattern_hash(path_graph(4)))
        self.assertNotEqual(pattern_hash(graph), pattern_hash(cycle_graph(4)))
        self.assertEqual(popcount(0b1011), 3)


if __name__ == '__main__':
    unittest.main()
