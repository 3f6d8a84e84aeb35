import unittest
import os
import random
import sys
from fractions import Fraction

import networkx as nx

# Add parent directory to path so we can import our modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import GraphValidationError
from graph_core import (MetricGraph, blow_up_vertex, bridges, contract_edge, contract_edges,
                        enumerate_cycles, genus, graph_from_dict, graph_to_dict, normalize,
                        separating_pairs, systole, validate_outer)
from graph_corpus import (CURATED, banana, chain_of_loops, cycle_graph, dumbbell, k4, looped_banana,
                          path_of_two_thetas, random_graph, rose, theta)


class TestMetricGraph(unittest.TestCase):
    """Test cases for MetricGraph construction"""

    def test_build_assigns_dense_ids(self):
        """Test that build numbers edges in input order"""
        g = MetricGraph.build(2, [(0, 1, 1), (1, 0, 2)])
        self.assertEqual([e.id for e in g.edges], [0, 1])
        self.assertEqual(g.incidences, ((0, 1), (1, 0)))
        self.assertEqual(g.total_length, 3)

    def test_rejects_missing_vertex(self):
        """Test that an edge to a missing vertex is rejected"""
        with self.assertRaises(GraphValidationError):
            MetricGraph.build(2, [(0, 2, 1)])

    def test_rejects_negative_length(self):
        """Test that negative lengths are rejected"""
        with self.assertRaises(GraphValidationError):
            MetricGraph.build(1, [(0, 0, -1)])

    def test_valence_counts_loops_twice(self):
        """Test loop ends counting twice toward valence"""
        g = rose(Fraction(1, 2), Fraction(1, 2))
        self.assertEqual(g.valence(0), 4)

    def test_json_round_trip_exact(self):
        """Test that exact graphs survive a JSON round trip"""
        g = theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))
        data = graph_to_dict(g)
        self.assertEqual(data['edges'][1]['length'], '3/10')
        self.assertEqual(graph_from_dict(data, exact=True), g)

    def test_json_exact_decimal_strings(self):
        """Test that decimal strings parse to exact fractions"""
        data = {'vertices': 1, 'edges': [{'id': 0, 'src': 0, 'dst': 0, 'length': '0.1'}]}
        g = graph_from_dict(data, exact=True)
        self.assertEqual(g.edges[0].length, Fraction(1, 10))

    def test_json_malformed(self):
        """Test that a missing key is a validation error"""
        with self.assertRaises(GraphValidationError):
            graph_from_dict({'vertices': 1})


class TestGraphQueries(unittest.TestCase):
    """Test cases for validity, genus, bridges and separating pairs"""

    def test_theta_is_outer_space_point(self):
        """Test the outer-space conditions on theta"""
        report = validate_outer(theta())
        self.assertTrue(report.is_outer_space_point)
        self.assertEqual(report.min_valence, 3)

    def test_dumbbell_has_separating_edge(self):
        """Test that the dumbbell bridge fails validation"""
        report = validate_outer(dumbbell())
        self.assertFalse(report.is_outer_space_point)
        self.assertEqual(report.separating_edges, frozenset({1}))

    def test_banana_low_valence(self):
        """Test that a two-edge banana has valence-2 vertices"""
        report = validate_outer(banana())
        self.assertFalse(report.is_outer_space_point)
        self.assertEqual(report.min_valence, 2)

    def test_disconnected(self):
        """Test that disconnected graphs are reported"""
        g = MetricGraph.build(2, [(0, 0, 1), (1, 1, 1)])
        self.assertFalse(validate_outer(g).is_connected)
        with self.assertRaises(GraphValidationError):
            genus(g)

    def test_genus(self):
        """Test the first Betti number on curated graphs"""
        self.assertEqual(genus(theta()), 2)
        self.assertEqual(genus(k4()), 3)
        self.assertEqual(genus(rose(1, 1, 1)), 3)
        self.assertEqual(genus(looped_banana()), 3)

    def test_bridges(self):
        """Test bridge detection ignores loops and parallel edges"""
        self.assertEqual(bridges(theta()), frozenset())
        self.assertEqual(bridges(dumbbell()), frozenset({1}))
        self.assertEqual(bridges(chain_of_loops(3)), frozenset({3, 4}))
        self.assertEqual(bridges(path_of_two_thetas()), frozenset({6}))

    def test_separating_pairs(self):
        """Test separating pairs on theta, banana and looped banana"""
        self.assertEqual(separating_pairs(theta()), frozenset())
        self.assertEqual(separating_pairs(banana()), frozenset({frozenset({0, 1})}))
        self.assertEqual(separating_pairs(looped_banana()), frozenset({frozenset({2, 3})}))
        self.assertEqual(separating_pairs(k4()), frozenset())

    def test_separating_pairs_need_bridgeless(self):
        """Test that separating pairs refuse graphs with bridges"""
        with self.assertRaises(GraphValidationError):
            separating_pairs(dumbbell())


class TestContractionAndBlowUp(unittest.TestCase):
    """Test cases for edge contraction and vertex blow-up"""

    def test_contract_theta_edge(self):
        """Test contracting a theta edge gives a two-petal rose"""
        contracted, mapping = contract_edge(theta(), 0)
        self.assertEqual(contracted.vertex_count, 1)
        self.assertEqual(mapping, {1: 0, 2: 1})
        self.assertTrue(all(e.is_loop for e in contracted.edges))
        self.assertEqual(genus(contracted), 2)

    def test_contract_loop_rejected(self):
        """Test that loops cannot be contracted"""
        with self.assertRaises(GraphValidationError):
            contract_edge(rose(1, 1), 0)

    def test_contract_edges_composes_mapping(self):
        """Test contracting two K4 edges of a spanning forest"""
        contracted, mapping = contract_edges(k4(), [0, 5])
        self.assertEqual(contracted.vertex_count, 2)
        self.assertEqual(sorted(mapping), [1, 2, 3, 4])
        self.assertEqual(sorted(mapping.values()), [0, 1, 2, 3])

    def test_blow_up_inverts_contraction(self):
        """Test that contracting the new edge of a blow-up restores the graph"""
        g = rose(Fraction(1, 2), Fraction(1, 2))
        expanded = blow_up_vertex(g, 0, [(0, 'dst'), (1, 'src')], length=Fraction(1, 10))
        self.assertEqual(expanded.vertex_count, 2)
        self.assertEqual(expanded.edges[-1].length, Fraction(1, 10))
        self.assertTrue(validate_outer(expanded).is_outer_space_point)
        restored, _ = contract_edge(expanded, 2)
        self.assertEqual(restored, g)

    def test_blow_up_wrong_end(self):
        """Test that moving an end not at the vertex is rejected"""
        with self.assertRaises(GraphValidationError):
            blow_up_vertex(theta(), 0, [(0, 'dst')])


class TestCycles(unittest.TestCase):
    """Test cases for cycle enumeration, systole and normalization"""

    def test_theta_cycles(self):
        """Test the three cycles of theta, shortest first"""
        g = theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))
        cycles = enumerate_cycles(g)
        self.assertEqual([c.edge_set for c in cycles],
                         [frozenset({1, 2}), frozenset({0, 2}), frozenset({0, 1})])
        self.assertEqual(cycles[0].total_length, Fraction(1, 2))

    def test_k4_has_seven_cycles(self):
        """Test that K4 has four triangles and three squares"""
        self.assertEqual(len(enumerate_cycles(k4())), 7)

    def test_loops_are_cycles(self):
        """Test that a rose has exactly its loops as cycles"""
        cycles = enumerate_cycles(rose(Fraction(1, 3), Fraction(2, 3)))
        self.assertEqual([c.edge_ids for c in cycles], [(0,), (1,)])

    def test_systole(self):
        """Test the systole of theta"""
        self.assertEqual(systole(theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))), Fraction(1, 2))

    def test_systole_of_tree(self):
        """Test that a tree has no systole"""
        with self.assertRaises(GraphValidationError):
            systole(MetricGraph.build(2, [(0, 1, 1)]))

    def test_normalize(self):
        """Test rescaling to total length 1"""
        g = normalize(MetricGraph.build(2, [(0, 1, 1), (0, 1, 1), (0, 1, 2)]))
        self.assertEqual(g.total_length, 1)
        self.assertEqual(g.lengths, (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)))


class TestRandomGraphs(unittest.TestCase):
    """Test cases checking graph queries against brute force"""

    def setUp(self):
        """Set up test environment before each test"""
        self.rng = random.Random(17)

    def random_graphs(self, count=40):
        for _ in range(count):
            vertex_count = self.rng.randint(1, 5)
            edge_count = self.rng.randint(max(vertex_count - 1, 1), 8)
            yield random_graph(self.rng, vertex_count, edge_count)

    def removal_bridges(self, g):
        return frozenset(e.id for e in g.edges if not nx.is_connected(g.to_networkx(exclude=[e.id])))

    def test_bridges_match_edge_removal(self):
        """Test bridges against deleting each edge in turn"""
        for g in self.random_graphs():
            self.assertEqual(bridges(g), self.removal_bridges(g), msg=str(g.incidences))

    def test_curated_bridges(self):
        """Test bridges of every curated graph against edge removal"""
        for name, build in CURATED.items():
            g = build()
            self.assertEqual(bridges(g), self.removal_bridges(g), msg=name)

    def test_contraction_preserves_genus(self):
        """Test contracting any non-loop edge keeps the genus"""
        for g in self.random_graphs():
            for edge in g.edges:
                if edge.is_loop:
                    continue
                contracted, _ = contract_edge(g, edge.id)
                self.assertEqual(genus(contracted), genus(g), msg=str(g.incidences))

    def test_cycle_graph(self):
        """Test every pair of edges of a cycle separates it"""
        g = cycle_graph(5)
        self.assertEqual(genus(g), 1)
        self.assertEqual(bridges(g), frozenset())
        self.assertEqual(len(separating_pairs(g)), 10)
        self.assertFalse(validate_outer(g).is_outer_space_point)


if __name__ == '__main__':
    unittest.main()
