import unittest
import os
import random
import sys
from fractions import Fraction

import numpy as np

# Add parent directory to path so we can import our modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import GraphValidationError, MarkingError
from graph_core import enumerate_cycles
from graph_corpus import k4, random_outer_graph, rose, theta, theta_marking
from homology_jacobian import (Marking, PeriodMatrix, boundary, change_marking, cycle_basis, cycle_to_form,
                               express_in_marking, integrate, invariant_factors, is_cycle, is_one_form,
                               marking_problems, period_matrix, principality_check, q_pairing)
from spd_geometry import shortest_vector


class TestChains(unittest.TestCase):
    """Test cases for chains, boundaries and the quadratic form"""

    def setUp(self):
        """Set up test environment before each test"""
        self.theta = theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))

    def test_boundary(self):
        """Test boundary is incoming minus outgoing"""
        self.assertEqual(boundary(self.theta, (1, 0, 0)), [-1, 1])
        self.assertEqual(boundary(self.theta, (1, -1, 0)), [0, 0])

    def test_loops_have_no_boundary(self):
        """Test that loops are cycles on their own"""
        self.assertTrue(is_cycle(rose(1, 1), (1, 0)))

    def test_wrong_length_chain(self):
        """Test that coefficient vectors must match the edge count"""
        with self.assertRaises(GraphValidationError):
            boundary(self.theta, (1, 0))

    def test_q_pairing(self):
        """Test Q on two overlapping cycles"""
        self.assertEqual(q_pairing(self.theta, (1, -1, 0), (0, -1, 1)), Fraction(3, 10))
        self.assertEqual(q_pairing(self.theta, (1, -1, 0), (1, -1, 0)), Fraction(4, 5))


class TestCycleBasis(unittest.TestCase):
    """Test cases for fundamental cycle bases and markings"""

    def test_theta_documented_basis(self):
        """Test the tree {e2} basis {e1 - e2, e3 - e2}"""
        self.assertEqual(theta_marking().basis, ((1, -1, 0), (0, -1, 1)))

    def test_theta_default_tree(self):
        """Test the greedy tree uses the first edge"""
        self.assertEqual(cycle_basis(theta()).basis, ((-1, 1, 0), (-1, 0, 1)))

    def test_rose_basis_is_identity(self):
        """Test that each loop is its own basis cycle"""
        self.assertEqual(cycle_basis(rose(1, 1, 1)).basis, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def test_basis_rows_are_cycles(self):
        """Test fundamental cycles on random graphs"""
        rng = random.Random(7)
        for _ in range(20):
            g = random_outer_graph(rng, rng.randint(2, 4))
            marking = cycle_basis(g)
            self.assertEqual(marking.rank, g.edge_count - g.vertex_count + 1)
            self.assertTrue(all(is_cycle(g, row) for row in marking.basis))
            self.assertEqual(marking_problems(g, marking), [])

    def test_marking_json_round_trip(self):
        """Test marking serialization"""
        marking = theta_marking()
        self.assertEqual(Marking.from_dict(marking.to_dict()), marking)

    def test_malformed_marking_json(self):
        """Test that a marking without a basis is rejected"""
        with self.assertRaises(MarkingError):
            Marking.from_dict({'rows': []})


class TestPeriodMatrix(unittest.TestCase):
    """Test cases for period matrices"""

    def test_theta_exact(self):
        """Test [[a+b, b], [b, 1-a]] for the documented basis"""
        a, b, c = Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)
        p = period_matrix(theta(a, b, c), theta_marking())
        self.assertEqual(p.to_list(), [[a + b, b], [b, 1 - a]])
        self.assertEqual(p.determinant(), (a + b) * (1 - a) - b * b)

    def test_theta_float(self):
        """Test the same matrix in floating point"""
        p = period_matrix(theta(0.5, 0.3, 0.2), theta_marking())
        np.testing.assert_allclose(p.as_array(), [[0.8, 0.3], [0.3, 0.5]])

    def test_positive_definite_on_random_graphs(self):
        """Test that random period matrices pass Cholesky"""
        rng = random.Random(11)
        for _ in range(50):
            g = random_outer_graph(rng, rng.randint(2, 4))
            p = period_matrix(g, cycle_basis(g))
            self.assertTrue(p.is_positive_definite())
            self.assertGreater(np.linalg.eigvalsh(p.as_array())[0], 0)

    def test_zero_length_rejected(self):
        """Test that a zero-length edge is rejected"""
        g = theta(0, Fraction(1, 2), Fraction(1, 2))
        with self.assertRaises(GraphValidationError):
            period_matrix(g, theta_marking())

    def test_dependent_marking(self):
        """Test that a marking with repeated cycles is rejected"""
        with self.assertRaises(MarkingError):
            period_matrix(theta(), Marking.from_rows([(1, -1, 0), (1, -1, 0)]))

    def test_non_cycle_marking(self):
        """Test that a row with boundary is rejected"""
        with self.assertRaises(MarkingError):
            period_matrix(theta(), Marking.from_rows([(1, 0, 0), (0, -1, 1)]))

    def test_change_marking(self):
        """Test that u p u^T matches recomputing in the new basis"""
        g = theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))
        marking = theta_marking()
        u = ((1, 1), (0, 1))
        rows = [tuple(sum(u[i][k] * marking.basis[k][e] for k in range(2)) for e in range(3)) for i in range(2)]
        expected = period_matrix(g, Marking.from_rows(rows))
        self.assertEqual(change_marking(period_matrix(g, marking), u), expected)

    def test_change_marking_not_unimodular(self):
        """Test that determinant 2 changes are rejected"""
        p = PeriodMatrix(((1, 0), (0, 1)))
        with self.assertRaises(MarkingError):
            change_marking(p, ((2, 0), (0, 1)))


class TestFormsAndPrincipality(unittest.TestCase):
    """Test cases for 1-forms, integration and principality"""

    def setUp(self):
        """Set up test environment before each test"""
        self.g = theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))

    def test_cycle_to_form_and_integrate(self):
        """Test integrating the form of a cycle over another cycle"""
        form = cycle_to_form(self.g, (1, -1, 0))
        self.assertTrue(is_one_form(self.g, form))
        self.assertEqual(integrate(self.g, form, (0, -1, 1)), Fraction(3, 10))

    def test_unbalanced_form(self):
        """Test that an unbalanced form cannot be integrated"""
        with self.assertRaises(GraphValidationError):
            integrate(self.g, (1, 0, 0), (1, -1, 0))

    def test_non_integral_cycle(self):
        """Test that half-integer chains have no integral form"""
        with self.assertRaises(GraphValidationError):
            cycle_to_form(self.g, (Fraction(1, 2), Fraction(-1, 2), 0))

    def test_invariant_factors(self):
        """Test Smith normal form diagonals"""
        self.assertEqual(invariant_factors([[2, 0], [0, 3]]), [1, 6])
        self.assertEqual(invariant_factors([[1, -1, 0], [0, -1, 1]]), [1, 1])

    def test_principality(self):
        """Test fundamental bases pass and scaled bases fail"""
        rng = random.Random(3)
        for _ in range(20):
            g = random_outer_graph(rng, rng.randint(2, 4))
            marking = cycle_basis(g)
            self.assertTrue(principality_check(g, marking))
            scaled = Marking.from_rows([[3 * c for c in marking.basis[0]]] + list(marking.basis[1:]))
            self.assertFalse(principality_check(g, scaled))

    def test_express_in_marking(self):
        """Test integer coordinates of a cycle in the marking"""
        self.assertEqual(express_in_marking(theta_marking(), (1, 0, -1)), (1, -1))

    def test_express_outside_lattice(self):
        """Test that a non-cycle has no coordinates"""
        with self.assertRaises(MarkingError):
            express_in_marking(theta_marking(), (1, 0, 0))

    def test_shortest_vector_is_systole(self):
        """Test the lattice minimum of the period matrix equals the systole"""
        for g in (self.g, k4([Fraction(k, 21) for k in range(1, 7)])):
            shortest = shortest_vector(period_matrix(g, cycle_basis(g)))
            self.assertEqual(shortest.value, enumerate_cycles(g)[0].total_length)


if __name__ == '__main__':
    unittest.main()
