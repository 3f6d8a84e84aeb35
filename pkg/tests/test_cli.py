import unittest
import io
import json
import logging
import math
import os
import shutil
import sys
import tempfile
from fractions import Fraction
from unittest.mock import patch

import numpy as np

# Add parent directory to path so we can import our modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import main
from cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, run, to_json_value
from graph_core import graph_from_dict, graph_to_dict
from graph_corpus import dumbbell, looped_banana, theta
from path_length import PathLengthIntegrator


class TestJsonValues(unittest.TestCase):
    """Test cases for JSON conversion of results"""

    def test_conversions(self):
        """Test Fractions, non-finite floats, sets and arrays"""
        self.assertEqual(to_json_value(Fraction(1, 3)), '1/3')
        self.assertIsNone(to_json_value(float('nan')))
        self.assertIsNone(to_json_value(float('inf')))
        self.assertEqual(to_json_value(frozenset({3, 1})), [1, 3])
        self.assertEqual(to_json_value(np.array([[1.0, 2.0]])), [[1.0, 2.0]])
        self.assertEqual(to_json_value({1: np.int64(4)}), {'1': 4})

    def test_significant_digits(self):
        """Test floats are rounded to 15 significant digits"""
        self.assertEqual(to_json_value(0.1 + 0.2), 0.3)
        self.assertEqual(to_json_value(True), True)


class TestCommandLine(unittest.TestCase):
    """Test cases for the JSON command-line front end"""

    def setUp(self):
        """Set up test environment before each test"""
        self.test_dir = tempfile.mkdtemp()
        self.output = os.path.join(self.test_dir, 'out.json')

    def tearDown(self):
        """Clean up test environment after each test"""
        shutil.rmtree(self.test_dir)

    def write(self, name, data):
        path = os.path.join(self.test_dir, name)
        with open(path, 'w') as handle:
            if isinstance(data, str):
                handle.write(data)
            else:
                json.dump(data, handle)
        return path

    def call(self, *argv):
        code = run(list(argv) + ['--output', self.output])
        with open(self.output) as handle:
            return code, json.load(handle)

    def test_period_with_marking(self):
        """Test the theta period matrix in the tree {e2} basis"""
        graph = self.write('theta.json', graph_to_dict(theta(0.5, 0.3, 0.2)))
        marking = self.write('marking.json', {'basis': [[1, -1, 0], [0, -1, 1]]})
        code, result = self.call('period', graph, '--marking', marking)
        self.assertEqual(code, EXIT_OK)
        np.testing.assert_allclose(result, [[0.8, 0.3], [0.3, 0.5]])

    def test_period_exact(self):
        """Test exact mode prints rationals"""
        graph = self.write('theta.json', graph_to_dict(theta(Fraction(1, 2), Fraction(3, 10), Fraction(1, 5))))
        marking = self.write('marking.json', {'basis': [[1, -1, 0], [0, -1, 1]]})
        code, result = self.call('period', graph, '--marking', marking, '--exact')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(result, [['4/5', '3/10'], ['3/10', '1/2']])

    def test_validate_dumbbell(self):
        """Test the bridge of the dumbbell is reported"""
        code, result = self.call('validate', self.write('g.json', graph_to_dict(dumbbell())))
        self.assertEqual(code, EXIT_OK)
        self.assertFalse(result['is_outer_space_point'])
        self.assertEqual(result['separating_edges'], [1])

    def test_c1sets(self):
        """Test C1-sets are printed as sorted edge lists"""
        code, result = self.call('c1sets', self.write('g.json', graph_to_dict(looped_banana())))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(result, [[0], [1], [2, 3]])

    def test_torelli_looped_bananas(self):
        """Test the looped-banana pair has equal Jacobians"""
        first = self.write('a.json', graph_to_dict(looped_banana(f1=Fraction(1, 10), f2=Fraction(1, 5))))
        second = self.write('b.json', graph_to_dict(looped_banana(f1=Fraction(3, 20), f2=Fraction(3, 20))))
        code, result = self.call('torelli', first, second, '--exact')
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(result['equal'])
        code, result = self.call('cyclic-eq', first, second, '--exact')
        self.assertFalse(result['equivalent'])

    def test_shortest_vector(self):
        """Test the minimum of [[5, 4], [4, 5]]"""
        code, result = self.call('shortest-vector', self.write('m.json', [[5, 4], [4, 5]]))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(result['value'], 2)
        self.assertEqual(result['witness'], [1, -1])

    def test_dist_interval(self):
        """Test d1 bounds between two theta points"""
        first = self.write('p.json', graph_to_dict(theta(0.5, 0.25, 0.25)))
        second = self.write('q.json', graph_to_dict(theta(0.25, 0.5, 0.25)))
        code, result = self.call('dist', first, second, '--metric', 'd1')
        self.assertEqual(code, EXIT_OK)
        self.assertLessEqual(result['lower'], result['upper'])
        self.assertGreater(result['lower'], 0)

    def test_tropical_eval(self):
        """Test evaluating the tropical line"""
        polynomial = self.write('p.json', [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
        code, result = self.call('tropical-eval', polynomial, '1', '2')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(result['value'], 2)

    def test_stdout(self):
        """Test results go to standard output without --output"""
        graph = self.write('theta.json', graph_to_dict(theta()))
        with patch('sys.stdout', new_callable=io.StringIO) as stdout:
            code = run(['genus', graph])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(json.loads(stdout.getvalue()), {'genus': 2})

    def test_connectivize_output_reparses(self):
        """Test the printed quotient is a graph file other commands accept"""
        graph = self.write('g.json', graph_to_dict(looped_banana()))
        code, result = self.call('connectivize', graph, '--exact')
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(result['c1_sets'][2], {'edge': 2, 'c1_set': [2, 3]})
        quotient = graph_from_dict(result['quotient'], exact=True)
        self.assertEqual(quotient.lengths, (Fraction(7, 20), Fraction(7, 20), Fraction(3, 10)))
        again = self.write('quotient.json', result['quotient'])
        code, result = self.call('genus', again, '--exact')
        self.assertEqual(result, {'genus': 3})
        code, result = self.call('validate', again)
        self.assertTrue(result['is_outer_space_point'])

    def test_tropical_corners(self):
        """Test the tropical line has one balanced vertex with three unit rays"""
        polynomial = self.write('p.json', [[1, 0, 0], [0, 1, 0], [0, 0, 0]])
        code, result = self.call('tropical-corners', polynomial)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(result['vertices']), 1)
        star = result['vertices'][0]
        self.assertTrue(star['balanced'])
        self.assertEqual([Fraction(str(c)) for c in star['point']], [0, 0])
        rays = sorted((tuple(int(Fraction(str(c))) for c in ray['direction']), ray['weight'])
                      for ray in star['rays'])
        self.assertEqual(rays, [((-1, 0), 1), ((0, -1), 1), ((1, 1), 1)])

    def test_volume_corner(self):
        """Test a small ds2_eps corner has area close to sqrt(2) r"""
        code, result = self.call('volume', '--kind', 'ds2_eps', '--eps', '0.05', '--radius', '0.001',
                                 '--tol', '0.0001')
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(result['value'] / (math.sqrt(2) * 1e-3), 1.0, places=2)

    def test_jacobian_dist(self):
        """Test the invariant distance from matrices and from graph files"""
        identity = self.write('i.json', [[1, 0], [0, 1]])
        doubled = self.write('d.json', [[2, 0], [0, 2]])
        code, result = self.call('jacobian-dist', identity, doubled)
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(result['d_inv'], math.sqrt(2) * math.log(2))
        graph = self.write('theta.json', graph_to_dict(theta(0.5, 0.3, 0.2)))
        code, result = self.call('jacobian-dist', graph, graph)
        self.assertEqual(result['d_inv'], 0)

    def test_glnz(self):
        """Test a unimodular witness between [[2, 1], [1, 2]] and [[2, -1], [-1, 2]]"""
        first = self.write('a.json', [[2, 1], [1, 2]])
        second = self.write('b.json', [[2, -1], [-1, 2]])
        code, result = self.call('glnz', first, second, '--radius', '1')
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(result['found'])
        u = np.array(result['witness'])
        np.testing.assert_array_equal(u @ np.array([[2, 1], [1, 2]]) @ u.T, [[2, -1], [-1, 2]])
        code, result = self.call('glnz', first, self.write('c.json', [[3, 0], [0, 3]]))
        self.assertFalse(result['found'])
        self.assertIsNone(result['witness'])

    def test_ratios_with_export(self):
        """Test the ratio table rows and its CSV export"""
        code, result = self.call('ratios', '--pairs', '1', '--sweeps', '1', '--seed', '3',
                                 '--export', 'csv', '--export-dir', self.test_dir)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(result['rows']), 1)
        row = result['rows'][0]
        self.assertAlmostEqual(row['ds2_over_d1'], row['ds2_upper'] / row['d1_upper'], places=9)
        self.assertTrue(os.path.exists(result['export']))

    def test_malformed_json(self):
        """Test parse errors report the file, line and column"""
        path = self.write('bad.json', '{\n  "vertices": 2,\n  oops\n}')
        code, result = self.call('genus', path)
        self.assertEqual(code, EXIT_INVALID)
        self.assertEqual(result['error'], 'InputError')
        self.assertTrue(result['location'].startswith(f"{path}:3:"))

    def test_missing_file(self):
        """Test unreadable input"""
        code, result = self.call('genus', os.path.join(self.test_dir, 'missing.json'))
        self.assertEqual(code, EXIT_INVALID)

    def test_bad_arguments(self):
        """Test argument errors are reported as JSON"""
        with patch('sys.stdout', new_callable=io.StringIO) as stdout:
            code = run(['glnz', 'a.json', 'b.json', '--radius', '0'])
        result = json.loads(stdout.getvalue())
        self.assertEqual(code, EXIT_INVALID)
        self.assertEqual(result['location'], 'arguments')

    def test_eps_required(self):
        """Test ds2_eps without a cutoff scale"""
        point = self.write('p.json', graph_to_dict(theta()))
        code, result = self.call('tensor', point, '--kind', 'ds2_eps')
        self.assertEqual(code, EXIT_INVALID)
        self.assertEqual(result['error'], 'ParameterError')

    def test_non_convergence_exit_code(self):
        """Test a stalled integral exits with code 3 and its partial sums"""
        path = self.write('path.json', {'graph': graph_to_dict(theta()),
                                        'nodes': [[0.5, 0.25, 0.25], [0.25, 0.5, 0.25]]})
        with patch.object(PathLengthIntegrator, 'DEFAULT_MAX_DEPTH', 0):
            code, result = self.call('pathlen', path)
        self.assertEqual(code, EXIT_NUMERIC)
        self.assertEqual(result['error'], 'NonConvergenceError')
        self.assertEqual(len(result['partial_sums']), 1)

    def test_pathlen(self):
        """Test the flat length of a straight leg"""
        path = self.write('path.json', {'graph': graph_to_dict(theta()),
                                        'nodes': [[0.5, 0.25, 0.25], [0.25, 0.5, 0.25]]})
        code, result = self.call('pathlen', path, '--kind', 'ds0')
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(result['value'], math.sqrt(0.125))


class TestMain(unittest.TestCase):
    """Test cases for the entry point and logging setup"""

    def setUp(self):
        """Set up test environment before each test"""
        self.test_dir = tempfile.mkdtemp()
        self.saved_hook = sys.excepthook

    def tearDown(self):
        """Clean up test environment after each test"""
        sys.excepthook = self.saved_hook
        logging.basicConfig(force=True)
        shutil.rmtree(self.test_dir)

    def test_main_runs_command(self):
        """Test main installs the hook, writes the log file and returns the exit code"""
        graph = os.path.join(self.test_dir, 'theta.json')
        with open(graph, 'w') as handle:
            json.dump(graph_to_dict(theta()), handle)
        output = os.path.join(self.test_dir, 'out.json')
        log_file = os.path.join(self.test_dir, 'run.log')

        code = main.main(['genus', graph, '--output', output, '-v', '--log-file', log_file])

        self.assertEqual(code, EXIT_OK)
        self.assertIs(sys.excepthook, main.exception_hook)
        self.assertEqual(logging.getLogger().level, logging.INFO)
        with open(log_file) as handle:
            self.assertIn('running genus', handle.read())

    def test_verbosity_levels(self):
        """Test WARNING, INFO and DEBUG levels"""
        for verbose, level in ((0, logging.WARNING), (1, logging.INFO), (3, logging.DEBUG)):
            main.setup_logging(verbose)
            self.assertEqual(logging.getLogger().level, level)


if __name__ == '__main__':
    unittest.main()
