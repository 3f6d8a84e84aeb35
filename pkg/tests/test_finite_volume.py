import unittest
import math
import os
import sys

# Add parent directory to path so we can import our modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import GraphValidationError, NonConvergenceError, ParameterError
from finite_volume import VolumeCalculator, area_ds2_eps_n2, area_ds2_n2, corner_area
from graph_corpus import k4, theta
from outer_metrics import DS2, DS2_EPS, SimplexCell


class TestVolumeCalculator(unittest.TestCase):
    """Test cases for areas of genus-2 simplices"""

    def setUp(self):
        """Set up test environment before each test"""
        self.cell = SimplexCell(theta())
        self.calculator = VolumeCalculator(tol=1e-3)

    def test_ds2_area_is_finite(self):
        """Test the ds2 area converges and exceeds the flat area"""
        result = area_ds2_n2(self.cell, tol=1e-3)
        self.assertTrue(math.isfinite(result.value))
        self.assertGreater(result.value, math.sqrt(3) / 2)
        self.assertLess(result.error_estimate, 1e-3 * result.value)
        self.assertEqual(len(result.trace), result.depth + 1)

    def test_ds2_eps_area_is_finite(self):
        """Test the ds2_eps area converges"""
        result = area_ds2_eps_n2(self.cell, 0.05, tol=1e-3)
        self.assertGreater(result.value, math.sqrt(3) / 2)

    def test_corner_area_scales_linearly(self):
        """Test the ds2_eps corner of size r has area close to sqrt(2) r"""
        small = corner_area(self.cell, 1e-3, tol=1e-4, kind=DS2_EPS, eps=0.05)
        large = corner_area(self.cell, 1e-2, tol=1e-4, kind=DS2_EPS, eps=0.05)
        self.assertAlmostEqual(small.value / (math.sqrt(2) * 1e-3), 1.0, places=2)
        self.assertAlmostEqual(large.value / small.value, 10.0, delta=0.1)

    def test_ds2_corners_shrink(self):
        """Test ds2 corner areas decrease with the radius and stay below the total"""
        total = area_ds2_n2(self.cell).value
        areas = [corner_area(self.cell, r).value for r in (1e-2, 1e-3, 1e-4)]
        self.assertTrue(total > areas[0] > areas[1] > areas[2] > 0)

    def test_integrand_slopes(self):
        """Test the density grows like 1/s for ds2_eps and integrably for ds2"""
        self.assertAlmostEqual(self.calculator.integrand_slope(self.cell, DS2_EPS, eps=0.05), -1.0, places=2)
        slope = self.calculator.integrand_slope(self.cell, DS2)
        self.assertLess(slope, -0.9)
        self.assertGreater(slope, -2.0)

    def test_result_dict(self):
        """Test the reported fields"""
        result = self.calculator.corner_area(self.cell, 0.1)
        self.assertEqual(sorted(result.to_dict()), ['depth', 'error_estimate', 'trace', 'value'])

    def test_non_convergence(self):
        """Test partial sums are kept when the depth runs out"""
        with self.assertRaises(NonConvergenceError) as context:
            VolumeCalculator(tol=1e-3, max_depth=2).area(self.cell)
        self.assertEqual(len(context.exception.partial_sums), 3)

    def test_validation(self):
        """Test radius, tolerance, eps and cell checks"""
        with self.assertRaises(ParameterError):
            self.calculator.corner_area(self.cell, 0.5)
        with self.assertRaises(ParameterError):
            VolumeCalculator(tol=0)
        with self.assertRaises(ParameterError):
            self.calculator.area(self.cell, DS2_EPS)
        with self.assertRaises(GraphValidationError):
            self.calculator.area(SimplexCell(k4()))


if __name__ == '__main__':
    unittest.main()
