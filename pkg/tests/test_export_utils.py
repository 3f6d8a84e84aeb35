import unittest
import os
import pandas as pd
import tempfile
import shutil
import sys

# Add parent directory to path so we can import our modules
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from export_utils import DataExporter


class TestDataExporter(unittest.TestCase):
    """Test cases for DataExporter class"""

    def setUp(self):
        """Set up test environment before each test"""
        # Create a temporary directory for exports
        self.test_export_dir = tempfile.mkdtemp()
        self.exporter = DataExporter(self.test_export_dir)

        self.report = pd.DataFrame({
            'criterion': [1, 2],
            'name': ['theta period', 'positive definite'],
            'passed': [True, False],
            'value': [0.0, 1e-3],
            'detail': ['exact match', 'min eigenvalue'],
            'runtime': [0.01, 0.5],
        })

    def tearDown(self):
        """Clean up test environment after each test"""
        shutil.rmtree(self.test_export_dir)

    def test_export_report_csv(self):
        """Test exporting a report table to CSV"""
        filepath, message = self.exporter.export_report(self.report, format='csv')

        # Verify export was successful
        self.assertIsNotNone(filepath)
        self.assertTrue(os.path.exists(filepath))
        self.assertTrue(filepath.endswith('.csv'))
        self.assertTrue(os.path.basename(filepath).startswith('acceptance_report_'))
        self.assertIn('Acceptance report exported successfully', message)

        # Verify file contents
        exported = pd.read_csv(filepath)
        self.assertEqual(list(exported.columns), list(self.report.columns))
        self.assertEqual(exported['name'].tolist(), ['theta period', 'positive definite'])

    def test_export_ratios_excel(self):
        """Test exporting a ratio table to Excel"""
        ratios = pd.DataFrame({'pair': [0], 'd1_upper': [0.4], 'ds2_upper': [0.6], 'ds2_eps_upper': [0.5],
                               'ds2_over_d1': [1.5], 'ds2_eps_over_d1': [1.25]})
        filepath, message = self.exporter.export_ratios(ratios, format='excel')

        self.assertIsNotNone(filepath)
        self.assertTrue(filepath.endswith('.xlsx'))
        self.assertIn('Distance ratios exported successfully', message)
        exported = pd.read_excel(filepath, engine='openpyxl')
        self.assertAlmostEqual(exported['ds2_over_d1'].iloc[0], 1.5)

    def test_export_empty_data(self):
        """Test exporting when there's no data"""
        filepath, message = self.exporter.export_report(pd.DataFrame(), format='csv')
        self.assertIsNone(filepath)
        self.assertEqual(message, "No acceptance_report data available to export.")

        filepath, message = self.exporter.export_ratios(None)
        self.assertIsNone(filepath)

    def test_export_unsupported_format(self):
        """Test exporting with an unsupported format"""
        filepath, message = self.exporter.export_report(self.report, format='pdf')
        self.assertIsNone(filepath)
        self.assertIn('Unsupported format', message)

    def test_creates_export_dir(self):
        """Test that a missing export directory is created"""
        target = os.path.join(self.test_export_dir, 'nested', 'exports')
        DataExporter(target)
        self.assertTrue(os.path.isdir(target))


if __name__ == '__main__':
    unittest.main()
