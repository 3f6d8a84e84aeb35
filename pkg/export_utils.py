import datetime
import logging
import os

import pandas as pd

logger = logging.getLogger('outer_space.export_utils')
logger.addHandler(logging.NullHandler())


class DataExporter:
    """Utility class for exporting report and ratio tables to CSV or Excel"""

    def __init__(self, export_dir=None):
        """Initialize with the directory exports are written to"""
        self.export_dir = export_dir or os.path.join(os.path.dirname(os.path.abspath(__file__)), 'exports')
        os.makedirs(self.export_dir, exist_ok=True)

    def export_frame(self, frame: pd.DataFrame, name, format='csv'):
        """Export a DataFrame to CSV or Excel.

        Returns:
            tuple: (filepath, message), or (None, message) when nothing was written
        """
        if frame is None or frame.empty:
            return None, f"No {name} data available to export."

        if format not in ('csv', 'excel'):
            return None, f"Unsupported format: {format}"

        # Create filename with timestamp
        timestamp = datetime.datetime.now().strftime('%Y%m%d_%H%M%S')
        # Use .xlsx extension for excel format
        extension = "xlsx" if format == "excel" else format
        filename = f"{name}_{timestamp}.{extension}"
        filepath = os.path.join(self.export_dir, filename)

        try:
            if format == 'csv':
                frame.to_csv(filepath, index=False)
            else:
                frame.to_excel(filepath, index=False, engine='openpyxl')
        except Exception as e:
            logger.error(f"Error exporting {name}: {e}")
            return None, f"Error exporting {name}: {e}"

        logger.info(f"Exported {len(frame)} rows to {filepath}")
        return filepath, f"{name.replace('_', ' ').capitalize()} exported successfully to {filename}"

    def export_report(self, frame: pd.DataFrame, format='csv'):
        """Export an acceptance report table"""
        return self.export_frame(frame, 'acceptance_report', format)

    def export_ratios(self, frame: pd.DataFrame, format='csv'):
        """Export a distance ratio table"""
        return self.export_frame(frame, 'distance_ratios', format)
