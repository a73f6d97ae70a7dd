"""
Error analytics of the assimilation runs.
"""

from .error_report import (
    ErrorReport, ReportContext, REPORT_COLUMNS, EXTRA_COLUMNS, RELATIVE_ERROR_COLUMNS,
    step_errors, error_report,
)

__all__ = [
    'ErrorReport', 'ReportContext', 'REPORT_COLUMNS', 'EXTRA_COLUMNS', 'RELATIVE_ERROR_COLUMNS',
    'step_errors', 'error_report',
]
