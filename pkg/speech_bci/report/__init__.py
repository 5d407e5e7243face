"""
Report Module
- Markdown / CSV 결과 표 (Avg., Std. 행 + 통계 검정)
- Excel 리포트 (Summary, Per Subject, Statistics 시트)
"""

from .builder import REPORT_FORMATS, build_report, parse_result_csv, to_csv, to_markdown
from .excel_generator import ExcelReportGenerator

__all__ = [
    "REPORT_FORMATS",
    "build_report",
    "parse_result_csv",
    "to_markdown",
    "to_csv",
    "ExcelReportGenerator",
]
