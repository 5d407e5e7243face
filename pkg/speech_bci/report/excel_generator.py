"""Excel 리포트 생성 모듈.

결과 표와 통계 검정을 Excel 리포트로 만들어요.
요약, 피험자별 정확도, 통계 검정 시트를 포함해요.
"""

from datetime import datetime
from pathlib import Path

from openpyxl import Workbook
from openpyxl.formatting.rule import ColorScaleRule
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side

from speech_bci.evaluation.tables import ResultTable, TestReport

# 스타일 상수
HEADER_FILL = PatternFill(start_color="1F4E79", end_color="1F4E79", fill_type="solid")
HEADER_FONT = Font(color="FFFFFF", bold=True, size=11)
REFERENCE_FILL = PatternFill(start_color="E2EFDA", end_color="E2EFDA", fill_type="solid")
SIGNIFICANT_FILL = PatternFill(start_color="FFD700", end_color="FFD700", fill_type="solid")
BORDER = Border(left=Side(style="thin"), right=Side(style="thin"), top=Side(style="thin"), bottom=Side(style="thin"))
NUMBER_FORMAT = "0.0000"


class ExcelReportGenerator:
    """Excel 결과 리포트 생성기.

    Attributes:
        output_dir (Path): 출력 디렉토리 경로
        workbook (Workbook | None): 현재 작업 중인 워크북
    """

    def __init__(self, output_dir: str = "output"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.workbook: Workbook | None = None

    def create_result_report(
        self,
        table: ResultTable,
        tests: TestReport | None = None,
        filename: str | None = None,
    ) -> str:
        """결과 리포트를 생성해요.

        Args:
            table: 피험자 × 방법 결과 표
            tests: 통계 검정 결과 (없으면 Statistics 시트는 비어 있어요)
            filename: 출력 파일명 (기본값: None, 타임스탬프 기반 자동 생성)

        Returns:
            str: 생성된 파일 경로
        """
        if filename is None:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            filename = f"result_report_{timestamp}.xlsx"

        self.workbook = Workbook()
        if self.workbook.active:
            self.workbook.remove(self.workbook.active)

        reference = tests.reference if tests is not None else None
        self._create_summary_sheet(table, reference)
        self._create_subject_sheet(table, reference)
        self._create_statistics_sheet(tests)

        filepath = self.output_dir / filename
        assert self.workbook is not None
        self.workbook.save(filepath)

        return str(filepath)

    def _header(self, ws, row: int, headers: list[str]) -> None:
        for col, header in enumerate(headers, 1):
            cell = ws.cell(row=row, column=col, value=header)
            cell.fill = HEADER_FILL
            cell.font = HEADER_FONT
            cell.alignment = Alignment(horizontal="center")
            cell.border = BORDER

    def _create_summary_sheet(self, table: ResultTable, reference: str | None) -> None:
        """방법별 Avg./Std. 요약 시트를 생성해요."""
        assert self.workbook is not None
        ws = self.workbook.create_sheet("Summary", 0)

        ws["A1"] = "Imagined Speech Decoding Report"
        ws["A1"].font = Font(size=16, bold=True)
        ws.merge_cells("A1:D1")

        ws["A2"] = f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M')}"
        ws["A2"].font = Font(size=10, italic=True)

        ws["A3"] = f"Subjects: {len(table.subjects)}"

        row = 5
        self._header(ws, row, ["Method", "Avg.", "Std.", "Best", "Worst"])
        row += 1
        for j, method in enumerate(table.methods):
            values = table.accuracies[:, j]
            cells = [
                method,
                float(table.avg[j]) if table.subjects else None,
                float(table.std[j]) if len(table.subjects) > 1 else None,
                float(values.max()) if table.subjects else None,
                float(values.min()) if table.subjects else None,
            ]
            for col, value in enumerate(cells, 1):
                cell = ws.cell(row=row, column=col, value=value)
                cell.border = BORDER
                if col > 1:
                    cell.number_format = NUMBER_FORMAT
                if method == reference:
                    cell.fill = REFERENCE_FILL
            row += 1

        ws.column_dimensions["A"].width = 20
        for col_letter in "BCDE":
            ws.column_dimensions[col_letter].width = 12

    def _create_subject_sheet(self, table: ResultTable, reference: str | None) -> None:
        """피험자별 정확도 시트를 생성해요. 정확도에는 색상 스케일을 입혀요."""
        assert self.workbook is not None
        ws = self.workbook.create_sheet("Per Subject")

        self._header(ws, 1, ["Subject", *table.methods])
        for row_idx, (subject, values) in enumerate(zip(table.subjects, table.accuracies, strict=True), 2):
            ws.cell(row=row_idx, column=1, value=subject).border = BORDER
            for col_idx, value in enumerate(values, 2):
                cell = ws.cell(row=row_idx, column=col_idx, value=float(value))
                cell.number_format = NUMBER_FORMAT
                cell.border = BORDER
                cell.alignment = Alignment(horizontal="center")
                if table.methods[col_idx - 2] == reference:
                    cell.font = Font(bold=True)

        ws.column_dimensions["A"].width = 16
        if table.methods and table.subjects:
            first = ws.cell(row=2, column=2).coordinate
            last = ws.cell(row=len(table.subjects) + 1, column=len(table.methods) + 1).coordinate
            color_scale = ColorScaleRule(
                start_type="min",
                start_color="F8696B",
                mid_type="percentile",
                mid_value=50,
                mid_color="FFEB84",
                end_type="max",
                end_color="63BE7B",
            )
            ws.conditional_formatting.add(f"{first}:{last}", color_scale)

    def _create_statistics_sheet(self, tests: TestReport | None) -> None:
        """Shapiro-Wilk, Levene, 대응 t-검정 시트를 생성해요."""
        assert self.workbook is not None
        ws = self.workbook.create_sheet("Statistics")
        if tests is None:
            ws["A1"] = "No statistical tests"
            return

        ws["A1"] = "Normality (Shapiro-Wilk)"
        ws["A1"].font = Font(size=12, bold=True)
        self._header(ws, 2, ["Method", "W", "p"])
        row = 3
        for method, result in tests.normality.items():
            ws.cell(row=row, column=1, value=method).border = BORDER
            ws.cell(row=row, column=2, value=None if result is None else result.w).border = BORDER
            ws.cell(row=row, column=3, value=None if result is None else result.p).border = BORDER
            row += 1

        row += 1
        ws.cell(row=row, column=1, value="Homoscedasticity (Levene)").font = Font(size=12, bold=True)
        row += 1
        self._header(ws, row, ["F", "df1", "df2", "p"])
        row += 1
        if tests.levene is not None:
            values = [tests.levene.f, tests.levene.df[0], tests.levene.df[1], tests.levene.p]
            for col, value in enumerate(values, 1):
                ws.cell(row=row, column=col, value=value).border = BORDER
        row += 2

        ws.cell(row=row, column=1, value=f"Paired t-tests (Bonferroni, m={tests.m})").font = Font(size=12, bold=True)
        row += 1
        self._header(ws, row, ["Comparison", "t", "df", "p", "p adjusted"])
        row += 1
        for test in tests.pairwise:
            values = [f"{test.reference} vs {test.method}", test.t, test.df, test.p, test.p_adjusted]
            for col, value in enumerate(values, 1):
                cell = ws.cell(row=row, column=col, value=value)
                cell.border = BORDER
                if test.significant:
                    cell.fill = SIGNIFICANT_FILL
            row += 1

        ws.column_dimensions["A"].width = 30
        for col_letter in "BCDE":
            ws.column_dimensions[col_letter].width = 14
