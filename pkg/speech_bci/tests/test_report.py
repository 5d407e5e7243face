"""리포트 생성 테스트.

Markdown 표 형식, CSV 저장 후 되읽기, Excel 시트 구성을 확인해요.
"""

import numpy as np
import pytest
from openpyxl import load_workbook

from speech_bci.errors import FileFormatError, InvalidParameterError
from speech_bci.evaluation import ResultTable, compare_methods
from speech_bci.report import build_report, parse_result_csv, to_csv, to_markdown


@pytest.fixture
def table_i_tests(table_i):
    """기준 방법 비교 표의 통계 검정 fixture."""
    return compare_methods(table_i, m=2)


class TestMarkdown:
    """Markdown 리포트 테스트 클래스."""

    def test_summary_rows(self, table_i):
        """Avg./Std. 행이 소수 4자리로 출판 값과 같은지 테스트."""
        text = to_markdown(table_i)
        lines = text.splitlines()

        assert lines[0] == "| # of subjects | PSD-SVM | CSP-LDA | Proposed |"
        assert lines[1] == "| --- | --- | --- | --- |"
        assert lines[2] == "| 1 | 0.4723 | 0.4944 | 0.6084 |"
        assert lines[-2] == "| Avg. | 0.4020 | 0.4202 | 0.5648 |"
        assert lines[-1] == "| Std. | 0.0491 | 0.0535 | 0.0197 |"

    def test_statistics_section(self, table_i, table_i_tests):
        """검정 섹션에 유의한 비교가 표시되는지 테스트."""
        text = to_markdown(table_i, table_i_tests)

        assert "## Statistical tests" in text
        assert "### Paired t-tests (Bonferroni, m=2)" in text
        row = next(line for line in text.splitlines() if line.startswith("| Proposed vs PSD-SVM"))
        assert row.endswith(" * |")
        assert "F(2, 27) = 6.1975" in text

    def test_empty_table(self):
        """방법이 없으면 헤더와 구분선만 내보내는지 테스트."""
        table = ResultTable(methods=(), subjects=(), accuracies=np.empty((0, 0)))

        assert to_markdown(table) == "| # of subjects |\n| --- |\n"

    def test_single_subject_std_dash(self):
        """피험자가 하나면 Std. 칸이 "-"인지 테스트."""
        table = ResultTable(methods=("a",), subjects=("fold 1",), accuracies=np.array([[0.5]]))

        assert to_markdown(table).splitlines()[-1] == "| Std. | - |"


class TestCsv:
    """CSV 리포트 테스트 클래스."""

    def test_crlf_and_header(self, table_i):
        """CRLF 줄바꿈과 헤더 행을 쓰는지 테스트."""
        text = to_csv(table_i)

        assert text.startswith("subject,PSD-SVM,CSP-LDA,Proposed\r\n")
        assert text.count("\r\n") == 13
        assert "\r\nAvg.,0.4020,0.4202,0.5648\r\n" in text

    def test_round_trip(self, table_ii):
        """CSV를 되읽으면 같은 표인지 테스트."""
        assert parse_result_csv(to_csv(table_ii)) == table_ii

    def test_paired_test_rows(self, table_i, table_i_tests):
        """t와 보정 p 행이 방법 열에 맞춰 붙고 되읽을 때는 건너뛰는지 테스트."""
        text = to_csv(table_i, table_i_tests)
        lines = text.split("\r\n")
        t_row = next(line for line in lines if line.startswith("t vs Proposed,"))
        p_row = next(line for line in lines if line.startswith("p adjusted vs Proposed,"))

        assert text.count("\r\n") == 15
        assert t_row.endswith(",")
        assert p_row.split(",")[1].endswith("*")
        assert float(t_row.split(",")[1]) == pytest.approx(table_i_tests.pair("PSD-SVM").t, abs=1e-4)
        assert parse_result_csv(text) == table_i

    def test_no_methods_is_header_only(self):
        """방법이 없으면 피험자가 있어도 헤더만 쓰는지 테스트."""
        table = ResultTable(methods=(), subjects=("S1", "S2"), accuracies=np.empty((2, 0)))

        assert to_csv(table) == "subject\r\n"

    def test_tampered_summary_rejected(self, table_i):
        """Avg. 행이 피험자 값과 맞지 않으면 형식 오류인지 테스트."""
        text = to_csv(table_i).replace("Avg.,0.4020", "Avg.,0.4100")

        with pytest.raises(FileFormatError):
            parse_result_csv(text)

    def test_missing_subject_column(self):
        """subject 열이 없으면 형식 오류인지 테스트."""
        with pytest.raises(FileFormatError):
            parse_result_csv("method,a\r\n1,0.5\r\n")


class TestBuildReport:
    """리포트 빌더 테스트 클래스."""

    def test_markdown_file(self, tmp_path, table_i):
        """Markdown 리포트를 파일로 저장하는지 테스트."""
        path = tmp_path / "reports" / "table.md"

        text = build_report(table_i, format="markdown", path=path)

        assert path.read_text(encoding="utf-8") == text

    def test_csv_file_keeps_crlf(self, tmp_path, table_i):
        """CSV 파일이 CRLF를 그대로 유지하는지 테스트."""
        path = tmp_path / "table.csv"

        build_report(table_i, format="csv", path=path)

        assert b"\r\n" in path.read_bytes()
        assert b"\r\r\n" not in path.read_bytes()

    def test_xlsx_sheets(self, tmp_path, table_i, table_i_tests):
        """Excel 리포트에 세 시트가 있는지 테스트."""
        path = build_report(table_i, table_i_tests, format="xlsx", path=tmp_path / "report.xlsx")

        workbook = load_workbook(path)
        assert workbook.sheetnames == ["Summary", "Per Subject", "Statistics"]

    def test_xlsx_needs_path(self, table_i):
        """경로 없는 Excel 리포트를 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            build_report(table_i, format="xlsx")

    def test_unknown_format(self, table_i):
        """알 수 없는 형식을 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            build_report(table_i, format="pdf")
