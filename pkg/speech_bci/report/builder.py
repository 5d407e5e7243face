"""결과 리포트 생성 모듈.

ResultTable과 TestReport를 Markdown, CSV, Excel 형식으로 내보내고,
CSV 리포트를 다시 ResultTable로 읽어요.
"""

import csv
import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from speech_bci.errors import FileFormatError, InvalidParameterError
from speech_bci.evaluation.tables import SIGNIFICANCE, ResultTable, TestReport
from speech_bci.report.excel_generator import ExcelReportGenerator

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("markdown", "csv", "xlsx")
SUBJECT_HEADER = "# of subjects"
CSV_SUBJECT_COLUMN = "subject"
AVG_ROW = "Avg."
STD_ROW = "Std."
SUMMARY_TOLERANCE = 5e-5
T_ROW_PREFIX = "t vs "
P_ROW_PREFIX = "p adjusted vs "


def _fmt(value: float) -> str:
    return "-" if not np.isfinite(value) else f"{value:.4f}"


def _fmt_p(value: float | None) -> str:
    if value is None:
        return "n/a"
    return f"{value:.4f}" if value >= 1e-4 else f"{value:.2e}"


def _markdown_row(cells: list[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def _tests_markdown(tests: TestReport) -> list[str]:
    lines = ["", "## Statistical tests", "", "### Normality (Shapiro-Wilk)", ""]
    lines.append(_markdown_row(["Method", "W", "p"]))
    lines.append(_markdown_row(["---"] * 3))
    for name, result in tests.normality.items():
        if result is None:
            lines.append(_markdown_row([name, "n/a", "n/a"]))
        else:
            lines.append(_markdown_row([name, f"{result.w:.4f}", _fmt_p(result.p)]))

    lines += ["", "### Homoscedasticity (Levene)", ""]
    if tests.levene is None:
        lines.append("n/a")
    else:
        df1, df2 = tests.levene.df
        lines.append(f"F({df1}, {df2}) = {tests.levene.f:.4f}, p = {_fmt_p(tests.levene.p)}")

    lines += ["", f"### Paired t-tests (Bonferroni, m={tests.m})", ""]
    lines.append(_markdown_row(["Comparison", "t", "df", "p", "p adjusted"]))
    lines.append(_markdown_row(["---"] * 5))
    for test in tests.pairwise:
        marker = " *" if test.significant else ""
        lines.append(
            _markdown_row(
                [
                    f"{test.reference} vs {test.method}",
                    "n/a" if test.t is None else f"{test.t:.4f}",
                    str(test.df),
                    _fmt_p(test.p),
                    _fmt_p(test.p_adjusted) + marker,
                ]
            )
        )
    lines += ["", f"\\* adjusted p < {SIGNIFICANCE}"]
    return lines


def to_markdown(table: ResultTable, tests: TestReport | None = None) -> str:
    """Markdown 표로 내보내요. 방법이 없으면 헤더만 내보내요."""
    header = [_markdown_row([SUBJECT_HEADER, *table.methods]), _markdown_row(["---"] * (len(table.methods) + 1))]
    if not table.methods:
        return "\n".join(header) + "\n"

    lines = list(header)
    for subject, row in zip(table.subjects, table.accuracies, strict=True):
        lines.append(_markdown_row([subject, *(_fmt(v) for v in row)]))
    lines.append(_markdown_row([AVG_ROW, *(_fmt(v) for v in table.avg)]))
    lines.append(_markdown_row([STD_ROW, *(_fmt(v) for v in table.std)]))
    if tests is not None:
        lines += _tests_markdown(tests)
    return "\n".join(lines) + "\n"


def _csv_test_rows(table: ResultTable, tests: TestReport) -> list[list[str]]:
    t_row, p_row = [f"{T_ROW_PREFIX}{tests.reference}"], [f"{P_ROW_PREFIX}{tests.reference}"]
    for method in table.methods:
        test = next((t for t in tests.pairwise if t.method == method), None)
        if test is None:
            t_row.append("")
            p_row.append("")
            continue
        t_row.append("n/a" if test.t is None else f"{test.t:.4f}")
        p_row.append(_fmt_p(test.p_adjusted) + ("*" if test.significant else ""))
    return [t_row, p_row]


def to_csv(table: ResultTable, tests: TestReport | None = None) -> str:
    """RFC-4180 CSV(CRLF, 헤더 행)로 내보내요. 방법이 없으면 헤더만 내보내요.

    피험자 행은 정확히 되읽을 수 있게 repr 정밀도로, Avg./Std. 행은 소수 4자리로 써요.
    tests가 있으면 기준 방법 대비 t와 Bonferroni 보정 p를 방법 열에 맞춘 두 행으로
    덧붙여요 (유의하면 p 뒤에 "*"). Shapiro-Wilk와 Levene 결과는 CSV에 넣지 않아요.
    """
    columns = [CSV_SUBJECT_COLUMN, *table.methods]
    if not table.methods:
        return pd.DataFrame(columns=columns).to_csv(index=False, lineterminator="\r\n")

    rows = [[subject, *(repr(float(v)) for v in row)] for subject, row in zip(table.subjects, table.accuracies, strict=True)]
    if table.subjects:
        rows.append([AVG_ROW, *(_fmt(v) for v in table.avg)])
        rows.append([STD_ROW, *(_fmt(v) for v in table.std)])
    if tests is not None:
        rows += _csv_test_rows(table, tests)
    frame = pd.DataFrame(rows, columns=columns, dtype=object)
    return frame.to_csv(index=False, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)


def parse_result_csv(text: str) -> ResultTable:
    """to_csv 출력을 ResultTable로 읽어요.

    Avg./Std. 행은 표에서 다시 계산한 값과 5e-5 안에서 맞는지 확인하고 버려요.
    검정 행(t vs …, p adjusted vs …)은 건너뛰어요.

    Raises:
        FileFormatError: 헤더가 없거나 Avg./Std. 행이 맞지 않을 때
    """
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileFormatError(f"invalid result CSV: {e}") from e
    if frame.columns.empty or frame.columns[0] != CSV_SUBJECT_COLUMN:
        raise FileFormatError(f"result CSV must start with a {CSV_SUBJECT_COLUMN!r} column")

    frame = frame.set_index(CSV_SUBJECT_COLUMN)
    labels = frame.index.to_series()
    is_test = labels.str.startswith(T_ROW_PREFIX) | labels.str.startswith(P_ROW_PREFIX)
    frame = frame.loc[~is_test.to_numpy()]
    summary = frame.loc[frame.index.isin([AVG_ROW, STD_ROW])]
    body = frame.loc[~frame.index.isin([AVG_ROW, STD_ROW])]
    try:
        table = ResultTable.from_frame(body.astype(np.float64))
    except (ValueError, InvalidParameterError) as e:
        raise FileFormatError(f"invalid accuracies in result CSV: {e}") from e

    expected = {AVG_ROW: table.avg, STD_ROW: table.std}
    for label, values in summary.iterrows():
        observed = pd.to_numeric(values, errors="coerce").to_numpy(dtype=np.float64)
        reference = expected[str(label)]
        both = np.isfinite(reference)
        if not np.allclose(observed[both], reference[both], rtol=0, atol=SUMMARY_TOLERANCE):
            raise FileFormatError(f"{label} row does not match the per-subject values")
    return table


def build_report(
    table: ResultTable,
    tests: TestReport | None = None,
    format: str = "markdown",
    path: str | Path | None = None,
) -> str:
    """리포트를 만들어요.

    Args:
        table (ResultTable): 결과 표
        tests (TestReport | None): 통계 검정 결과
        format (str): "markdown", "csv", "xlsx"
        path (str | Path | None): 저장 경로 (xlsx는 필수)

    Returns:
        str: markdown/csv는 리포트 텍스트, xlsx는 저장된 파일 경로
    """
    if format not in REPORT_FORMATS:
        raise InvalidParameterError(f"format must be one of {REPORT_FORMATS}, got {format!r}")

    if format == "xlsx":
        if path is None:
            raise InvalidParameterError("xlsx reports need an output path")
        path = Path(path)
        generator = ExcelReportGenerator(str(path.parent))
        return generator.create_result_report(table, tests, filename=path.name)

    text = to_markdown(table, tests) if format == "markdown" else to_csv(table, tests)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        # CRLF를 그대로 쓰려고 newline=""
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("[OK] %s report saved: %s", format, path)
    return text
