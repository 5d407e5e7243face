"""결과 표와 통계 검정 묶음 모듈.

피험자 × 방법 정확도 표(ResultTable)와, 그 표에 대한
Shapiro-Wilk / Levene / 대응 t-검정 + Bonferroni 결과(TestReport)를 다뤄요.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from speech_bci.errors import DegenerateDataError, InvalidParameterError
from speech_bci.evaluation.stats import (
    LeveneResult,
    ShapiroResult,
    bonferroni,
    levene,
    paired_t_test,
    shapiro_wilk,
)

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.01


@dataclass(eq=False)
class ResultTable:
    """피험자 × 방법 정확도 표.

    Attributes:
        methods (tuple[str, ...]): 방법 이름 (열)
        subjects (tuple[str, ...]): 피험자 ID (행)
        accuracies (np.ndarray): [subjects × methods] 정확도, [0, 1]
    """

    methods: tuple[str, ...]
    subjects: tuple[str, ...]
    accuracies: np.ndarray

    def __post_init__(self) -> None:
        self.methods = tuple(self.methods)
        self.subjects = tuple(self.subjects)
        acc = np.asarray(self.accuracies, dtype=np.float64).reshape(len(self.subjects), len(self.methods))
        if not np.all(np.isfinite(acc)) or np.any(acc < 0) or np.any(acc > 1):
            raise InvalidParameterError("accuracies must lie in [0, 1]")
        if len(set(self.methods)) != len(self.methods):
            raise InvalidParameterError(f"duplicate method names in {self.methods}")
        self.accuracies = acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResultTable):
            return NotImplemented
        return (
            self.methods == other.methods
            and self.subjects == other.subjects
            and np.array_equal(self.accuracies, other.accuracies)
        )

    def column(self, method: str) -> np.ndarray:
        if method not in self.methods:
            raise InvalidParameterError(f"unknown method {method!r}; table has {self.methods}")
        return self.accuracies[:, self.methods.index(method)]

    @property
    def avg(self) -> np.ndarray:
        """열 평균 (Avg. 행)."""
        if not self.subjects:
            return np.full(len(self.methods), np.nan)
        return self.accuracies.mean(axis=0)

    @property
    def std(self) -> np.ndarray:
        """열 표본 표준편차 (Std. 행, 분모 n−1). 피험자가 2명 미만이면 NaN이에요."""
        if len(self.subjects) < 2:
            return np.full(len(self.methods), np.nan)
        return self.accuracies.std(axis=0, ddof=1)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.accuracies, index=list(self.subjects), columns=list(self.methods))
        frame.index.name = "subject"
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "ResultTable":
        """피험자 인덱스, 방법 열의 DataFrame에서 표를 만들어요."""
        return cls(
            methods=tuple(str(c) for c in frame.columns),
            subjects=tuple(str(i) for i in frame.index),
            accuracies=frame.to_numpy(dtype=np.float64),
        )


@dataclass(frozen=True)
class PairwiseTest:
    """기준 방법 대 비교 방법 대응 t-검정 결과.

    차이의 분산이 0이면 t, p, p_adjusted가 None이에요.
    """

    reference: str
    method: str
    t: float | None
    df: int
    p: float | None
    p_adjusted: float | None

    @property
    def significant(self) -> bool:
        return self.p_adjusted is not None and self.p_adjusted < SIGNIFICANCE


@dataclass
class TestReport:
    """통계 검정 묶음.

    Attributes:
        reference (str): 기준 방법
        m (int): Bonferroni family 크기
        normality (dict[str, ShapiroResult | None]): 방법별 Shapiro-Wilk (계산 불가면 None)
        levene (LeveneResult | None): 모든 방법에 대한 Levene 검정
        pairwise (list[PairwiseTest]): 기준 방법 대 나머지 방법
    """

    __test__ = False

    reference: str
    m: int
    normality: dict[str, ShapiroResult | None] = field(default_factory=dict)
    levene: LeveneResult | None = None
    pairwise: list[PairwiseTest] = field(default_factory=list)

    def pair(self, method: str) -> PairwiseTest:
        for test in self.pairwise:
            if test.method == method:
                return test
        raise InvalidParameterError(f"no comparison of {self.reference!r} against {method!r}")


def compare_methods(table: ResultTable, reference: str | None = None, m: int | None = None) -> TestReport:
    """표의 방법들을 통계적으로 비교해요.

    열마다 Shapiro-Wilk, 모든 열에 Levene, 기준 열 대 나머지 열에 대응 t-검정을 하고
    원래 p 값에 Bonferroni 보정을 적용해요.

    Args:
        table (ResultTable): 결과 표
        reference (str | None): 기준 방법 (None이면 마지막 열)
        m (int | None): Bonferroni family 크기 (None이면 비교 횟수)

    Returns:
        TestReport: 검정 결과

    Raises:
        InvalidParameterError: 방법이 2개 미만이거나 기준 방법이 표에 없을 때
    """
    if len(table.methods) < 2:
        raise InvalidParameterError("comparing methods needs at least 2 columns")
    reference = table.methods[-1] if reference is None else reference
    ref_values = table.column(reference)
    others = [name for name in table.methods if name != reference]
    m = len(others) if m is None else m

    normality: dict[str, ShapiroResult | None] = {}
    for name in table.methods:
        try:
            normality[name] = shapiro_wilk(table.column(name))
        except (DegenerateDataError, ValueError) as e:
            logger.warning("[WARN] Shapiro-Wilk skipped for %s: %s", name, e)
            normality[name] = None

    try:
        homoscedasticity: LeveneResult | None = levene([table.column(name) for name in table.methods])
    except (DegenerateDataError, ValueError) as e:
        logger.warning("[WARN] Levene skipped: %s", e)
        homoscedasticity = None

    raw: list[tuple[str, float | None, float | None]] = []
    for name in others:
        try:
            result = paired_t_test(ref_values, table.column(name))
            raw.append((name, result.t, result.p))
        except (DegenerateDataError, ValueError) as e:
            logger.warning("[WARN] paired t-test %s vs %s skipped: %s", reference, name, e)
            raw.append((name, None, None))

    valid_p = [p for _, _, p in raw if p is not None]
    adjusted = iter(bonferroni(valid_p, m) if valid_p else [])
    pairwise = [
        PairwiseTest(
            reference=reference,
            method=name,
            t=t,
            df=len(table.subjects) - 1,
            p=p,
            p_adjusted=None if p is None else float(next(adjusted)),
        )
        for name, t, p in raw
    ]
    return TestReport(reference=reference, m=m, normality=normality, levene=homoscedasticity, pairwise=pairwise)


def results_to_table(frame: pd.DataFrame, methods: Sequence[str] | None = None) -> ResultTable:
    """fold 결과(subject, pipeline, fold, accuracy)를 피험자 × 방법 표로 모아요.

    피험자가 여럿이면 행은 피험자별 평균 fold 정확도예요.
    피험자가 하나뿐이면 fold를 행으로 써요 ("fold 1", "fold 2", ...).

    Args:
        frame (pd.DataFrame): fold 결과
        methods (Sequence[str] | None): 열 순서 (None이면 처음 등장한 순서)

    Returns:
        ResultTable: 결과 표
    """
    if frame.empty:
        raise InvalidParameterError("no fold results to tabulate")
    order = list(dict.fromkeys(frame["pipeline"])) if methods is None else list(methods)
    missing = set(order) - set(frame["pipeline"])
    if missing:
        raise InvalidParameterError(f"no results for methods {sorted(missing)}")

    frame = frame[frame["pipeline"].isin(order)]
    subjects = list(dict.fromkeys(frame["subject"].astype(str)))
    if len(subjects) == 1:
        wide = frame.pivot_table(index="fold", columns="pipeline", values="accuracy", aggfunc="mean")
        wide.index = [f"fold {int(i)}" for i in wide.index]
    else:
        wide = frame.assign(subject=frame["subject"].astype(str)).pivot_table(
            index="subject", columns="pipeline", values="accuracy", aggfunc="mean"
        )
        wide = wide.reindex(subjects)
    wide = wide[order]
    if wide.isna().to_numpy().any():
        raise InvalidParameterError("fold results do not cover every subject for every method")
    return ResultTable.from_frame(wide)
