"""층화 k-fold 교차 검증 모듈.

fold 배정은 시드 고정 셔플(StratifiedKFold)로 정해지고,
fold마다 파이프라인을 새로 만들어 학습 fold 안에서만 학습해요.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.model_selection import StratifiedKFold

from speech_bci.errors import FileFormatError, InvalidParameterError, StratificationError
from speech_bci.evaluation.pipelines import Pipeline, get_pipeline
from speech_bci.signal_core.recording import EpochSet

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 5
RESULT_COLUMNS = ["subject", "pipeline", "fold", "accuracy"]

PipelineFactory = Callable[[int], Pipeline]


@dataclass
class CvResult:
    """교차 검증 결과.

    Attributes:
        pipeline (str): 파이프라인 이름
        subject (str): 피험자 ID
        accuracies (list[float]): fold 순서의 정확도
        test_sizes (list[int]): fold별 평가 트라이얼 수
    """

    pipeline: str
    subject: str
    accuracies: list[float] = field(default_factory=list)
    test_sizes: list[int] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "subject": self.subject,
                "pipeline": self.pipeline,
                "fold": np.arange(1, len(self.accuracies) + 1),
                "accuracy": self.accuracies,
            },
            columns=RESULT_COLUMNS,
        )


def fold_assignments(labels: np.ndarray, k: int = DEFAULT_FOLDS, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """층화 k-fold (학습 인덱스, 평가 인덱스) 목록을 만들어요.

    Args:
        labels (np.ndarray): 트라이얼 라벨
        k (int): fold 수 (2 이상)
        seed (int): 셔플 시드

    Returns:
        list[tuple[np.ndarray, np.ndarray]]: fold 순서의 인덱스 쌍

    Raises:
        StratificationError: 어떤 클래스의 트라이얼이 k개 미만일 때
    """
    if k < 2:
        raise InvalidParameterError(f"k must be >= 2, got {k}")
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    short = [(int(c), int(n)) for c, n in zip(classes, counts, strict=True) if n < k]
    if short:
        raise StratificationError(f"classes with fewer than k={k} trials: {short}")
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return [(train, test) for train, test in splitter.split(np.zeros(labels.size), labels)]


def _factory(pipeline: str | PipelineFactory) -> PipelineFactory:
    if callable(pipeline):
        return pipeline
    name = pipeline
    get_pipeline(name)  # 이름 검증
    return lambda fold_seed: get_pipeline(name, seed=fold_seed)


def cross_validate(
    pipeline: str | PipelineFactory,
    dataset: EpochSet,
    k: int = DEFAULT_FOLDS,
    seed: int = 0,
    subject: str = "S1",
    n_jobs: int = 1,
) -> CvResult:
    """파이프라인을 층화 k-fold로 평가해요.

    fold i의 파이프라인 시드는 seed + i예요. n_jobs > 1이면 fold를 병렬로 돌리지만
    결과는 항상 fold 순서로 모아요.

    Args:
        pipeline (str | PipelineFactory): 파이프라인 이름 또는 시드 → Pipeline 팩토리
        dataset (EpochSet): 전체 에폭
        k (int): fold 수
        seed (int): fold 셔플 시드
        subject (str): 결과에 기록할 피험자 ID
        n_jobs (int): 동시에 돌릴 fold 수

    Returns:
        CvResult: fold별 정확도
    """
    if n_jobs < 1:
        raise InvalidParameterError(f"n_jobs must be >= 1, got {n_jobs}")
    folds = fold_assignments(dataset.labels, k, seed)
    make = _factory(pipeline)

    def run_fold(fold: int) -> tuple[float, int]:
        train_idx, test_idx = folds[fold]
        model = make(seed + fold).fit(dataset.subset(train_idx))
        test_set = dataset.subset(test_idx)
        accuracy = model.score(test_set)
        logger.debug("fold %d/%d: accuracy=%.4f", fold + 1, k, accuracy)
        return accuracy, len(test_set)

    if n_jobs == 1:
        outcomes = [run_fold(i) for i in range(k)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(run_fold, range(k)))

    name = pipeline if isinstance(pipeline, str) else make(seed).name
    result = CvResult(
        pipeline=name,
        subject=subject,
        accuracies=[acc for acc, _ in outcomes],
        test_sizes=[n for _, n in outcomes],
    )
    logger.info("[OK] %s %s: %d-fold mean accuracy %.4f", subject, name, k, result.mean)
    return result


def results_frame(results: list[CvResult]) -> pd.DataFrame:
    """여러 CvResult를 하나의 fold 결과 표로 합쳐요."""
    if not results:
        return pd.DataFrame(columns=RESULT_COLUMNS)
    return pd.concat([r.to_frame() for r in results], ignore_index=True)


def write_results_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    """fold 결과를 CSV(subject,pipeline,fold,accuracy)로 저장해요."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame[RESULT_COLUMNS].to_csv(path, index=False, float_format="%.6f")
    return path


def read_results_csv(path: str | Path) -> pd.DataFrame:
    """write_results_csv로 저장한 CSV를 읽어요."""
    try:
        frame = pd.read_csv(path, dtype={"subject": str, "pipeline": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileFormatError(f"cannot read results {path}: {e}") from e
    missing = set(RESULT_COLUMNS) - set(frame.columns)
    if missing:
        raise FileFormatError(f"{path} is missing columns {sorted(missing)}")
    return frame[RESULT_COLUMNS]
