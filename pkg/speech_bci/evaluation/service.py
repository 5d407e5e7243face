"""벤치마크 서비스 모듈.

합성 코호트 생성 → 전처리 → 피험자별 교차 검증 → 결과 표와 통계 검정까지
전체 평가 프로토콜을 관리하는 서비스 레이어예요.
"""

import logging
import uuid
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from datetime import datetime
from typing import Any

import pandas as pd

from speech_bci.db import ResultRepository, init_db
from speech_bci.errors import InvalidParameterError
from speech_bci.signal_core.preprocess import PreprocessConfig, preprocess
from speech_bci.signal_core.recording import EpochSet
from speech_bci.synthgen.generator import SynthConfig, synthesize_cohort

from .cross_validation import DEFAULT_FOLDS, CvResult, cross_validate, results_frame
from .pipelines import PIPELINES, Pipeline, get_pipeline
from .tables import ResultTable, TestReport, compare_methods, results_to_table

logger = logging.getLogger(__name__)

DEFAULT_REFERENCE = "adnn"


@dataclass
class BenchmarkResult:
    """벤치마크 결과.

    Attributes:
        table (ResultTable): 피험자 × 파이프라인 정확도 표
        tests (TestReport | None): 통계 검정 (파이프라인이 하나면 None)
        folds (pd.DataFrame): fold별 결과 (subject, pipeline, fold, accuracy)
        run_id (str | None): 저장소에 기록한 실행 ID
    """

    table: ResultTable
    tests: TestReport | None
    folds: pd.DataFrame
    run_id: str | None = None


class BenchmarkService:
    """벤치마크 서비스.

    Attributes:
        repository (ResultRepository | None): 결과 저장소 (기록하지 않으면 None)
        n_jobs (int): fold 병렬 실행 수
        pipeline_options (dict[str, dict[str, Any]]): 파이프라인별 생성자 인자
    """

    def __init__(
        self,
        repository: ResultRepository | None = None,
        record: bool = False,
        n_jobs: int = 1,
        pipeline_options: Mapping[str, Mapping[str, Any]] | None = None,
    ):
        """BenchmarkService를 초기화해요.

        Args:
            repository: 결과 저장소 (record=True이고 None이면 설정 DB 사용)
            record: fold 결과를 저장소에 기록할지 여부
            n_jobs: fold 병렬 실행 수
            pipeline_options: 파이프라인 이름별 생성자 인자 (예: 신경망 TrainHyper)
        """
        self.repository = repository
        if record and self.repository is None:
            init_db()
            self.repository = ResultRepository()
        self.n_jobs = n_jobs
        self.pipeline_options = {name: dict(opts) for name, opts in (pipeline_options or {}).items()}

    def factory(self, name: str) -> Callable[[int], Pipeline]:
        """fold 시드 → 파이프라인 팩토리를 반환해요."""
        options = self.pipeline_options.get(name, {})
        return lambda fold_seed: get_pipeline(name, seed=fold_seed, **options)

    def evaluate_subject(
        self,
        epochs: EpochSet,
        pipelines: Sequence[str],
        subject: str = "S1",
        folds: int = DEFAULT_FOLDS,
        seed: int = 0,
        run_id: str | None = None,
    ) -> list[CvResult]:
        """한 피험자의 에폭에 대해 파이프라인마다 교차 검증을 해요.

        Returns:
            list[CvResult]: 파이프라인 순서의 결과
        """
        results = []
        for name in pipelines:
            result = cross_validate(self.factory(name), epochs, k=folds, seed=seed, subject=subject, n_jobs=self.n_jobs)
            results.append(result)
            if self.repository is not None and run_id is not None:
                self.repository.save_fold_results(run_id, name, subject, seed, result.accuracies, len(epochs))
        return results

    def run(
        self,
        n_subjects: int,
        pipelines: Sequence[str] = PIPELINES,
        synth_cfg: SynthConfig | None = None,
        folds: int = DEFAULT_FOLDS,
        seed: int = 0,
        trials_per_word: int = 50,
        preprocess_cfg: PreprocessConfig | None = None,
        reference: str | None = None,
        m: int | None = None,
        on_subject: Callable[[str], None] | None = None,
        run_id: str | None = None,
    ) -> BenchmarkResult:
        """전체 벤치마크를 실행해요.

        Args:
            n_subjects: 피험자 수
            pipelines: 평가할 파이프라인 이름
            synth_cfg: 합성 설정 (None이면 seed로 만든 기본 설정)
            folds: fold 수
            seed: 교차 검증 시드
            trials_per_word: 피험자별 단어당 트라이얼 수
            preprocess_cfg: 전처리 설정
            reference: 기준 파이프라인 (None이면 "adnn", 없으면 마지막 파이프라인)
            m: Bonferroni family 크기 (None이면 비교 횟수)
            on_subject: 피험자 하나가 끝날 때마다 호출할 콜백
            run_id: 저장소 실행 ID (None이면 시각 + 임의 접미사)

        Returns:
            BenchmarkResult: 결과 표, 검정, fold 결과
        """
        pipelines = list(pipelines)
        if not pipelines:
            raise InvalidParameterError("at least one pipeline is required")
        unknown = [p for p in pipelines if p not in PIPELINES]
        if unknown:
            raise InvalidParameterError(f"unknown pipelines {unknown}; choose from {PIPELINES}")
        if reference is None:
            reference = DEFAULT_REFERENCE if DEFAULT_REFERENCE in pipelines else pipelines[-1]
        elif reference not in pipelines:
            raise InvalidParameterError(f"reference {reference!r} is not among {pipelines}")

        synth_cfg = synth_cfg or SynthConfig(seed=seed)
        if self.repository is None:
            run_id = None
        elif run_id is None:
            run_id = f"{datetime.now():%Y%m%d_%H%M%S}_{uuid.uuid4().hex[:6]}"

        results: list[CvResult] = []
        for subject in synthesize_cohort(n_subjects, trials_per_word, synth_cfg):
            epochs = preprocess(subject.recording, subject.schedule, preprocess_cfg, class_names=synth_cfg.words)
            results += self.evaluate_subject(epochs, pipelines, subject.subject_id, folds, seed, run_id)
            if on_subject is not None:
                on_subject(subject.subject_id)

        frame = results_frame(results)
        table = results_to_table(frame, pipelines)
        tests = compare_methods(table, reference, m) if len(pipelines) > 1 else None
        logger.info("[OK] benchmark finished: %d subjects x %d pipelines", n_subjects, len(pipelines))
        return BenchmarkResult(table=table, tests=tests, folds=frame, run_id=run_id)


def run_benchmark(
    n_subjects: int,
    pipelines: Sequence[str] = PIPELINES,
    synth_cfg: SynthConfig | None = None,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    **kwargs,
) -> tuple[ResultTable, TestReport | None]:
    """벤치마크를 실행하는 헬퍼 함수예요.

    Returns:
        tuple[ResultTable, TestReport | None]: (결과 표, 통계 검정)
    """
    result = BenchmarkService().run(n_subjects, pipelines, synth_cfg, folds, seed, **kwargs)
    return result.table, result.tests
