"""
Evaluation Module
- 파이프라인 (PSD-SVM, CSP-LDA, EEGNet, ADNN)
- 층화 k-fold 교차 검증
- 통계 검정 (Shapiro-Wilk, Levene, 대응 t-검정, Bonferroni)
- 결과 표 고정 데이터 검사, 벤치마크 서비스
"""

from .cross_validation import (
    CvResult,
    cross_validate,
    fold_assignments,
    read_results_csv,
    results_frame,
    write_results_csv,
)
from .fixtures import FixtureCheck, check_fixtures, load_fixture_table
from .pipelines import PIPELINES, ConstantPipeline, CspLdaPipeline, NeuralPipeline, Pipeline, PsdSvmPipeline, get_pipeline
from .service import BenchmarkResult, BenchmarkService, run_benchmark
from .stats import bonferroni, levene, mean_std, paired_t_test, shapiro_wilk
from .tables import PairwiseTest, ResultTable, TestReport, compare_methods, results_to_table

__all__ = [
    "PIPELINES",
    "Pipeline",
    "PsdSvmPipeline",
    "CspLdaPipeline",
    "NeuralPipeline",
    "ConstantPipeline",
    "get_pipeline",
    "CvResult",
    "fold_assignments",
    "cross_validate",
    "results_frame",
    "write_results_csv",
    "read_results_csv",
    "mean_std",
    "paired_t_test",
    "bonferroni",
    "shapiro_wilk",
    "levene",
    "ResultTable",
    "TestReport",
    "PairwiseTest",
    "compare_methods",
    "results_to_table",
    "FixtureCheck",
    "check_fixtures",
    "load_fixture_table",
    "BenchmarkResult",
    "BenchmarkService",
    "run_benchmark",
]
