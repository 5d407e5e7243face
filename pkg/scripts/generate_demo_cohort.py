"""
데모용 합성 코호트 벤치마크 스크립트
- 분리도가 다른 합성 코호트에서 얕은 파이프라인을 평가
- 결과 DB에 실행별로 기록하고 피험자 평균 표를 출력
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from speech_bci.db import ResultRepository, init_db
from speech_bci.evaluation import BenchmarkService
from speech_bci.synthgen import SynthConfig

# 분리도별 시나리오: 0이면 우연 수준, 1이면 기본 시그니처 세기
SCENARIOS = {
    "chance": 0.0,
    "weak": 0.4,
    "default": 1.0,
}

N_SUBJECTS = 4
TRIALS_PER_WORD = 20
N_CHANNELS = 16


def generate_demo_cohort():
    """시나리오별 벤치마크를 실행하고 DB에 기록"""

    init_db()
    repo = ResultRepository()

    runs = repo.list_runs()
    if runs:
        print(f"Clearing {len(runs)} existing runs...")
        for run_id in runs:
            repo.delete_run(run_id)

    service = BenchmarkService(repository=repo)

    for seed, (name, separability) in enumerate(SCENARIOS.items()):
        print(f"[{name}] separability={separability}")
        cfg = SynthConfig(n_channels=N_CHANNELS, separability=separability, seed=seed)
        result = service.run(
            N_SUBJECTS,
            ["psd_svm", "csp_lda"],
            cfg,
            trials_per_word=TRIALS_PER_WORD,
            reference="csp_lda",
            run_id=f"demo_{name}",
        )
        means = repo.get_subject_means(result.run_id)
        print(means.round(4).to_string())
        print(f"  mean: {', '.join(f'{m}={v:.4f}' for m, v in means.mean().items())}")

    repo.close()
    print("Demo cohort runs recorded.")


if __name__ == "__main__":
    generate_demo_cohort()
