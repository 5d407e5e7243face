"""결과 저장소 테스트.

fold 결과 저장, 실행별 조회, 피험자 평균 표와 삭제를 확인해요.
"""

import pytest
from sqlalchemy import inspect

from speech_bci.db import FoldResultRecord, ResultRepository, get_engine, init_db


class TestInitDb:
    """데이터베이스 초기화 테스트 클래스."""

    def test_creates_fold_results_table(self):
        """인메모리 DB에 fold_results 테이블을 만드는지 테스트."""
        init_db("sqlite://")

        tables = inspect(get_engine("sqlite://")).get_table_names()

        assert "fold_results" in tables

    def test_idempotent(self, tmp_path):
        """두 번 초기화해도 기존 데이터가 남는지 테스트."""
        url = f"sqlite:///{tmp_path / 'nested' / 'results.db'}"
        init_db(url)
        repo = ResultRepository(database_url=url)
        repo.save_fold_results("run", "csp_lda", "S1", 0, [0.5], 40)

        init_db(url)

        assert len(repo.get_run_records("run")) == 1
        repo.close()


class TestResultRepository:
    """ResultRepository 테스트 클래스."""

    def test_save_and_read_back(self, repository):
        """저장한 fold 정확도를 순서대로 돌려주는지 테스트."""
        saved = repository.save_fold_results("run-a", "csp_lda", "S1", 3, [0.5, 0.75, 0.25], 200)

        records = repository.get_run_records("run-a")

        assert saved == 3
        assert [r.fold for r in records] == [1, 2, 3]
        assert [r.accuracy for r in records] == [0.5, 0.75, 0.25]
        assert records[0].seed == 3
        assert records[0].n_trials == 200

    def test_save_replaces_previous_rows(self, repository):
        """같은 실행·파이프라인·피험자를 다시 저장하면 덮어쓰는지 테스트."""
        repository.save_fold_results("run-a", "csp_lda", "S1", 0, [0.1, 0.2], 40)

        repository.save_fold_results("run-a", "csp_lda", "S1", 0, [0.9], 40)

        assert [r.accuracy for r in repository.get_run_records("run-a")] == [0.9]

    def test_run_as_df(self, repository):
        """실행 결과를 subject, pipeline, fold, accuracy 표로 돌려주는지 테스트."""
        repository.save_fold_results("run-a", "psd_svm", "S1", 0, [0.25, 0.5], 40)

        frame = repository.get_run_as_df("run-a")

        assert list(frame.columns) == ["subject", "pipeline", "fold", "accuracy"]
        assert frame["fold"].tolist() == [1, 2]

    def test_unknown_run_is_empty(self, repository):
        """없는 실행은 열만 있는 빈 표인지 테스트."""
        frame = repository.get_run_as_df("missing")

        assert frame.empty
        assert list(frame.columns) == ["subject", "pipeline", "fold", "accuracy"]
        assert repository.get_subject_means("missing").empty

    def test_subject_means_wide_frame(self, repository):
        """피험자 × 파이프라인 평균 표가 저장 순서를 유지하는지 테스트."""
        repository.save_fold_results("run-a", "psd_svm", "S2", 0, [0.2, 0.4], 40)
        repository.save_fold_results("run-a", "adnn", "S2", 0, [0.6, 0.8], 40)
        repository.save_fold_results("run-a", "psd_svm", "S1", 0, [0.3, 0.5], 40)
        repository.save_fold_results("run-a", "adnn", "S1", 0, [0.7, 0.9], 40)

        wide = repository.get_subject_means("run-a")

        assert list(wide.index) == ["S2", "S1"]
        assert list(wide.columns) == ["psd_svm", "adnn"]
        assert wide.loc["S1", "adnn"] == pytest.approx(0.8)
        assert wide.loc["S2", "psd_svm"] == pytest.approx(0.3)

    def test_list_runs_in_creation_order(self, repository):
        """실행 ID를 처음 저장된 순서로 나열하는지 테스트."""
        repository.save_fold_results("zeta", "csp_lda", "S1", 0, [0.5], 40)
        repository.save_fold_results("alpha", "csp_lda", "S1", 0, [0.5], 40)
        repository.save_fold_results("zeta", "psd_svm", "S1", 0, [0.5], 40)

        assert repository.list_runs() == ["zeta", "alpha"]

    def test_delete_run(self, repository):
        """실행 하나만 지우고 삭제한 행 수를 돌려주는지 테스트."""
        repository.save_fold_results("keep", "csp_lda", "S1", 0, [0.5, 0.5], 40)
        repository.save_fold_results("drop", "csp_lda", "S1", 0, [0.5, 0.5, 0.5], 40)

        deleted = repository.delete_run("drop")

        assert deleted == 3
        assert repository.list_runs() == ["keep"]

    def test_record_to_dict(self, repository):
        """레코드 딕셔너리에 ISO 생성 시각이 들어가는지 테스트."""
        repository.save_fold_results("run-a", "csp_lda", "S1", 0, [0.5], 40)

        record: FoldResultRecord = repository.get_run_records("run-a")[0]
        payload = record.to_dict()

        assert payload["pipeline"] == "csp_lda"
        assert isinstance(payload["created_at"], str)
