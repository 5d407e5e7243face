"""결과 리포지토리 모듈.

교차 검증 fold 결과의 저장과 실행별 조회를 담당해요.
"""

from collections.abc import Sequence

import pandas as pd
from sqlalchemy import func
from sqlalchemy.orm import Session

from .database import get_session
from .models import FoldResultRecord

RESULT_COLUMNS = ["subject", "pipeline", "fold", "accuracy"]


class ResultRepository:
    """fold 결과 저장 및 조회를 관리하는 리포지토리 클래스.

    Attributes:
        _session (Session | None): SQLAlchemy 세션 (지연 초기화)
        _database_url (str | None): 세션을 만들 때 쓸 URL (None이면 설정 값)
    """

    def __init__(self, session: Session | None = None, database_url: str | None = None):
        """ResultRepository를 초기화해요.

        Args:
            session: SQLAlchemy 세션 (기본값: None, 필요시 자동 생성)
            database_url: 세션을 새로 만들 때 쓸 URL
        """
        self._session = session
        self._database_url = database_url

    @property
    def session(self) -> Session:
        """세션을 반환해요. 없으면 새로 생성해요."""
        if self._session is None:
            self._session = get_session(self._database_url)
        return self._session

    def close(self):
        """데이터베이스 세션을 닫아요."""
        if self._session:
            self._session.close()

    def save_fold_results(
        self,
        run_id: str,
        pipeline: str,
        subject: str,
        seed: int,
        accuracies: Sequence[float],
        n_trials: int,
    ) -> int:
        """한 피험자·파이프라인의 fold 정확도를 저장해요.

        중복 방지를 위해 같은 run/pipeline/subject의 기존 데이터는 삭제해요.

        Returns:
            int: 저장된 레코드 수
        """
        self.session.query(FoldResultRecord).filter(
            FoldResultRecord.run_id == run_id,
            FoldResultRecord.pipeline == pipeline,
            FoldResultRecord.subject == subject,
        ).delete()

        for fold, accuracy in enumerate(accuracies, 1):
            self.session.add(
                FoldResultRecord(
                    run_id=run_id,
                    pipeline=pipeline,
                    subject=subject,
                    fold=fold,
                    accuracy=float(accuracy),
                    seed=seed,
                    n_trials=n_trials,
                )
            )

        self.session.commit()
        return len(accuracies)

    def get_run_records(self, run_id: str) -> list[FoldResultRecord]:
        result: list[FoldResultRecord] = (
            self.session.query(FoldResultRecord)
            .filter(FoldResultRecord.run_id == run_id)
            .order_by(FoldResultRecord.id)
            .all()
        )
        return result

    def get_run_as_df(self, run_id: str) -> pd.DataFrame:
        """실행 하나의 fold 결과를 subject, pipeline, fold, accuracy 데이터프레임으로 반환해요."""
        records = self.get_run_records(run_id)
        if not records:
            return pd.DataFrame(columns=RESULT_COLUMNS)
        return pd.DataFrame(
            [{"subject": r.subject, "pipeline": r.pipeline, "fold": r.fold, "accuracy": r.accuracy} for r in records],
            columns=RESULT_COLUMNS,
        )

    def get_subject_means(self, run_id: str) -> pd.DataFrame:
        """피험자 × 파이프라인 평균 fold 정확도 표를 반환해요.

        Returns:
            pd.DataFrame: subject 인덱스, 파이프라인별 열 (저장 순서 유지)
        """
        df = self.get_run_as_df(run_id)
        if df.empty:
            return pd.DataFrame()
        subjects = list(dict.fromkeys(df["subject"]))
        pipelines = list(dict.fromkeys(df["pipeline"]))
        wide = df.pivot_table(index="subject", columns="pipeline", values="accuracy", aggfunc="mean")
        wide = wide.reindex(index=subjects, columns=pipelines)
        wide.columns.name = None
        return wide

    def list_runs(self) -> list[str]:
        """저장된 실행 ID를 처음 생성된 순서로 반환해요."""
        rows = (
            self.session.query(FoldResultRecord.run_id)
            .group_by(FoldResultRecord.run_id)
            .order_by(func.min(FoldResultRecord.id))
            .all()
        )
        return [r[0] for r in rows]

    def delete_run(self, run_id: str) -> int:
        """실행 하나의 결과를 모두 삭제해요."""
        count = self.session.query(FoldResultRecord).filter(FoldResultRecord.run_id == run_id).delete()
        self.session.commit()
        return int(count)
