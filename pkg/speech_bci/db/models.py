"""데이터베이스 모델 모듈.

교차 검증 fold 결과 테이블 정의를 포함해요.
"""

from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Float, Index, Integer, String
from sqlalchemy.orm import DeclarativeBase


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Base(DeclarativeBase):
    """SQLAlchemy 모델의 베이스 클래스."""

    pass


class FoldResultRecord(Base):
    """fold별 정확도 테이블.

    실행(run) × 파이프라인 × 피험자 × fold 하나가 한 행이에요.

    Attributes:
        id (int): 기본 키
        run_id (str): 실행 ID
        pipeline (str): 파이프라인 이름
        subject (str): 피험자 ID
        fold (int): fold 번호 (1부터)
        accuracy (float): 평가 fold 정확도
        seed (int): 교차 검증 시드
        n_trials (int): 피험자의 전체 트라이얼 수
        created_at (datetime): 생성 시각
    """

    __tablename__ = "fold_results"

    id = Column(Integer, primary_key=True, autoincrement=True)

    run_id = Column(String(64), nullable=False, index=True)
    pipeline = Column(String(32), nullable=False)
    subject = Column(String(32), nullable=False)
    fold = Column(Integer, nullable=False)

    accuracy = Column(Float, nullable=False)

    seed = Column(Integer, nullable=False, default=0)
    n_trials = Column(Integer, nullable=False, default=0)

    created_at = Column(DateTime, default=_utcnow)

    __table_args__ = (Index("ix_fold_run_pipeline_subject", "run_id", "pipeline", "subject"),)

    def __repr__(self):
        return f"<FoldResultRecord({self.run_id}, {self.pipeline}, {self.subject}, fold {self.fold}: {self.accuracy})>"

    def to_dict(self):
        """레코드를 딕셔너리로 변환해요 (시각은 ISO 포맷)."""
        return {
            "id": self.id,
            "run_id": self.run_id,
            "pipeline": self.pipeline,
            "subject": self.subject,
            "fold": self.fold,
            "accuracy": self.accuracy,
            "seed": self.seed,
            "n_trials": self.n_trials,
            "created_at": self.created_at.isoformat() if self.created_at else None,
        }
