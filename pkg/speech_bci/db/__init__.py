"""
Database Module
- SQLite(기본) 기반 교차 검증 결과 저장
- 실행(run)별 fold 결과 / 피험자 평균 조회
"""

from .database import get_db, get_engine, get_session, init_db, session_factory
from .models import Base, FoldResultRecord
from .repository import ResultRepository

__all__ = [
    "init_db",
    "get_db",
    "get_engine",
    "get_session",
    "session_factory",
    "FoldResultRecord",
    "Base",
    "ResultRepository",
]
