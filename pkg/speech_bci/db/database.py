"""데이터베이스 연결 및 세션 관리 모듈.

결과 저장소(기본 SQLite) 연결과 세션 관리를 담당해요.
연결 URL은 설정(SPEECH_BCI_DATABASE_URL)에서 읽고, 엔진은 처음 쓸 때 만들어요.
"""

import logging
from collections.abc import Iterator
from functools import lru_cache
from pathlib import Path
from typing import Any

from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker
from sqlalchemy.pool import StaticPool

from speech_bci.config import get_settings

logger = logging.getLogger(__name__)

MEMORY_URLS = ("sqlite://", "sqlite:///:memory:")


def get_engine(database_url: str | None = None) -> Engine:
    """URL별로 엔진을 하나씩 만들어 재사용해요.

    Args:
        database_url: SQLAlchemy URL (기본값: None, 설정 값 사용)
    """
    return _engine_for(database_url or get_settings().database_url)


@lru_cache(maxsize=8)
def _engine_for(url: str) -> Engine:
    kwargs: dict[str, Any] = {}
    if url.startswith("sqlite"):
        # SQLite는 check_same_thread=False 필요
        kwargs["connect_args"] = {"check_same_thread": False}
        if url in MEMORY_URLS:
            # 인메모리 DB는 연결 하나를 공유해야 테이블이 보여요
            kwargs["poolclass"] = StaticPool
        elif url.startswith("sqlite:///"):
            Path(url.removeprefix("sqlite:///")).parent.mkdir(parents=True, exist_ok=True)
    return create_engine(url, echo=False, **kwargs)


def session_factory(database_url: str | None = None) -> sessionmaker[Session]:
    return sessionmaker(autocommit=False, autoflush=False, bind=get_engine(database_url))


def init_db(database_url: str | None = None) -> None:
    """데이터베이스 테이블을 초기화해요.

    이미 존재하는 테이블은 건너뛰어요.
    """
    from .models import Base

    engine = get_engine(database_url)
    Base.metadata.create_all(bind=engine)
    logger.info("[OK] results database initialized: %s", engine.url)


def get_db(database_url: str | None = None) -> Iterator[Session]:
    """세션을 열고 사용 후 자동으로 닫아요.

    Yields:
        Session: SQLAlchemy 세션 객체
    """
    db = session_factory(database_url)()
    try:
        yield db
    finally:
        db.close()


def get_session(database_url: str | None = None) -> Session:
    """세션을 직접 반환해요. 호출자가 세션을 닫아야 해요."""
    return session_factory(database_url)()
