"""실행 환경 설정 모듈.

.env 파일과 환경 변수에서 출력 경로, 결과 DB, 로그 레벨을 읽어요.
"""

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv

from speech_bci.errors import InvalidConfigError

BASE_DIR = Path(__file__).resolve().parent.parent
DEFAULT_DB_PATH = BASE_DIR / "data" / "results.db"


@dataclass(frozen=True)
class Settings:
    """환경 설정 값.

    Attributes:
        output_dir (Path): 리포트/모델 출력 디렉토리
        database_url (str): 결과 저장소 SQLAlchemy URL
        log_level (str): 로그 레벨 이름
        num_threads (int): torch 연산 스레드 수 (결정성을 위해 기본 1)
    """

    output_dir: Path
    database_url: str
    log_level: str
    num_threads: int


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """.env를 한 번 로드하고 설정을 반환해요.

    Returns:
        Settings: 환경 변수가 기본값을 덮어쓴 설정
    """
    load_dotenv()

    num_threads = int(os.getenv("SPEECH_BCI_NUM_THREADS", "1"))
    if num_threads < 1:
        raise InvalidConfigError("SPEECH_BCI_NUM_THREADS must be >= 1")

    return Settings(
        output_dir=Path(os.getenv("SPEECH_BCI_OUTPUT_DIR", "output")),
        database_url=os.getenv("SPEECH_BCI_DATABASE_URL", f"sqlite:///{DEFAULT_DB_PATH}"),
        log_level=os.getenv("SPEECH_BCI_LOG_LEVEL", "INFO").upper(),
        num_threads=num_threads,
    )
