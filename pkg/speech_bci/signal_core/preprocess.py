"""전처리 파이프라인 모듈.

노치 → 대역 통과 → 리샘플 → 에폭 추출 순서로 연속 기록을 처리해요.
"""

import logging

from pydantic import BaseModel, Field, model_validator

from speech_bci.signal_core.epoching import epoch_stream
from speech_bci.signal_core.filters import bandpass_filter, notch_filter, resample
from speech_bci.signal_core.recording import WORDS, EpochSet, RawRecording
from speech_bci.synthgen.schedule import ParadigmSchedule

logger = logging.getLogger(__name__)


class PreprocessConfig(BaseModel):
    """전처리 설정.

    Attributes:
        notch_hz (float): 노치 중심 주파수
        notch_quality (float): 노치 Q 값
        band (tuple[float, float]): 대역 통과 범위 (Hz)
        target_fs (float): 리샘플 목표 주파수
        epoch_s (float): 에폭 길이 (초)
    """

    notch_hz: float = Field(default=60.0, gt=0)
    notch_quality: float = Field(default=30.0, gt=0)
    band: tuple[float, float] = (0.5, 40.0)
    target_fs: float = Field(default=250.0, gt=0)
    epoch_s: float = Field(default=2.0, gt=0)

    @model_validator(mode="after")
    def _check_band(self) -> "PreprocessConfig":
        lo, hi = self.band
        if not 0 < lo < hi:
            raise ValueError(f"band must satisfy 0 < lo < hi, got {self.band}")
        return self


def preprocess(
    rec: RawRecording,
    schedule: ParadigmSchedule,
    cfg: PreprocessConfig | None = None,
    class_names: tuple[str, ...] = WORDS,
) -> EpochSet:
    """연속 기록을 학습용 EpochSet으로 변환해요.

    Args:
        rec (RawRecording): 원본 기록 (보통 1,000 Hz)
        schedule (ParadigmSchedule): 패러다임 스케줄
        cfg (PreprocessConfig | None): 전처리 설정 (None이면 기본값)
        class_names (tuple[str, ...]): 클래스 이름

    Returns:
        EpochSet: 전처리된 에폭
    """
    cfg = cfg or PreprocessConfig()
    lo, hi = cfg.band

    filtered = notch_filter(rec, cfg.notch_hz, cfg.notch_quality)
    filtered = bandpass_filter(filtered, lo, hi)
    filtered = resample(filtered, cfg.target_fs)
    epochs = epoch_stream(filtered, schedule, class_names=class_names, epoch_s=cfg.epoch_s)

    logger.info("[OK] preprocessed %d epochs at %.0f Hz", len(epochs), epochs.fs)
    return epochs
