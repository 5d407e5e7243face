"""
Signal Core Module
- 연속 EEG 기록과 에폭 데이터 타입
- 노치/대역 통과 필터, 리샘플링, 에폭 추출
"""

from .epoching import epoch_stream
from .filters import bandpass_filter, notch_filter, resample
from .preprocess import PreprocessConfig, preprocess
from .recording import DEFAULT_FS, DEFAULT_N_CHANNELS, MONTAGE_58, WORDS, EpochSet, RawRecording

__all__ = [
    "RawRecording",
    "EpochSet",
    "DEFAULT_FS",
    "DEFAULT_N_CHANNELS",
    "MONTAGE_58",
    "WORDS",
    "notch_filter",
    "bandpass_filter",
    "resample",
    "epoch_stream",
    "PreprocessConfig",
    "preprocess",
]
