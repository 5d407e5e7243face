"""
ADNN Module
- EEGNet 백본 (ablation 기준 모델)
- ADNN = EEGNet + pre-LN 다중 헤드 주의 헤드
- 학습, 예측, 학습 기록 CSV
"""

from .architecture import MODEL_KINDS, build_adnn, build_eegnet, build_model, input_shape
from .config import AdnnConfig, AttentionConfig, load_config, update_config
from .training import EpochRecord, TrainedModel, TrainHyper, fit_normalization, predict, train

__all__ = [
    "AdnnConfig",
    "AttentionConfig",
    "load_config",
    "update_config",
    "MODEL_KINDS",
    "build_eegnet",
    "build_adnn",
    "build_model",
    "input_shape",
    "TrainHyper",
    "EpochRecord",
    "TrainedModel",
    "fit_normalization",
    "train",
    "predict",
]
