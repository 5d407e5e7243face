"""
Data Module
- EEGD v1 컨테이너 (연속 기록, 에폭, 모델 파라미터)
- 학습 모델 디렉토리 저장/로드
"""

from .eegd import (
    KINDS,
    decode_container,
    encode_container,
    load_arrays,
    load_epochs,
    load_recording,
    save_arrays,
    save_epochs,
    save_recording,
)
from .model_io import (
    load_csp,
    load_lda,
    load_params,
    load_svm,
    load_trained_model,
    save_csp,
    save_lda,
    save_params,
    save_svm,
    save_trained_model,
)

__all__ = [
    "KINDS",
    "encode_container",
    "decode_container",
    "save_recording",
    "load_recording",
    "save_epochs",
    "load_epochs",
    "save_arrays",
    "load_arrays",
    "save_csp",
    "load_csp",
    "save_svm",
    "load_svm",
    "save_lda",
    "load_lda",
    "save_params",
    "load_params",
    "save_trained_model",
    "load_trained_model",
]
