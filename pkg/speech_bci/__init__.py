"""
Speech BCI
- 상상 발화(imagined speech) EEG 4단어 분류 벤치마크
- 신호 처리, 합성 데이터, PSD-SVM / CSP-LDA / EEGNet / ADNN, 통계 검정
"""

__version__ = "0.1.0"
