"""
Shallow Models Module
- 선형 SVM (PSD 특징용)
- LDA (CSP 특징용)
"""

from .lda import LdaClassifier, LdaModel, lda_fit, lda_predict
from .svm import LinearSvmClassifier, LinearSvmModel, svm_fit, svm_predict

__all__ = [
    "LinearSvmModel",
    "svm_fit",
    "svm_predict",
    "LinearSvmClassifier",
    "LdaModel",
    "lda_fit",
    "lda_predict",
    "LdaClassifier",
]
