"""LDA(Linear Discriminant Analysis) 모듈.

공유 공분산(클래스 내 pooled, 분모 n) + ridge·trace/d·I를 쓰고,
판별 함수 δ_c(x) = xᵀΣ⁻¹μ_c − ½μ_cᵀΣ⁻¹μ_c + log π_c 로 분류해요.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, ClassifierMixin

from speech_bci.errors import DegenerateDataError, InsufficientDataError, InvalidParameterError, ShapeError

DEFAULT_RIDGE = 1e-3


@dataclass(frozen=True)
class LdaModel:
    """학습된 LDA 모델.

    Attributes:
        means (np.ndarray): [classes × features] 클래스 평균
        precision (np.ndarray): ridge 적용 공유 공분산의 역행렬
        priors (np.ndarray): 클래스 사전 확률 (합 1)
        ridge (float): ridge 계수
        classes (np.ndarray): 원래 라벨 값
    """

    means: np.ndarray
    precision: np.ndarray
    priors: np.ndarray
    ridge: float = DEFAULT_RIDGE
    classes: np.ndarray | None = None

    def __post_init__(self) -> None:
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        precision = np.asarray(self.precision, dtype=np.float64)
        priors = np.asarray(self.priors, dtype=np.float64).reshape(-1)
        if precision.shape != (means.shape[1], means.shape[1]) or priors.shape[0] != means.shape[0]:
            raise ShapeError("means, precision and priors shapes disagree")
        if abs(priors.sum() - 1.0) > 1e-9 or np.any(priors <= 0):
            raise InvalidParameterError("priors must be positive and sum to 1")
        classes = np.arange(means.shape[0]) if self.classes is None else np.asarray(self.classes)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "classes", classes)

    @property
    def n_features(self) -> int:
        return int(self.means.shape[1])

    def discriminant(self, features: np.ndarray) -> np.ndarray:
        """[n × classes] 판별 점수를 계산해요."""
        x = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise ShapeError(f"expected {self.n_features} features, got {x.shape[1]}")
        coef = self.means @ self.precision
        intercept = -0.5 * np.einsum("cd,cd->c", coef, self.means) + np.log(self.priors)
        return x @ coef.T + intercept


def lda_fit(features: np.ndarray, labels: np.ndarray, ridge: float = DEFAULT_RIDGE) -> LdaModel:
    """LDA 모델을 학습해요.

    Args:
        features (np.ndarray): [n × d] 특징 행렬
        labels (np.ndarray): 길이 n 라벨
        ridge (float): ridge 계수 (0 이상)

    Returns:
        LdaModel: 학습된 모델

    Raises:
        InsufficientDataError: 샘플이 2개 미만인 클래스가 있을 때
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.asarray(labels).reshape(-1)
    if x.shape[0] != labels.shape[0]:
        raise ShapeError(f"{x.shape[0]} samples but {labels.shape[0]} labels")
    if ridge < 0:
        raise InvalidParameterError(f"ridge must be >= 0, got {ridge}")

    classes, counts = np.unique(labels, return_counts=True)
    if classes.size < 2:
        raise InsufficientDataError("LDA needs at least 2 classes")
    for cls, count in zip(classes, counts, strict=True):
        if count < 2:
            raise InsufficientDataError(f"class {cls} has {count} samples; LDA needs >= 2 per class")

    n, d = x.shape
    means = np.stack([x[labels == cls].mean(axis=0) for cls in classes])
    centered = x - means[np.searchsorted(classes, labels)]
    cov = centered.T @ centered / n
    cov = cov + ridge * np.trace(cov) / d * np.eye(d)
    try:
        precision = linalg.inv(cov, check_finite=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise DegenerateDataError(f"pooled covariance is singular: {e}") from e
    if not np.all(np.isfinite(precision)):
        raise DegenerateDataError("pooled covariance inverse is not finite")

    return LdaModel(means=means, precision=precision, priors=counts / n, ridge=ridge, classes=classes)


def lda_predict(model: LdaModel, features: np.ndarray) -> np.ndarray:
    """판별 점수 argmax로 예측해요. 동점이면 낮은 클래스 인덱스를 골라요."""
    return model.classes[np.argmax(model.discriminant(features), axis=1)]


class LdaClassifier(BaseEstimator, ClassifierMixin):
    """sklearn 인터페이스 래퍼."""

    def __init__(self, ridge: float = DEFAULT_RIDGE):
        self.ridge = ridge

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LdaClassifier":
        self.model_ = lda_fit(X, y, ridge=self.ridge)
        self.classes_ = self.model_.classes
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self.model_.discriminant(X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return lda_predict(self.model_, X)
