"""선형 SVM 모듈.

특징을 표준화한 뒤 클래스마다 one-vs-rest L2 정규화 hinge 손실 분류기를
Pegasos 방식의 서브그래디언트 하강(스텝 1/(λt), λ = 1/(nC))으로 학습해요.
편향은 매 에폭이 끝날 때 현재 가중치에 대한 hinge 최적값으로 다시 맞춰요.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from speech_bci.errors import InvalidLabelError, InvalidParameterError, ShapeError

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-12
DEFAULT_EPOCHS = 200


@dataclass(frozen=True)
class LinearSvmModel:
    """학습된 one-vs-rest 선형 SVM.

    Attributes:
        weights (np.ndarray): [classes × features] (표준화된 공간)
        biases (np.ndarray): 클래스별 편향
        mean (np.ndarray): 특징별 평균
        std (np.ndarray): 특징별 표준편차 (하한 적용)
        C (float): 정규화 trade-off
        classes (np.ndarray): 원래 라벨 값 (행 순서)
    """

    weights: np.ndarray
    biases: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    C: float = 1.0
    classes: np.ndarray | None = None

    def __post_init__(self) -> None:
        weights = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        n_classes, n_features = weights.shape
        biases = np.asarray(self.biases, dtype=np.float64).reshape(-1)
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        std = np.maximum(np.asarray(self.std, dtype=np.float64).reshape(-1), STD_FLOOR)
        if biases.shape[0] != n_classes or mean.shape[0] != n_features or std.shape[0] != n_features:
            raise ShapeError("weights, biases, mean and std shapes disagree")
        if not np.all(np.isfinite(weights)):
            raise InvalidParameterError("SVM weights must be finite")
        classes = np.arange(n_classes) if self.classes is None else np.asarray(self.classes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)
        object.__setattr__(self, "classes", classes)

    @property
    def n_features(self) -> int:
        return int(self.weights.shape[1])

    def standardize(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.std

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """[n × classes] 결정 값을 계산해요."""
        x = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if x.shape[1] != self.n_features:
            raise ShapeError(f"expected {self.n_features} features, got {x.shape[1]}")
        return self.standardize(x) @ self.weights.T + self.biases


def optimal_bias(scores: np.ndarray, y: np.ndarray) -> float:
    """가중치 고정 시 hinge 손실 합을 최소화하는 편향을 구해요.

    목적 함수는 b에 대해 볼록한 구간별 선형이라 꺾이는 점 b_i = y_i − s_i 중에
    최솟값이 있어요. 꺾이는 점을 정렬하고 누적합으로 각 점의 목적 값을 O(n log n)에
    구해요. 최소 집합이 구간이면 그 중점을 반환해요.
    """
    breakpoints = y - scores
    # y=+1 항은 b < b_i에서 (b_i − b), y=−1 항은 b > b_i에서 (b − b_i)
    upper = np.sort(breakpoints[y > 0])
    lower = np.sort(breakpoints[y <= 0])
    upper_cum = np.concatenate([[0.0], np.cumsum(upper)])
    lower_cum = np.concatenate([[0.0], np.cumsum(lower)])

    k_upper = np.searchsorted(upper, breakpoints, side="right")
    k_lower = np.searchsorted(lower, breakpoints, side="left")
    objective = (upper_cum[-1] - upper_cum[k_upper]) - (upper.size - k_upper) * breakpoints
    objective += k_lower * breakpoints - lower_cum[k_lower]

    best = objective.min()
    tol = 1e-9 * max(1.0, abs(best))
    minimizers = breakpoints[objective <= best + tol]
    return float(0.5 * (minimizers.min() + minimizers.max()))


def _train_binary(x: np.ndarray, y: np.ndarray, lam: float, epochs: int, rng: np.random.Generator) -> tuple:
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    radius = 1.0 / np.sqrt(lam)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = y[i] * (x[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y[i] * x[i]
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
        b = optimal_bias(x @ w, y)
    return w, b


def svm_fit(
    features: np.ndarray,
    labels: np.ndarray,
    C: float = 1.0,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
) -> LinearSvmModel:
    """one-vs-rest 선형 SVM을 학습해요.

    Args:
        features (np.ndarray): [n × d] 특징 행렬
        labels (np.ndarray): 길이 n 라벨
        C (float): 정규화 trade-off (> 0)
        epochs (int): 에폭 수
        seed (int): 셔플 시드

    Returns:
        LinearSvmModel: 같은 입력과 시드면 비트 단위로 같은 모델

    Raises:
        InvalidLabelError: 클래스가 하나뿐일 때
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.asarray(labels).reshape(-1)
    if x.shape[0] != labels.shape[0]:
        raise ShapeError(f"{x.shape[0]} samples but {labels.shape[0]} labels")
    if x.shape[0] < 2:
        raise InvalidParameterError("SVM needs at least 2 samples")
    if not C > 0:
        raise InvalidParameterError(f"C must be > 0, got {C}")
    if epochs < 1:
        raise InvalidParameterError(f"epochs must be >= 1, got {epochs}")
    if not np.all(np.isfinite(x)):
        raise InvalidParameterError("features must be finite")

    classes = np.unique(labels)
    if classes.size < 2:
        raise InvalidLabelError("SVM needs at least 2 classes")

    mean = x.mean(axis=0)
    std = np.maximum(x.std(axis=0), STD_FLOOR)
    z = (x - mean) / std
    lam = 1.0 / (x.shape[0] * C)

    rng = np.random.default_rng(seed)
    weights = np.empty((classes.size, x.shape[1]))
    biases = np.empty(classes.size)
    for k, cls in enumerate(classes):
        y = np.where(labels == cls, 1.0, -1.0)
        weights[k], biases[k] = _train_binary(z, y, lam, epochs, rng)

    logger.debug("SVM fit: %d classes, %d samples, %d features", classes.size, x.shape[0], x.shape[1])
    return LinearSvmModel(weights=weights, biases=biases, mean=mean, std=std, C=C, classes=classes)


def svm_predict(model: LinearSvmModel, features: np.ndarray) -> np.ndarray:
    """결정 값 argmax로 라벨을 예측해요. 동점이면 낮은 클래스 인덱스를 골라요."""
    scores = model.decision_function(features)
    return model.classes[np.argmax(scores, axis=1)]


class LinearSvmClassifier(BaseEstimator, ClassifierMixin):
    """sklearn 인터페이스 래퍼."""

    def __init__(self, C: float = 1.0, epochs: int = DEFAULT_EPOCHS, seed: int = 0):
        self.C = C
        self.epochs = epochs
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearSvmClassifier":
        self.model_ = svm_fit(X, y, C=self.C, epochs=self.epochs, seed=self.seed)
        self.classes_ = self.model_.classes
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self.model_.decision_function(X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return svm_predict(self.model_, X)
