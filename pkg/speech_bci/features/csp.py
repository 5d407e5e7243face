"""CSP(Common Spatial Patterns) 특징 모듈.

다중 클래스는 one-vs-rest로 확장해요. 클래스마다 (Σ_c, Σ_c + Σ_rest)
일반화 고유값 문제를 풀고 상위/하위 고유벡터를 절반씩 남겨요.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, TransformerMixin

from speech_bci.errors import DegenerateDataError, InsufficientDataError, InvalidParameterError, ShapeError
from speech_bci.signal_core.recording import EpochSet

logger = logging.getLogger(__name__)

DEFAULT_FILTERS_PER_CLASS = 4
DEFAULT_RIDGE = 1e-6


@dataclass(frozen=True)
class CspModel:
    """학습된 CSP 공간 필터.

    Attributes:
        filters (np.ndarray): [class_count·filters_per_class × channels], 행 단위 정규화
        eigenvalues (np.ndarray): 필터별 일반화 고유값 (클래스 안에서 내림차순)
        filters_per_class (int): 클래스당 필터 수
        ridge (float): 공분산 ridge 계수
        class_count (int): 클래스 수
    """

    filters: np.ndarray
    eigenvalues: np.ndarray
    filters_per_class: int
    ridge: float
    class_count: int

    def __post_init__(self) -> None:
        filters = np.asarray(self.filters, dtype=np.float64)
        if filters.ndim != 2 or filters.shape[0] != self.class_count * self.filters_per_class:
            raise ShapeError(
                f"expected {self.class_count * self.filters_per_class} filter rows, got shape {filters.shape}"
            )
        object.__setattr__(self, "filters", filters)
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=np.float64))

    @property
    def n_channels(self) -> int:
        return int(self.filters.shape[1])

    @property
    def n_filters(self) -> int:
        return int(self.filters.shape[0])

    def class_range(self, class_index: int) -> range:
        """클래스 하나에 속한 필터 행 범위를 반환해요."""
        start = class_index * self.filters_per_class
        return range(start, start + self.filters_per_class)


def trial_covariance(epoch: np.ndarray) -> np.ndarray:
    """채널 평균을 뺀 뒤 trace로 정규화한 공분산을 계산해요."""
    x = np.asarray(epoch, dtype=np.float64)
    x = x - x.mean(axis=1, keepdims=True)
    cov = x @ x.T
    trace = np.trace(cov)
    if not np.isfinite(trace):
        raise DegenerateDataError("non-finite covariance")
    if trace <= 0:
        raise DegenerateDataError("epoch has zero variance in every channel")
    return cov / trace


def mean_covariance(data: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """트라이얼 공분산 평균에 ridge·trace/C·I를 더해요."""
    cov = np.mean([trial_covariance(epoch) for epoch in data], axis=0)
    n_channels = cov.shape[0]
    return cov + ridge * np.trace(cov) / n_channels * np.eye(n_channels)


def fit_csp_arrays(
    data: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    filters_per_class: int = DEFAULT_FILTERS_PER_CLASS,
    ridge: float = DEFAULT_RIDGE,
) -> CspModel:
    """배열 입력으로 one-vs-rest CSP를 학습해요.

    Args:
        data (np.ndarray): [trials × channels × samples]
        labels (np.ndarray): 0..n_classes-1 라벨
        n_classes (int): 클래스 수
        filters_per_class (int): 클래스당 필터 수 (짝수, 2 이상)
        ridge (float): ridge 계수 (0 이상)

    Returns:
        CspModel: 학습된 모델
    """
    data = np.asarray(data)
    labels = np.asarray(labels)
    if data.ndim != 3:
        raise ShapeError(f"expected [trials x channels x samples], got ndim={data.ndim}")
    n_channels = data.shape[1]
    if filters_per_class < 2 or filters_per_class % 2:
        raise InvalidParameterError(f"filters_per_class must be even and >= 2, got {filters_per_class}")
    if filters_per_class > n_channels:
        raise InvalidParameterError(f"filters_per_class ({filters_per_class}) exceeds channel count ({n_channels})")
    if ridge < 0:
        raise InvalidParameterError(f"ridge must be >= 0, got {ridge}")
    if n_classes < 2:
        raise InsufficientDataError("CSP needs at least 2 classes")

    counts = np.bincount(labels, minlength=n_classes)
    for c, count in enumerate(counts):
        if count < 2:
            raise InsufficientDataError(f"class {c} has {count} trials; CSP needs >= 2 per class")

    half = filters_per_class // 2
    filters = []
    eigenvalues = []
    for c in range(n_classes):
        sigma_c = mean_covariance(data[labels == c], ridge)
        sigma_rest = mean_covariance(data[labels != c], ridge)
        if not (np.all(np.isfinite(sigma_c)) and np.all(np.isfinite(sigma_rest))):
            raise DegenerateDataError(f"non-finite covariance for class {c}")
        try:
            evals, evecs = linalg.eigh(sigma_c, sigma_c + sigma_rest)
        except linalg.LinAlgError as e:
            raise DegenerateDataError(f"generalized eigenproblem failed for class {c}: {e}") from e

        order = np.argsort(evals)[::-1]
        keep = np.concatenate([order[:half], order[-half:]])
        w = evecs[:, keep].T
        filters.append(w / np.linalg.norm(w, axis=1, keepdims=True))
        eigenvalues.append(evals[keep])

    model = CspModel(
        filters=np.vstack(filters),
        eigenvalues=np.concatenate(eigenvalues),
        filters_per_class=filters_per_class,
        ridge=ridge,
        class_count=n_classes,
    )
    logger.debug("CSP fit: %d classes x %d filters on %d channels", n_classes, filters_per_class, n_channels)
    return model


def csp_fit(
    epochs: EpochSet,
    filters_per_class: int = DEFAULT_FILTERS_PER_CLASS,
    ridge: float = DEFAULT_RIDGE,
) -> CspModel:
    """EpochSet으로 CSP 필터를 학습해요.

    Raises:
        InsufficientDataError: 트라이얼이 2개 미만인 클래스가 있을 때
        DegenerateDataError: 공분산이 비유한 값이거나 퇴화했을 때
    """
    return fit_csp_arrays(epochs.data, epochs.labels, epochs.n_classes, filters_per_class, ridge)


def csp_transform(model: CspModel, epoch: np.ndarray) -> np.ndarray:
    """필터링된 신호의 정규화 로그 분산 특징을 계산해요.

    Args:
        model (CspModel): 학습된 모델
        epoch (np.ndarray): [channels × samples]

    Returns:
        np.ndarray: log(var_i / Σ var) 벡터, 길이 n_filters
    """
    x = np.asarray(epoch, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != model.n_channels:
        raise ShapeError(f"epoch must have {model.n_channels} channels, got shape {x.shape}")
    projected = model.filters @ x
    variances = projected.var(axis=1)
    total = variances.sum()
    if not total > 0 or np.any(variances <= 0):
        raise DegenerateDataError("spatially filtered signal has zero variance")
    return np.log(variances / total)


class CspTransformer(BaseEstimator, TransformerMixin):
    """[trials × channels × samples] → CSP 특징 변환기.

    Args:
        filters_per_class (int): 클래스당 필터 수
        ridge (float): ridge 계수
    """

    def __init__(self, filters_per_class: int = DEFAULT_FILTERS_PER_CLASS, ridge: float = DEFAULT_RIDGE):
        self.filters_per_class = filters_per_class
        self.ridge = ridge

    def fit(self, X: np.ndarray, y: np.ndarray) -> "CspTransformer":
        self.classes_, encoded = np.unique(np.asarray(y), return_inverse=True)
        self.model_ = fit_csp_arrays(X, encoded, len(self.classes_), self.filters_per_class, self.ridge)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return np.stack([csp_transform(self.model_, epoch) for epoch in np.asarray(X)])
