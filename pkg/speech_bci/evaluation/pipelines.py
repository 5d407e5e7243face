"""분류 파이프라인 추상 베이스 클래스와 구현체 모듈.

교차 검증이 공통 인터페이스(fit/predict)로 네 가지 방법을 다룰 수 있게 해요.
모든 학습(표준화, CSP, 분류기, 신경망)은 fit에 넘긴 학습 세트 안에서만 일어나요.
"""

import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

import numpy as np
from sklearn.model_selection import train_test_split
from sklearn.pipeline import Pipeline as SkPipeline
from sklearn.pipeline import make_pipeline

from speech_bci.adnn.config import AdnnConfig, update_config
from speech_bci.adnn.training import TrainedModel, TrainHyper, predict, train
from speech_bci.data.model_io import save_csp, save_lda, save_svm, save_trained_model
from speech_bci.errors import InvalidParameterError, InvalidStateError
from speech_bci.features.csp import DEFAULT_FILTERS_PER_CLASS, CspTransformer
from speech_bci.features.spectral import BandPowerExtractor
from speech_bci.shallow_models.lda import LdaClassifier
from speech_bci.shallow_models.svm import LinearSvmClassifier
from speech_bci.signal_core.recording import EpochSet

logger = logging.getLogger(__name__)

PIPELINES = ("psd_svm", "csp_lda", "eegnet", "adnn")
PIPELINE_JSON = "pipeline.json"
VALID_FRACTION = 0.2


class Pipeline(ABC):
    """에폭 분류 파이프라인의 추상 베이스 클래스.

    모든 파이프라인은 이 클래스를 상속받아 fit/predict를 구현해야 해요.
    """

    name: str = ""

    def __init__(self, seed: int = 0):
        self.seed = seed

    @abstractmethod
    def fit(self, epochs: EpochSet) -> "Pipeline":
        """학습 세트로 파이프라인 전체를 학습해요.

        Args:
            epochs (EpochSet): 학습 세트

        Returns:
            Pipeline: self
        """
        pass

    @abstractmethod
    def predict(self, epochs: EpochSet) -> np.ndarray:
        """라벨을 예측해요.

        Args:
            epochs (EpochSet): 평가 세트

        Returns:
            np.ndarray: 길이 len(epochs) 라벨
        """
        pass

    def score(self, epochs: EpochSet) -> float:
        """정확도(맞춘 비율)를 반환해요."""
        if len(epochs) == 0:
            raise InvalidParameterError("cannot score an empty epoch set")
        return float(np.mean(self.predict(epochs) == epochs.labels))

    def save(self, directory: str | Path) -> Path:
        """학습된 모델을 디렉토리에 저장해요."""
        raise InvalidStateError(f"pipeline {self.name!r} cannot be saved")

    def _write_manifest(self, directory: Path, **extra: Any) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        manifest = {"pipeline": self.name, "seed": self.seed, **extra}
        (directory / PIPELINE_JSON).write_text(json.dumps(manifest, indent=2), encoding="utf-8")


class _SklearnPipeline(Pipeline):
    """sklearn 변환기 + 분류기 체인을 감싸는 공통 구현."""

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self._model: SkPipeline | None = None

    @abstractmethod
    def _build(self, epochs: EpochSet) -> SkPipeline:
        pass

    def fit(self, epochs: EpochSet) -> "Pipeline":
        self._model = self._build(epochs).fit(epochs.data, epochs.labels)
        return self

    def predict(self, epochs: EpochSet) -> np.ndarray:
        if self._model is None:
            raise InvalidStateError(f"pipeline {self.name!r} is not fitted")
        return np.asarray(self._model.predict(epochs.data))

    def _step(self, index: int) -> Any:
        if self._model is None:
            raise InvalidStateError(f"pipeline {self.name!r} is not fitted")
        return self._model.steps[index][1]


class PsdSvmPipeline(_SklearnPipeline):
    """Welch 로그 대역 전력 + 선형 SVM.

    Args:
        seed (int): SVM 셔플 시드
        C (float): SVM 정규화 trade-off
        svm_epochs (int): SVM 에폭 수
    """

    name = "psd_svm"

    def __init__(self, seed: int = 0, C: float = 1.0, svm_epochs: int = 200):
        super().__init__(seed)
        self.C = C
        self.svm_epochs = svm_epochs

    def _build(self, epochs: EpochSet) -> SkPipeline:
        return make_pipeline(
            BandPowerExtractor(fs=epochs.fs, log_power=True),
            LinearSvmClassifier(C=self.C, epochs=self.svm_epochs, seed=self.seed),
        )

    def save(self, directory: str | Path) -> Path:
        directory = Path(directory)
        extractor = self._step(0)
        self._write_manifest(directory, fs=extractor.fs, log_power=extractor.log_power)
        save_svm(self._step(1).model_, directory / "svm.eegd")
        return directory


class CspLdaPipeline(_SklearnPipeline):
    """one-vs-rest CSP 로그 분산 + LDA.

    Args:
        seed (int): 사용하지 않지만 인터페이스를 맞추려고 받아요
        filters_per_class (int): 클래스당 CSP 필터 수
        lda_ridge (float): LDA 공분산 ridge 계수
    """

    name = "csp_lda"

    def __init__(self, seed: int = 0, filters_per_class: int = DEFAULT_FILTERS_PER_CLASS, lda_ridge: float = 1e-3):
        super().__init__(seed)
        self.filters_per_class = filters_per_class
        self.lda_ridge = lda_ridge

    def _build(self, epochs: EpochSet) -> SkPipeline:  # noqa: ARG002
        return make_pipeline(CspTransformer(filters_per_class=self.filters_per_class), LdaClassifier(ridge=self.lda_ridge))

    def save(self, directory: str | Path) -> Path:
        directory = Path(directory)
        self._write_manifest(directory)
        save_csp(self._step(0).model_, directory / "csp.eegd")
        save_lda(self._step(1).model_, directory / "lda.eegd")
        return directory


class NeuralPipeline(Pipeline):
    """EEGNet 또는 ADNN 신경망 파이프라인.

    학습 세트를 다시 층화 80/20으로 나눠 검증 세트로 체크포인트를 골라요.

    Args:
        kind (str): "eegnet" 또는 "adnn"
        seed (int): 분할/초기화/셔플 시드
        hyper (TrainHyper | None): 학습 하이퍼파라미터 (seed는 덮어써요)
        overrides (dict | None): 데이터 차원 외의 AdnnConfig 필드
    """

    def __init__(
        self,
        kind: str,
        seed: int = 0,
        hyper: TrainHyper | None = None,
        overrides: dict[str, Any] | None = None,
    ):
        if kind not in ("eegnet", "adnn"):
            raise InvalidParameterError(f"unknown network kind {kind!r}")
        super().__init__(seed)
        self.name = kind
        self.hyper = update_config(hyper or TrainHyper(), seed=seed)
        self.overrides = dict(overrides or {})
        self.model: TrainedModel | None = None

    def config_for(self, epochs: EpochSet) -> AdnnConfig:
        """데이터 차원(C, T, 클래스 수)에 맞춘 AdnnConfig를 만들어요."""
        fields = {
            **self.overrides,
            "n_channels": epochs.n_channels,
            "n_samples": epochs.n_samples,
            "n_classes": epochs.n_classes,
            "seed": self.seed,
        }
        return AdnnConfig.model_validate(fields).check()

    def fit(self, epochs: EpochSet) -> "Pipeline":
        train_idx, valid_idx = train_test_split(
            np.arange(len(epochs)),
            test_size=VALID_FRACTION,
            stratify=epochs.labels,
            random_state=self.seed,
        )
        train_set = epochs.subset(np.sort(train_idx))
        valid_set = epochs.subset(np.sort(valid_idx))
        self.model = train(self.name, self.config_for(epochs), train_set, valid_set, self.hyper)
        return self

    def predict(self, epochs: EpochSet) -> np.ndarray:
        if self.model is None:
            raise InvalidStateError(f"pipeline {self.name!r} is not fitted")
        labels, _ = predict(self.model, epochs)
        return labels

    def save(self, directory: str | Path) -> Path:
        if self.model is None:
            raise InvalidStateError(f"pipeline {self.name!r} is not fitted")
        directory = Path(directory)
        self._write_manifest(directory, hyper=self.hyper.model_dump())
        save_trained_model(self.model, directory)
        return directory


class ConstantPipeline(Pipeline):
    """항상 같은 클래스를 예측하는 기준선 (우연 수준 확인용)."""

    name = "constant"

    def __init__(self, seed: int = 0, label: int = 0):
        super().__init__(seed)
        self.label = label

    def fit(self, epochs: EpochSet) -> "Pipeline":  # noqa: ARG002
        return self

    def predict(self, epochs: EpochSet) -> np.ndarray:
        return np.full(len(epochs), self.label, dtype=np.int64)


def get_pipeline(name: str, seed: int = 0, **kwargs: Any) -> Pipeline:
    """이름으로 파이프라인을 생성해요.

    Args:
        name (str): "psd_svm", "csp_lda", "eegnet", "adnn", "constant"
        seed (int): 파이프라인 시드
        **kwargs: 구현체 생성자 인자

    Returns:
        Pipeline: 학습 전 파이프라인

    Raises:
        InvalidParameterError: 알 수 없는 이름일 때
    """
    if name == "psd_svm":
        return PsdSvmPipeline(seed=seed, **kwargs)
    if name == "csp_lda":
        return CspLdaPipeline(seed=seed, **kwargs)
    if name in ("eegnet", "adnn"):
        return NeuralPipeline(name, seed=seed, **kwargs)
    if name == "constant":
        return ConstantPipeline(seed=seed, **kwargs)
    raise InvalidParameterError(f"unknown pipeline {name!r}; choose from {PIPELINES}")
