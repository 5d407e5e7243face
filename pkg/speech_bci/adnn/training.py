"""EEGNet/ADNN 학습과 예측 모듈.

학습 세트로 채널별 z-score를 맞추고, 교차 엔트로피 + Adam으로 학습해요.
검증 정확도가 가장 높았던 에폭의 체크포인트를 반환해요.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import torch
from pydantic import BaseModel, Field

from speech_bci.adnn.architecture import MODEL_KINDS, build_model, input_shape
from speech_bci.adnn.config import AdnnConfig
from speech_bci.autodiff_nn.engine import Params, backward, forward, init_params
from speech_bci.autodiff_nn.layers import LayerSpec
from speech_bci.autodiff_nn.losses import softmax_cross_entropy
from speech_bci.autodiff_nn.optim import AdamState, adam_step
from speech_bci.errors import (
    DivergenceError,
    InsufficientDataError,
    InvalidLabelError,
    InvalidParameterError,
    NonFiniteGradientError,
    ShapeError,
)
from speech_bci.signal_core.recording import EpochSet

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-6
PREDICT_BATCH = 64
HISTORY_COLUMNS = ["epoch", "train_loss", "train_acc", "valid_acc"]


class TrainHyper(BaseModel):
    """학습 하이퍼파라미터.

    Attributes:
        lr (float): Adam 학습률
        batch_size (int): 미니배치 크기
        max_epochs (int): 최대 에폭 수
        patience (int | None): 검증 정확도가 개선되지 않아도 버티는 에폭 수 (None이면 끝까지)
        seed (int): 셔플/드롭아웃 시드
    """

    lr: float = Field(default=1e-3, gt=0)
    batch_size: int = Field(default=16, ge=1)
    max_epochs: int = Field(default=200, ge=1)
    patience: int | None = Field(default=40, ge=1)
    seed: int = Field(default=0, ge=0)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    train_acc: float
    valid_acc: float


@dataclass
class TrainedModel:
    """학습된 모델.

    Attributes:
        kind (str): "eegnet" 또는 "adnn"
        config (AdnnConfig): 아키텍처 설정
        params (Params): 파라미터 체크포인트
        state (Params): BatchNorm 이동 통계
        norm_mean (np.ndarray): 채널별 평균 (학습 세트)
        norm_std (np.ndarray): 채널별 표준편차 (학습 세트)
        history (list[EpochRecord]): 에폭별 기록
        best_epoch (int): 체크포인트 에폭 (1부터)
    """

    kind: str
    config: AdnnConfig
    params: Params
    state: Params
    norm_mean: np.ndarray
    norm_std: np.ndarray
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def layers(self) -> list[LayerSpec]:
        return build_model(self.kind, self.config)

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.history], columns=HISTORY_COLUMNS)

    def save_history_csv(self, path: str | Path) -> Path:
        """에폭 기록을 CSV(epoch, train_loss, train_acc, valid_acc)로 저장해요."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.history_frame().to_csv(path, index=False, float_format="%.6f")
        return path


def fit_normalization(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """[trials × channels × samples]에서 채널별 평균/표준편차를 구해요."""
    x = np.asarray(data, dtype=np.float64)
    mean = x.mean(axis=(0, 2))
    std = np.maximum(x.std(axis=(0, 2)), STD_FLOOR)
    return mean, std


def _to_input(data: np.ndarray, mean: np.ndarray, std: np.ndarray) -> torch.Tensor:
    z = (np.asarray(data, dtype=np.float64) - mean[None, :, None]) / std[None, :, None]
    return torch.from_numpy(z.astype(np.float32)).unsqueeze(1)


def _check_epochs(cfg: AdnnConfig, epochs: EpochSet, what: str) -> None:
    if len(epochs) == 0:
        raise InsufficientDataError(f"{what} set is empty")
    if (epochs.n_channels, epochs.n_samples) != (cfg.n_channels, cfg.n_samples):
        raise ShapeError(
            f"{what} epochs are {epochs.n_channels} x {epochs.n_samples}, "
            f"model expects {cfg.n_channels} x {cfg.n_samples}"
        )
    if epochs.labels.max() >= cfg.n_classes:
        raise InvalidLabelError(f"{what} labels exceed n_classes={cfg.n_classes}")


def _eval_probs(layers: list[LayerSpec], params: Params, state: Params, x: torch.Tensor) -> torch.Tensor:
    outputs = []
    for start in range(0, x.shape[0], PREDICT_BATCH):
        out, _ = forward(layers, params, x[start : start + PREDICT_BATCH], mode="eval", state=state)
        outputs.append(out)
    return torch.cat(outputs)


def train(
    model_kind: str,
    cfg: AdnnConfig,
    train_set: EpochSet,
    valid_set: EpochSet,
    hyper: TrainHyper | None = None,
) -> TrainedModel:
    """모델을 학습하고 최고 검증 정확도 체크포인트를 반환해요.

    같은 입력과 시드면 기록과 체크포인트가 비트 단위로 같아요.

    Args:
        model_kind (str): "eegnet" 또는 "adnn"
        cfg (AdnnConfig): 아키텍처 설정
        train_set (EpochSet): 학습 세트
        valid_set (EpochSet): 검증 세트
        hyper (TrainHyper | None): 학습 하이퍼파라미터

    Returns:
        TrainedModel: 학습된 모델

    Raises:
        DivergenceError: 손실이나 그래디언트가 비유한 값이 될 때
    """
    if model_kind not in MODEL_KINDS:
        raise InvalidParameterError(f"unknown model kind {model_kind!r}")
    hyper = hyper or TrainHyper()
    cfg.check()
    _check_epochs(cfg, train_set, "train")
    _check_epochs(cfg, valid_set, "valid")
    torch.use_deterministic_algorithms(True, warn_only=True)

    layers = build_model(model_kind, cfg)
    params, state = init_params(layers, input_shape(cfg), seed=cfg.seed)
    mean, std = fit_normalization(train_set.data)
    x_train = _to_input(train_set.data, mean, std)
    y_train = torch.from_numpy(train_set.labels.astype(np.int64))
    x_valid = _to_input(valid_set.data, mean, std)
    y_valid = valid_set.labels

    shuffle_seq, dropout_seq = np.random.SeedSequence(hyper.seed).spawn(2)
    shuffle_rng = np.random.default_rng(shuffle_seq)
    dropout_rng = np.random.default_rng(dropout_seq)

    adam = AdamState()
    best_acc = -math.inf
    best_params, best_state, best_epoch = params, state, 0
    history: list[EpochRecord] = []
    n = x_train.shape[0]

    for epoch in range(1, hyper.max_epochs + 1):
        order = torch.from_numpy(shuffle_rng.permutation(n))
        loss_sum = 0.0
        correct = 0
        for start in range(0, n, hyper.batch_size):
            idx = order[start : start + hyper.batch_size]
            xb, yb = x_train[idx], y_train[idx]
            _, tape = forward(
                layers, params, xb, mode="train", seed=int(dropout_rng.integers(2**31)), state=state
            )
            loss, grad = softmax_cross_entropy(tape.logits, yb)
            if not math.isfinite(loss):
                raise DivergenceError(epoch, loss)
            grads = backward(tape, grad, at="logits")
            grads.pop("input")
            try:
                params, adam = adam_step(params, grads, adam, lr=hyper.lr)
            except NonFiniteGradientError as e:
                raise DivergenceError(epoch, loss) from e
            state = {**state, **tape.new_state}
            loss_sum += loss * len(idx)
            correct += int((tape.logits.detach().argmax(dim=1) == yb).sum())

        probs = _eval_probs(layers, params, state, x_valid)
        valid_acc = float(np.mean(probs.argmax(dim=1).numpy() == y_valid))
        record = EpochRecord(epoch=epoch, train_loss=loss_sum / n, train_acc=correct / n, valid_acc=valid_acc)
        history.append(record)
        logger.debug(
            "%s epoch %d: loss=%.4f train_acc=%.3f valid_acc=%.3f",
            model_kind,
            epoch,
            record.train_loss,
            record.train_acc,
            valid_acc,
        )

        if valid_acc > best_acc:
            best_acc, best_params, best_state, best_epoch = valid_acc, params, state, epoch
        elif hyper.patience is not None and epoch - best_epoch >= hyper.patience:
            logger.debug("early stop at epoch %d (best %d)", epoch, best_epoch)
            break

    logger.info("[OK] %s trained: best valid_acc=%.3f at epoch %d", model_kind, best_acc, best_epoch)
    return TrainedModel(
        kind=model_kind,
        config=cfg,
        params={k: v.detach().clone() for k, v in best_params.items()},
        state={k: v.detach().clone() for k, v in best_state.items()},
        norm_mean=mean,
        norm_std=std,
        history=history,
        best_epoch=best_epoch,
    )


def predict(model: TrainedModel, epochs: EpochSet) -> tuple[np.ndarray, np.ndarray]:
    """평가 모드로 라벨과 클래스 확률을 예측해요.

    Returns:
        tuple[np.ndarray, np.ndarray]: (라벨, [trials × classes] 확률)
    """
    cfg = model.config
    if (epochs.n_channels, epochs.n_samples) != (cfg.n_channels, cfg.n_samples):
        raise ShapeError(
            f"epochs are {epochs.n_channels} x {epochs.n_samples}, model expects {cfg.n_channels} x {cfg.n_samples}"
        )
    if len(epochs) == 0:
        return np.empty(0, dtype=np.int64), np.empty((0, cfg.n_classes))
    x = _to_input(epochs.data, model.norm_mean, model.norm_std)
    probs = _eval_probs(model.layers, model.params, model.state, x).numpy().astype(np.float64)
    return probs.argmax(axis=1), probs
