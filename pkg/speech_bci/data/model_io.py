"""학습 모델 저장/로드 모듈.

CSP, SVM, LDA는 EEGD 모델 컨테이너 하나로, 신경망은
model.json(메타데이터) + params.eegd(파라미터, 이동 통계) 디렉토리로 저장해요.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pydantic
import torch

from speech_bci.adnn.config import AdnnConfig
from speech_bci.adnn.training import EpochRecord, TrainedModel
from speech_bci.data.eegd import load_arrays, save_arrays
from speech_bci.errors import FileFormatError
from speech_bci.features.csp import CspModel
from speech_bci.shallow_models.lda import LdaModel
from speech_bci.shallow_models.svm import LinearSvmModel

logger = logging.getLogger(__name__)

MODEL_JSON = "model.json"
PARAMS_FILE = "params.eegd"
STATE_PREFIX = "state:"


def save_csp(model: CspModel, path: str | Path) -> Path:
    return save_arrays(
        path,
        "csp",
        {"filters": model.filters, "eigenvalues": model.eigenvalues},
        {"filters_per_class": model.filters_per_class, "ridge": model.ridge, "class_count": model.class_count},
    )


def load_csp(path: str | Path) -> CspModel:
    arrays, meta = load_arrays(path, "csp")
    try:
        return CspModel(
            filters=arrays["filters"],
            eigenvalues=arrays["eigenvalues"],
            filters_per_class=int(meta["filters_per_class"]),
            ridge=float(meta["ridge"]),
            class_count=int(meta["class_count"]),
        )
    except KeyError as e:
        raise FileFormatError(f"csp container is missing {e}") from e


def save_svm(model: LinearSvmModel, path: str | Path) -> Path:
    return save_arrays(
        path,
        "svm",
        {"weights": model.weights, "biases": model.biases, "mean": model.mean, "std": model.std},
        {"C": model.C, "classes": [int(c) for c in model.classes]},
    )


def load_svm(path: str | Path) -> LinearSvmModel:
    arrays, meta = load_arrays(path, "svm")
    try:
        return LinearSvmModel(
            weights=arrays["weights"],
            biases=arrays["biases"],
            mean=arrays["mean"],
            std=arrays["std"],
            C=float(meta["C"]),
            classes=np.asarray(meta["classes"]),
        )
    except KeyError as e:
        raise FileFormatError(f"svm container is missing {e}") from e


def save_lda(model: LdaModel, path: str | Path) -> Path:
    return save_arrays(
        path,
        "lda",
        {"means": model.means, "precision": model.precision, "priors": model.priors},
        {"ridge": model.ridge, "classes": [int(c) for c in model.classes]},
    )


def load_lda(path: str | Path) -> LdaModel:
    arrays, meta = load_arrays(path, "lda")
    try:
        priors = arrays["priors"].astype(np.float64)
        return LdaModel(
            means=arrays["means"],
            precision=arrays["precision"],
            priors=priors / priors.sum(),
            ridge=float(meta["ridge"]),
            classes=np.asarray(meta["classes"]),
        )
    except KeyError as e:
        raise FileFormatError(f"lda container is missing {e}") from e


def save_params(path: str | Path, params: dict[str, torch.Tensor], state: dict[str, torch.Tensor]) -> Path:
    """파라미터와 이동 통계를 "params" 컨테이너로 저장해요. 이동 통계 이름에는 "state:"가 붙어요."""
    arrays = {name: t.detach().cpu().numpy() for name, t in params.items()}
    arrays.update({STATE_PREFIX + name: t.detach().cpu().numpy() for name, t in state.items()})
    return save_arrays(path, "params", arrays)


def load_params(path: str | Path) -> tuple[dict[str, torch.Tensor], dict[str, torch.Tensor]]:
    arrays, _ = load_arrays(path, "params")
    params = {k: torch.from_numpy(v.copy()) for k, v in arrays.items() if not k.startswith(STATE_PREFIX)}
    state = {k[len(STATE_PREFIX) :]: torch.from_numpy(v.copy()) for k, v in arrays.items() if k.startswith(STATE_PREFIX)}
    return params, state


def save_trained_model(model: TrainedModel, directory: str | Path) -> Path:
    """TrainedModel을 디렉토리(model.json + params.eegd)로 저장해요."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "architecture": model.kind,
        "config": model.config.model_dump(),
        "norm_mean": [float(v) for v in model.norm_mean],
        "norm_std": [float(v) for v in model.norm_std],
        "best_epoch": model.best_epoch,
        "history": [vars(r) for r in model.history],
    }
    (directory / MODEL_JSON).write_text(json.dumps(meta, indent=2), encoding="utf-8")
    save_params(directory / PARAMS_FILE, model.params, model.state)
    logger.info("[OK] saved %s model to %s", model.kind, directory)
    return directory


def load_trained_model(directory: str | Path) -> TrainedModel:
    """디렉토리에서 TrainedModel을 복원해요.

    Raises:
        FileFormatError: model.json이 없거나 형식이 맞지 않을 때
    """
    directory = Path(directory)
    try:
        meta = json.loads((directory / MODEL_JSON).read_text(encoding="utf-8"))
        config = AdnnConfig.model_validate(meta["config"])
        history = [EpochRecord(**r) for r in meta["history"]]
        kind = meta["architecture"]
        norm_mean = np.asarray(meta["norm_mean"], dtype=np.float64)
        norm_std = np.asarray(meta["norm_std"], dtype=np.float64)
        best_epoch = int(meta["best_epoch"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, pydantic.ValidationError) as e:
        raise FileFormatError(f"invalid model directory {directory}: {e}") from e

    params, state = load_params(directory / PARAMS_FILE)
    return TrainedModel(
        kind=kind,
        config=config,
        params=params,
        state=state,
        norm_mean=norm_mean,
        norm_std=norm_std,
        history=history,
        best_epoch=best_epoch,
    )
