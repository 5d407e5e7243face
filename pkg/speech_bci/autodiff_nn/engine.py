"""순전파/역전파 엔진 모듈.

레이어 스택과 파라미터 딕셔너리("{layer}.{name}" 키)를 받아 순수 함수로 순전파하고,
학습 모드에서는 Tape에 연산 그래프를 기록해 한 번의 역전파에 사용해요.
그래디언트 계산은 torch autograd가 담당해요.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import torch

from speech_bci.autodiff_nn.layers import ForwardContext, LayerSpec, Shape, Softmax
from speech_bci.errors import InvalidParameterError, InvalidStateError, ShapeError, SpeechBciError

logger = logging.getLogger(__name__)

Tensor = torch.Tensor
Params = dict[str, Tensor]

MODES = ("train", "eval")


@dataclass
class TapeEntry:
    """기록된 레이어 실행 하나."""

    index: int
    layer: LayerSpec
    output: Tensor


@dataclass
class Tape:
    """학습 모드 순전파 기록.

    Attributes:
        entries (list[TapeEntry]): 실행 순서대로의 레이어 출력
        input (Tensor): requires_grad가 켜진 입력 리프
        params (dict[str, Tensor]): requires_grad가 켜진 파라미터 리프
        output (Tensor): 최종 출력
        logits (Tensor): 마지막 Softmax 직전 값 (Softmax가 없으면 output)
        new_state (dict[str, Tensor]): 갱신된 BatchNorm 이동 통계
        masks (dict[str, Tensor]): 사용된 드롭아웃 마스크
        mode (str): "train" 또는 "eval"
        consumed (bool): 역전파 완료 여부
    """

    entries: list[TapeEntry]
    input: Tensor
    params: Params
    output: Tensor
    logits: Tensor
    new_state: Params = field(default_factory=dict)
    masks: Params = field(default_factory=dict)
    mode: str = "train"
    consumed: bool = False


def _layer_params(params: Mapping[str, Tensor], index: int) -> Params:
    prefix = f"{index}."
    return {k[len(prefix) :]: v for k, v in params.items() if k.startswith(prefix)}


def infer_shapes(layers: Sequence[LayerSpec], input_shape: Shape) -> list[Shape]:
    """배치 차원을 뺀 입력 형상을 레이어마다 추적해요.

    Returns:
        list[Shape]: 길이 len(layers) + 1, 첫 원소는 입력 형상

    Raises:
        ShapeError: 문제가 된 레이어 인덱스를 담아요
    """
    shapes = [tuple(int(d) for d in input_shape)]
    for i, layer in enumerate(layers):
        try:
            shapes.append(tuple(layer.out_shape(shapes[-1])))
        except ShapeError as e:
            raise ShapeError(str(e), layer_index=i) from e
    return shapes


def expected_param_shapes(layers: Sequence[LayerSpec], input_shape: Shape) -> dict[str, Shape]:
    shapes = infer_shapes(layers, input_shape)
    return {
        f"{i}.{name}": tuple(shape)
        for i, layer in enumerate(layers)
        for name, shape in layer.param_shapes(shapes[i]).items()
    }


def init_params(
    layers: Sequence[LayerSpec],
    input_shape: Shape,
    seed: int = 0,
    dtype: torch.dtype = torch.float32,
) -> tuple[Params, Params]:
    """시드로 파라미터와 BatchNorm 이동 통계를 초기화해요.

    Args:
        layers (Sequence[LayerSpec]): 레이어 스택
        input_shape (Shape): 배치 차원을 뺀 입력 형상
        seed (int): 초기화 시드
        dtype (torch.dtype): 파라미터 dtype (검증 모드는 float64)

    Returns:
        tuple[Params, Params]: (파라미터, 이동 통계)
    """
    generator = torch.Generator().manual_seed(seed)
    shapes = infer_shapes(layers, input_shape)
    params: Params = {}
    state: Params = {}
    for i, layer in enumerate(layers):
        for name, shape in layer.param_shapes(shapes[i]).items():
            params[f"{i}.{name}"] = layer.init_param(name, shape, shapes[i], generator, dtype)
        for name, shape in layer.state_shapes(shapes[i]).items():
            fill = torch.ones if name.endswith("running_var") else torch.zeros
            state[f"{i}.{name}"] = fill(shape, dtype=dtype)
    logger.debug("initialized %d parameter tensors (%d values)", len(params), sum(p.numel() for p in params.values()))
    return params, state


def _check_params(layers: Sequence[LayerSpec], params: Mapping[str, Tensor], input_shape: Shape) -> None:
    shapes = infer_shapes(layers, input_shape)
    for i, layer in enumerate(layers):
        for name, shape in layer.param_shapes(shapes[i]).items():
            key = f"{i}.{name}"
            if key not in params:
                raise ShapeError(f"missing parameter '{key}'", layer_index=i)
            if tuple(params[key].shape) != tuple(shape):
                raise ShapeError(
                    f"parameter '{key}' has shape {tuple(params[key].shape)}, expected {tuple(shape)}",
                    layer_index=i,
                )


def forward(
    layers: Sequence[LayerSpec],
    params: Mapping[str, Tensor],
    x: Tensor,
    mode: str = "train",
    seed: int = 0,
    state: Mapping[str, Tensor] | None = None,
) -> tuple[Tensor, Tape]:
    """레이어 스택을 순전파해요.

    입력과 파라미터는 바뀌지 않아요. 학습 모드는 배치 통계와 시드 고정 드롭아웃을 쓰고
    그래프를 기록해요. 평가 모드는 드롭아웃을 끄고 이동 통계를 쓰며 그래프를 기록하지 않아요.

    Args:
        layers (Sequence[LayerSpec]): 레이어 스택
        params (Mapping[str, Tensor]): 파라미터
        x (Tensor): [batch × ...] 입력
        mode (str): "train" 또는 "eval"
        seed (int): 드롭아웃 시드
        state (Mapping[str, Tensor] | None): BatchNorm 이동 통계

    Returns:
        tuple[Tensor, Tape]: (출력, 기록)
    """
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if x.dim() < 2:
        raise ShapeError("input needs a batch dimension")
    _check_params(layers, params, tuple(x.shape[1:]))

    training = mode == "train"
    ctx = ForwardContext(mode=mode, generator=torch.Generator().manual_seed(seed), state=dict(state or {}))

    with torch.set_grad_enabled(training):
        x_leaf = x.detach().clone().requires_grad_(training)
        leaves = {k: v.detach().clone().requires_grad_(training) for k, v in params.items()}

        h = x_leaf
        logits = h
        entries: list[TapeEntry] = []
        for i, layer in enumerate(layers):
            if isinstance(layer, Softmax):
                logits = h
            try:
                h = layer.apply(h, _layer_params(leaves, i), ctx, str(i))
            except ShapeError as e:
                raise ShapeError(str(e), layer_index=i) from e
            except SpeechBciError:
                raise
            except RuntimeError as e:
                raise ShapeError(str(e), layer_index=i) from e
            entries.append(TapeEntry(index=i, layer=layer, output=h))
        if not layers or not isinstance(layers[-1], Softmax):
            logits = h

    tape = Tape(
        entries=entries,
        input=x_leaf,
        params=leaves,
        output=h,
        logits=logits,
        new_state=ctx.new_state,
        masks=ctx.masks,
        mode=mode,
    )
    return h, tape


def backward(tape: Tape, loss_grad: Tensor, at: str = "output") -> Params:
    """기록된 그래프를 한 번 역전파해요.

    Args:
        tape (Tape): 학습 모드 순전파 기록
        loss_grad (Tensor): 출발점(output 또는 logits)에 대한 손실 그래디언트
        at (str): "output" 또는 "logits"

    Returns:
        Params: 파라미터 이름별 그래디언트와 "input" 그래디언트

    Raises:
        InvalidStateError: 평가 모드 기록이거나 이미 소비된 기록일 때
    """
    if tape.mode != "train":
        raise InvalidStateError("backward needs a train-mode tape")
    if tape.consumed:
        raise InvalidStateError("tape has already been consumed by a backward pass")
    if at not in ("output", "logits"):
        raise InvalidParameterError(f"at must be 'output' or 'logits', got {at!r}")

    target = tape.output if at == "output" else tape.logits
    if tuple(loss_grad.shape) != tuple(target.shape):
        raise ShapeError(f"loss_grad shape {tuple(loss_grad.shape)} != {at} shape {tuple(target.shape)}")

    names = list(tape.params)
    inputs = [tape.input] + [tape.params[n] for n in names]
    grads = torch.autograd.grad(
        target,
        inputs,
        grad_outputs=loss_grad.to(target.dtype),
        allow_unused=True,
    )
    tape.consumed = True

    result: Params = {}
    for name, leaf, grad in zip(["input", *names], inputs, grads, strict=True):
        result[name] = torch.zeros_like(leaf) if grad is None else grad.detach()
    return result
