"""레이어 명세 카탈로그 모듈.

각 레이어는 불변 dataclass로 선언되고, 형상 추론, 파라미터 형상/초기화,
순전파 함수를 함께 가져요. 입력 형상은 배치 차원을 뺀 튜플이에요.
컨볼루션 배치는 [batch × channels × height(전극) × width(시간)]이에요.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from math import prod, sqrt

import torch
import torch.nn.functional as F

from speech_bci.autodiff_nn.attention import mha_forward
from speech_bci.errors import InvalidParameterError, InvalidStateError, ShapeError

Shape = tuple[int, ...]

TRUNC_STD = 0.02
TRUNC_BOUND = 2.0  # 표준편차 단위 절단 범위


@dataclass
class ForwardContext:
    """순전파 한 번 동안 공유되는 상태.

    Attributes:
        mode (str): "train" 또는 "eval"
        generator (torch.Generator): 드롭아웃 마스크용 시드 생성기
        state (Mapping[str, torch.Tensor]): 입력 BatchNorm 이동 통계
        new_state (dict[str, torch.Tensor]): 학습 모드에서 갱신된 이동 통계
        masks (dict[str, torch.Tensor]): 기록된 드롭아웃 마스크
    """

    mode: str
    generator: torch.Generator
    state: Mapping[str, torch.Tensor] = field(default_factory=dict)
    new_state: dict[str, torch.Tensor] = field(default_factory=dict)
    masks: dict[str, torch.Tensor] = field(default_factory=dict)

    @property
    def training(self) -> bool:
        return self.mode == "train"


def trunc_normal(shape: Shape, generator: torch.Generator, dtype: torch.dtype, std: float = TRUNC_STD) -> torch.Tensor:
    """±2σ에서 절단한 정규 분포를 역CDF로 샘플링해요."""
    bound = torch.tensor(TRUNC_BOUND, dtype=torch.float64)
    lo = torch.special.ndtr(-bound)
    hi = torch.special.ndtr(bound)
    u = lo + (hi - lo) * torch.rand(shape, generator=generator, dtype=torch.float64)
    return (torch.special.ndtri(u) * std).to(dtype)


def fan_in_uniform(shape: Shape, fan_in: int, generator: torch.Generator, dtype: torch.dtype) -> torch.Tensor:
    bound = 1.0 / sqrt(fan_in)
    return ((torch.rand(shape, generator=generator, dtype=torch.float64) * 2 - 1) * bound).to(dtype)


def _pair(value: int | tuple[int, int]) -> tuple[int, int]:
    if isinstance(value, int):
        return (value, value)
    return (int(value[0]), int(value[1]))


def same_padding(kernel: tuple[int, int]) -> tuple[int, int, int, int]:
    """F.pad 순서 (left, right, top, bottom). 홀수 나머지는 오른쪽/아래에 붙여요."""
    kh, kw = kernel
    top, left = (kh - 1) // 2, (kw - 1) // 2
    return (left, kw - 1 - left, top, kh - 1 - top)


def _require_ndim(in_shape: Shape, ndim: int, what: str) -> None:
    if len(in_shape) != ndim:
        raise ShapeError(f"{what} expects {ndim}-D input per sample, got {in_shape}")


def _dropout(x: torch.Tensor, p: float, ctx: ForwardContext, key: str) -> torch.Tensor:
    if not ctx.training or p == 0.0:
        return x
    keep = torch.rand(x.shape, generator=ctx.generator, dtype=x.dtype) >= p
    mask = keep.to(x.dtype) / (1.0 - p)
    ctx.masks[key] = mask
    return x * mask


@dataclass(frozen=True)
class LayerSpec:
    """레이어 명세 베이스 클래스. 기본 동작은 파라미터 없는 항등 형상이에요."""

    def out_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def param_shapes(self, in_shape: Shape) -> dict[str, Shape]:  # noqa: ARG002
        return {}

    def state_shapes(self, in_shape: Shape) -> dict[str, Shape]:  # noqa: ARG002
        return {}

    def init_param(self, name: str, shape: Shape, in_shape: Shape, generator: torch.Generator, dtype: torch.dtype):  # noqa: ARG002
        if name.endswith("bias"):
            return torch.zeros(shape, dtype=dtype)
        return trunc_normal(shape, generator, dtype)

    def apply(self, x: torch.Tensor, params: Mapping[str, torch.Tensor], ctx: ForwardContext, key: str) -> torch.Tensor:  # noqa: ARG002
        return x


class _ConvInit:
    def init_param(self, name, shape, in_shape, generator, dtype):  # noqa: ARG002
        if name.endswith("bias"):
            return torch.zeros(shape, dtype=dtype)
        return fan_in_uniform(shape, prod(shape[1:]), generator, dtype)


def _conv_out(in_shape: Shape, out_channels: int, kernel: tuple[int, int], padding: str) -> Shape:
    _, h, w = in_shape
    if padding == "same":
        return (out_channels, h, w)
    oh, ow = h - kernel[0] + 1, w - kernel[1] + 1
    if oh < 1 or ow < 1:
        raise ShapeError(f"kernel {kernel} larger than input {in_shape[1:]}")
    return (out_channels, oh, ow)


def _conv(x: torch.Tensor, weight: torch.Tensor, bias: torch.Tensor | None, padding: str, groups: int) -> torch.Tensor:
    if padding == "same":
        x = F.pad(x, same_padding((weight.shape[2], weight.shape[3])))
    return F.conv2d(x, weight, bias, groups=groups)


def _check_padding(padding: str) -> None:
    if padding not in ("same", "valid"):
        raise InvalidParameterError(f"padding must be 'same' or 'valid', got {padding!r}")


@dataclass(frozen=True)
class Conv2d(_ConvInit, LayerSpec):
    """일반 2D 컨볼루션."""

    out_channels: int
    kernel: tuple[int, int]
    padding: str = "same"
    bias: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", _pair(self.kernel))
        _check_padding(self.padding)
        if self.out_channels < 1 or min(self.kernel) < 1:
            raise InvalidParameterError("Conv2d dims must be positive")

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 3, "Conv2d")
        return _conv_out(in_shape, self.out_channels, self.kernel, self.padding)

    def param_shapes(self, in_shape):
        shapes = {"weight": (self.out_channels, in_shape[0], *self.kernel)}
        if self.bias:
            shapes["bias"] = (self.out_channels,)
        return shapes

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return _conv(x, params["weight"], params.get("bias"), self.padding, groups=1)


@dataclass(frozen=True)
class DepthwiseConv2d(_ConvInit, LayerSpec):
    """채널별(depthwise) 컨볼루션. 출력 채널 = 입력 채널 × multiplier."""

    multiplier: int
    kernel: tuple[int, int]
    padding: str = "valid"
    bias: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", _pair(self.kernel))
        _check_padding(self.padding)
        if self.multiplier < 1 or min(self.kernel) < 1:
            raise InvalidParameterError("DepthwiseConv2d dims must be positive")

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 3, "DepthwiseConv2d")
        return _conv_out(in_shape, in_shape[0] * self.multiplier, self.kernel, self.padding)

    def param_shapes(self, in_shape):
        out = in_shape[0] * self.multiplier
        shapes = {"weight": (out, 1, *self.kernel)}
        if self.bias:
            shapes["bias"] = (out,)
        return shapes

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return _conv(x, params["weight"], params.get("bias"), self.padding, groups=x.shape[1])


@dataclass(frozen=True)
class SeparableConv2d(_ConvInit, LayerSpec):
    """depthwise(multiplier 1) + pointwise 1×1 컨볼루션."""

    out_channels: int
    kernel: tuple[int, int]
    padding: str = "same"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", _pair(self.kernel))
        _check_padding(self.padding)
        if self.out_channels < 1 or min(self.kernel) < 1:
            raise InvalidParameterError("SeparableConv2d dims must be positive")

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 3, "SeparableConv2d")
        return _conv_out(in_shape, self.out_channels, self.kernel, self.padding)

    def param_shapes(self, in_shape):
        return {
            "depthwise": (in_shape[0], 1, *self.kernel),
            "pointwise": (self.out_channels, in_shape[0], 1, 1),
        }

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        h = _conv(x, params["depthwise"], None, self.padding, groups=x.shape[1])
        return F.conv2d(h, params["pointwise"])


@dataclass(frozen=True)
class BatchNorm(LayerSpec):
    """채널(dim 1)별 배치 정규화. 학습 모드는 배치 통계, 평가 모드는 이동 통계를 써요."""

    momentum: float = 0.1
    eps: float = 1e-5

    def out_shape(self, in_shape):
        if len(in_shape) not in (1, 3):
            raise ShapeError(f"BatchNorm expects 1-D or 3-D input per sample, got {in_shape}")
        return in_shape

    def param_shapes(self, in_shape):
        return {"weight": (in_shape[0],), "bias": (in_shape[0],)}

    def state_shapes(self, in_shape):
        return {"running_mean": (in_shape[0],), "running_var": (in_shape[0],)}

    def init_param(self, name, shape, in_shape, generator, dtype):  # noqa: ARG002
        return torch.ones(shape, dtype=dtype) if name == "weight" else torch.zeros(shape, dtype=dtype)

    def apply(self, x, params, ctx, key):
        dims = [0] + list(range(2, x.dim()))
        view = [1, -1] + [1] * (x.dim() - 2)
        if ctx.training:
            mean = x.mean(dim=dims)
            var = x.var(dim=dims, unbiased=False)
            n = x.numel() // x.shape[1]
            unbiased = var.detach() * (n / (n - 1)) if n > 1 else var.detach()
            old_mean = ctx.state.get(f"{key}.running_mean", torch.zeros_like(mean))
            old_var = ctx.state.get(f"{key}.running_var", torch.ones_like(var))
            ctx.new_state[f"{key}.running_mean"] = (1 - self.momentum) * old_mean + self.momentum * mean.detach()
            ctx.new_state[f"{key}.running_var"] = (1 - self.momentum) * old_var + self.momentum * unbiased
        else:
            try:
                mean = ctx.state[f"{key}.running_mean"]
                var = ctx.state[f"{key}.running_var"]
            except KeyError as e:
                raise InvalidStateError(f"missing batch-norm running statistics {e}") from e
        x_hat = (x - mean.view(view)) / torch.sqrt(var.view(view) + self.eps)
        return x_hat * params["weight"].view(view) + params["bias"].view(view)


@dataclass(frozen=True)
class ELU(LayerSpec):
    alpha: float = 1.0

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return F.elu(x, alpha=self.alpha)


@dataclass(frozen=True)
class AvgPool(LayerSpec):
    """겹치지 않는 평균 풀링 (stride = kernel, 나머지는 버림)."""

    kernel: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", _pair(self.kernel))
        if min(self.kernel) < 1:
            raise InvalidParameterError("AvgPool kernel must be positive")

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 3, "AvgPool")
        c, h, w = in_shape
        oh, ow = h // self.kernel[0], w // self.kernel[1]
        if oh < 1 or ow < 1:
            raise ShapeError(f"pool {self.kernel} annihilates input {in_shape[1:]}")
        return (c, oh, ow)

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return F.avg_pool2d(x, self.kernel, stride=self.kernel)


@dataclass(frozen=True)
class Dropout(LayerSpec):
    """역스케일 드롭아웃 (학습 시 1/(1−p) 곱)."""

    p: float = 0.25

    def __post_init__(self) -> None:
        if not 0 <= self.p < 1:
            raise InvalidParameterError(f"dropout p must lie in [0, 1), got {self.p}")

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return _dropout(x, self.p, ctx, key)


@dataclass(frozen=True)
class Flatten(LayerSpec):
    def out_shape(self, in_shape):
        return (prod(in_shape),)

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return x.reshape(x.shape[0], -1)


@dataclass(frozen=True)
class Linear(LayerSpec):
    """마지막 축에 y = x Wᵀ + b 를 적용해요. W는 [out × in]."""

    out_features: int

    def __post_init__(self) -> None:
        if self.out_features < 1:
            raise InvalidParameterError("Linear out_features must be positive")

    def out_shape(self, in_shape):
        return (*in_shape[:-1], self.out_features)

    def param_shapes(self, in_shape):
        return {"weight": (self.out_features, in_shape[-1]), "bias": (self.out_features,)}

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return F.linear(x, params["weight"], params["bias"])


@dataclass(frozen=True)
class LayerNorm(LayerSpec):
    """마지막 축 정규화 + affine."""

    eps: float = 1e-5

    def param_shapes(self, in_shape):
        return {"weight": (in_shape[-1],), "bias": (in_shape[-1],)}

    def init_param(self, name, shape, in_shape, generator, dtype):  # noqa: ARG002
        return torch.ones(shape, dtype=dtype) if name == "weight" else torch.zeros(shape, dtype=dtype)

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return F.layer_norm(x, (x.shape[-1],), params["weight"], params["bias"], self.eps)


@dataclass(frozen=True)
class MultiHeadAttention(LayerSpec):
    """[tokens × d_model] 입력의 다중 헤드 자기 주의."""

    d_model: int
    heads: int

    def __post_init__(self) -> None:
        if self.d_model < 1 or self.heads < 1:
            raise InvalidParameterError("MultiHeadAttention dims must be positive")
        if self.d_model % self.heads:
            raise InvalidParameterError(f"d_model {self.d_model} is not divisible by heads {self.heads}")

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 2, "MultiHeadAttention")
        if in_shape[-1] != self.d_model:
            raise ShapeError(f"token dim {in_shape[-1]} != d_model {self.d_model}")
        return in_shape

    def param_shapes(self, in_shape):  # noqa: ARG002
        d = self.d_model
        return {
            "wq": (d, d), "bq": (d,),
            "wk": (d, d), "bk": (d,),
            "wv": (d, d), "bv": (d,),
            "wo": (d, d), "bo": (d,),
        }  # fmt: skip

    def init_param(self, name, shape, in_shape, generator, dtype):  # noqa: ARG002
        if name.startswith("b"):
            return torch.zeros(shape, dtype=dtype)
        return trunc_normal(shape, generator, dtype)

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return mha_forward(x, params, self.heads)


@dataclass(frozen=True)
class FeedForward(LayerSpec):
    """Linear(hidden) → ELU → Dropout → Linear(d_model)."""

    hidden: int
    p: float = 0.0

    def __post_init__(self) -> None:
        if self.hidden < 1:
            raise InvalidParameterError("FeedForward hidden must be positive")
        if not 0 <= self.p < 1:
            raise InvalidParameterError(f"dropout p must lie in [0, 1), got {self.p}")

    def param_shapes(self, in_shape):
        d = in_shape[-1]
        return {
            "w1": (self.hidden, d),
            "b1": (self.hidden,),
            "w2": (d, self.hidden),
            "b2": (d,),
        }

    def init_param(self, name, shape, in_shape, generator, dtype):  # noqa: ARG002
        if name.startswith("b"):
            return torch.zeros(shape, dtype=dtype)
        return trunc_normal(shape, generator, dtype)

    def apply(self, x, params, ctx, key):
        h = F.elu(F.linear(x, params["w1"], params["b1"]))
        h = _dropout(h, self.p, ctx, f"{key}.dropout")
        return F.linear(h, params["w2"], params["b2"])


@dataclass(frozen=True)
class Softmax(LayerSpec):
    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return torch.softmax(x, dim=-1)


@dataclass(frozen=True)
class Tokens(LayerSpec):
    """[F × 1 × T] 특징 맵을 T개의 F차원 토큰 [T × F]로 바꿔요."""

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 3, "Tokens")
        f, h, t = in_shape
        if h != 1:
            raise ShapeError(f"Tokens expects height 1, got {h}")
        return (t, f)

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return x.squeeze(2).transpose(1, 2)


@dataclass(frozen=True)
class PositionalEmbedding(LayerSpec):
    """학습되는 위치 임베딩 [T × d]을 더해요."""

    def out_shape(self, in_shape):
        _require_ndim(in_shape, 2, "PositionalEmbedding")
        return in_shape

    def param_shapes(self, in_shape):
        return {"embedding": tuple(in_shape)}

    def apply(self, x, params, ctx, key):  # noqa: ARG002
        return x + params["embedding"]


@dataclass(frozen=True)
class Identity(LayerSpec):
    pass


@dataclass(frozen=True)
class Residual(LayerSpec):
    """x + f(x). f는 하위 레이어 스택이고 파라미터 이름은 "{j}.{name}"이에요."""

    layers: tuple[LayerSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))

    def _trace(self, in_shape: Shape) -> list[Shape]:
        shapes = [in_shape]
        for layer in self.layers:
            shapes.append(layer.out_shape(shapes[-1]))
        return shapes

    def out_shape(self, in_shape):
        if self._trace(in_shape)[-1] != tuple(in_shape):
            raise ShapeError("residual branch changes the shape")
        return in_shape

    def param_shapes(self, in_shape):
        shapes = self._trace(in_shape)
        out = {}
        for j, layer in enumerate(self.layers):
            for name, shape in layer.param_shapes(shapes[j]).items():
                out[f"{j}.{name}"] = shape
        return out

    def state_shapes(self, in_shape):
        shapes = self._trace(in_shape)
        out = {}
        for j, layer in enumerate(self.layers):
            for name, shape in layer.state_shapes(shapes[j]).items():
                out[f"{j}.{name}"] = shape
        return out

    def init_param(self, name, shape, in_shape, generator, dtype):
        j, _, sub_name = name.partition(".")
        sub_in = self._trace(in_shape)[int(j)]
        return self.layers[int(j)].init_param(sub_name, shape, sub_in, generator, dtype)

    def apply(self, x, params, ctx, key):
        h = x
        for j, layer in enumerate(self.layers):
            prefix = f"{j}."
            sub = {k[len(prefix) :]: v for k, v in params.items() if k.startswith(prefix)}
            h = layer.apply(h, sub, ctx, f"{key}.{j}")
        return x + h
