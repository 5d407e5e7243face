"""
Autodiff NN Module
- 레이어 명세 카탈로그와 순수 함수 순전파/역전파 엔진
- 다중 헤드 주의, Adam, 유한 차분 검증
"""

from .attention import mha_forward
from .engine import Params, Tape, TapeEntry, Tensor, backward, expected_param_shapes, forward, infer_shapes, init_params
from .gradcheck import finite_difference_grad, relative_error
from .layers import (
    ELU,
    AvgPool,
    BatchNorm,
    Conv2d,
    DepthwiseConv2d,
    Dropout,
    FeedForward,
    Flatten,
    Identity,
    LayerNorm,
    LayerSpec,
    Linear,
    MultiHeadAttention,
    PositionalEmbedding,
    Residual,
    SeparableConv2d,
    Softmax,
    Tokens,
)
from .losses import softmax_cross_entropy
from .optim import AdamState, adam_step

__all__ = [
    "Tensor",
    "Params",
    "Tape",
    "TapeEntry",
    "LayerSpec",
    "Conv2d",
    "DepthwiseConv2d",
    "SeparableConv2d",
    "BatchNorm",
    "ELU",
    "AvgPool",
    "Dropout",
    "Flatten",
    "Linear",
    "LayerNorm",
    "MultiHeadAttention",
    "FeedForward",
    "Softmax",
    "Tokens",
    "PositionalEmbedding",
    "Residual",
    "Identity",
    "init_params",
    "infer_shapes",
    "expected_param_shapes",
    "forward",
    "backward",
    "mha_forward",
    "softmax_cross_entropy",
    "AdamState",
    "adam_step",
    "finite_difference_grad",
    "relative_error",
]
