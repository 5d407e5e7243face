"""다중 헤드 자기 주의(Multi-head self-attention) 모듈."""

from collections.abc import Mapping
from math import sqrt

import torch

from speech_bci.errors import InvalidParameterError, ShapeError

PROJECTIONS = ("q", "k", "v", "o")


def _project(x: torch.Tensor, weights: Mapping[str, torch.Tensor], name: str) -> torch.Tensor:
    w = weights[f"w{name}"]
    b = weights.get(f"b{name}")
    y = x @ w
    return y if b is None else y + b


def mha_forward(
    x: torch.Tensor,
    weights: Mapping[str, torch.Tensor],
    heads: int,
    return_weights: bool = False,
) -> torch.Tensor | tuple[torch.Tensor, torch.Tensor]:
    """토큰 시퀀스에 다중 헤드 주의를 적용해요.

    투영은 x @ W + b 규약이고, 헤드 h마다 softmax(Q_h K_hᵀ / √d_head) V_h를
    계산한 뒤 헤드를 이어 붙여 Wo로 투영해요.

    Args:
        x (torch.Tensor): [tokens × d_model] 또는 [batch × tokens × d_model]
        weights (Mapping[str, torch.Tensor]): wq, wk, wv, wo ([d × d]), 선택적 bq, bk, bv, bo
        heads (int): 헤드 수 (d_model을 나눠떨어지게 해야 해요)
        return_weights (bool): True면 주의 가중치 [batch × heads × tokens × tokens]도 반환

    Returns:
        torch.Tensor | tuple[torch.Tensor, torch.Tensor]: 입력과 같은 형상의 출력 (및 가중치)
    """
    unbatched = x.dim() == 2
    if unbatched:
        x = x.unsqueeze(0)
    if x.dim() != 3:
        raise ShapeError(f"attention input must be [tokens x d] or [batch x tokens x d], got {tuple(x.shape)}")

    batch, tokens, d_model = x.shape
    if heads < 1 or d_model % heads:
        raise InvalidParameterError(f"d_model {d_model} is not divisible by heads {heads}")
    for name in PROJECTIONS:
        if tuple(weights[f"w{name}"].shape) != (d_model, d_model):
            raise ShapeError(f"w{name} must be [{d_model} x {d_model}]")
    d_head = d_model // heads

    def split(t: torch.Tensor) -> torch.Tensor:
        return t.reshape(batch, tokens, heads, d_head).transpose(1, 2)

    q = split(_project(x, weights, "q"))
    k = split(_project(x, weights, "k"))
    v = split(_project(x, weights, "v"))

    scores = q @ k.transpose(-2, -1) / sqrt(d_head)
    attn = torch.softmax(scores, dim=-1)
    context = (attn @ v).transpose(1, 2).reshape(batch, tokens, d_model)
    out = _project(context, weights, "o")

    if unbatched:
        out = out.squeeze(0)
    return (out, attn) if return_weights else out
