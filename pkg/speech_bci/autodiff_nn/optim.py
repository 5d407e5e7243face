"""Adam 옵티마이저 모듈.

파라미터와 상태를 받아 새 값을 반환하는 함수형 구현이에요.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field

import torch

from speech_bci.errors import InvalidParameterError, NonFiniteGradientError, ShapeError

Params = dict[str, torch.Tensor]


@dataclass(frozen=True)
class AdamState:
    """Adam 모멘트 상태.

    Attributes:
        t (int): 지금까지 수행한 스텝 수
        m (dict[str, torch.Tensor]): 1차 모멘트
        v (dict[str, torch.Tensor]): 2차 모멘트
    """

    t: int = 0
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)


def adam_step(
    params: Mapping[str, torch.Tensor],
    grads: Mapping[str, torch.Tensor],
    state: AdamState | None = None,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[Params, AdamState]:
    """bias correction을 적용한 Adam 업데이트를 한 스텝 수행해요.

    grads에 없는 파라미터는 그대로 유지돼요. 비유한 그래디언트가 하나라도 있으면
    아무것도 바꾸지 않고 예외를 던져요.

    Args:
        params (Mapping[str, torch.Tensor]): 현재 파라미터
        grads (Mapping[str, torch.Tensor]): 파라미터별 그래디언트
        state (AdamState | None): 이전 상태 (None이면 t=0 빈 상태)
        lr (float): 학습률
        beta1 (float): 1차 모멘트 감쇠
        beta2 (float): 2차 모멘트 감쇠
        eps (float): 분모 안정화 상수

    Returns:
        tuple[Params, AdamState]: (새 파라미터, 새 상태)

    Raises:
        NonFiniteGradientError: 그래디언트에 NaN/Inf가 있을 때 (파라미터 이름 포함)
    """
    state = state or AdamState()
    if not lr > 0 or not 0 <= beta1 < 1 or not 0 <= beta2 < 1 or not eps > 0:
        raise InvalidParameterError("invalid Adam hyperparameters")

    for name in sorted(grads):
        if name not in params:
            continue
        grad = grads[name]
        if grad.shape != params[name].shape:
            raise ShapeError(f"gradient for '{name}' has shape {tuple(grad.shape)}, expected {tuple(params[name].shape)}")
        if not bool(torch.isfinite(grad).all()):
            raise NonFiniteGradientError(name)

    t = state.t + 1
    new_params: Params = {}
    new_m = dict(state.m)
    new_v = dict(state.v)
    for name, value in params.items():
        if name not in grads:
            new_params[name] = value
            continue
        g = grads[name].to(value.dtype)
        m = beta1 * state.m.get(name, torch.zeros_like(value)) + (1 - beta1) * g
        v = beta2 * state.v.get(name, torch.zeros_like(value)) + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        new_params[name] = value - lr * m_hat / (torch.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(t=t, m=new_m, v=new_v)
