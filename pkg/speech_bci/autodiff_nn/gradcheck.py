"""유한 차분 그래디언트 검증 모듈."""

from collections.abc import Callable, Mapping

import torch

from speech_bci.errors import InvalidParameterError

Params = dict[str, torch.Tensor]


def finite_difference_grad(
    fn: Callable[[Params], float | torch.Tensor],
    params: Mapping[str, torch.Tensor],
    h: float = 1e-5,
) -> Params:
    """좌표마다 중앙 차분 (f(p+h) − f(p−h)) / 2h 를 float64로 계산해요.

    Args:
        fn (Callable[[Params], float | torch.Tensor]): 파라미터 딕셔너리 → 스칼라
        params (Mapping[str, torch.Tensor]): 기준 파라미터
        h (float): 차분 간격 (> 0)

    Returns:
        Params: 파라미터 이름별 float64 그래디언트
    """
    if not h > 0:
        raise InvalidParameterError(f"h must be > 0, got {h}")

    base = {k: v.detach().to(torch.float64).clone() for k, v in params.items()}
    grads: Params = {}
    for name, value in base.items():
        grad = torch.zeros_like(value)
        flat = value.view(-1)
        for i in range(flat.numel()):
            original = flat[i].item()
            flat[i] = original + h
            f_plus = float(fn(base))
            flat[i] = original - h
            f_minus = float(fn(base))
            flat[i] = original
            grad.view(-1)[i] = (f_plus - f_minus) / (2 * h)
        grads[name] = grad
    return grads


def relative_error(a: torch.Tensor, b: torch.Tensor) -> float:
    """max|a − b| / max(max|a|, max|b|, 1e-12)."""
    a = a.detach().to(torch.float64)
    b = b.detach().to(torch.float64)
    if a.numel() == 0:
        return 0.0
    scale = max(a.abs().max().item(), b.abs().max().item(), 1e-12)
    return (a - b).abs().max().item() / scale
