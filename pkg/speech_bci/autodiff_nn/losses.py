"""손실 함수 모듈."""

import torch

from speech_bci.errors import InvalidLabelError, ShapeError


def softmax_cross_entropy(logits: torch.Tensor, targets: torch.Tensor) -> tuple[float, torch.Tensor]:
    """배치 평균 교차 엔트로피와 logits에 대한 그래디언트를 계산해요.

    Args:
        logits (torch.Tensor): [batch × classes]
        targets (torch.Tensor): 길이 batch 정수 라벨

    Returns:
        tuple[float, torch.Tensor]: (평균 손실, (softmax(z) − onehot) / batch)
    """
    logits = logits.detach()
    targets = torch.as_tensor(targets, dtype=torch.long)
    if logits.dim() != 2 or targets.shape != (logits.shape[0],):
        raise ShapeError(f"logits {tuple(logits.shape)} and targets {tuple(targets.shape)} disagree")
    if targets.numel() and (targets.min() < 0 or targets.max() >= logits.shape[1]):
        raise InvalidLabelError("targets outside the class range")

    log_probs = torch.log_softmax(logits.to(torch.float64), dim=1)
    batch = logits.shape[0]
    loss = -log_probs[torch.arange(batch), targets].mean()
    onehot = torch.nn.functional.one_hot(targets, logits.shape[1]).to(torch.float64)
    grad = (log_probs.exp() - onehot) / batch
    return float(loss), grad.to(logits.dtype)
