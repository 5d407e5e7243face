"""EEGNet 백본과 ADNN(EEGNet + pre-LN 다중 헤드 주의) 레이어 스택 모듈."""

from speech_bci.adnn.config import AdnnConfig
from speech_bci.autodiff_nn.layers import (
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
from speech_bci.errors import InvalidParameterError

MODEL_KINDS = ("eegnet", "adnn")


def input_shape(cfg: AdnnConfig) -> tuple[int, int, int]:
    """배치 차원을 뺀 입력 형상 (1, C, T)."""
    return (1, cfg.n_channels, cfg.n_samples)


def eegnet_blocks(cfg: AdnnConfig) -> list[LayerSpec]:
    """Block1(시간 conv → 공간 depthwise conv)과 Block2(separable conv)."""
    cfg.check()
    return [
        Conv2d(cfg.f1, (1, cfg.temporal_kernel), padding="same"),
        BatchNorm(),
        DepthwiseConv2d(cfg.d, (cfg.n_channels, 1), padding="valid"),
        BatchNorm(),
        ELU(),
        AvgPool((1, cfg.pool1)),
        Dropout(cfg.dropout),
        SeparableConv2d(cfg.f2, (1, cfg.separable_kernel), padding="same"),
        BatchNorm(),
        ELU(),
        AvgPool((1, cfg.pool2)),
        Dropout(cfg.dropout),
    ]


def classifier(cfg: AdnnConfig) -> list[LayerSpec]:
    return [Flatten(), Linear(cfg.n_classes), Softmax()]


def build_eegnet(cfg: AdnnConfig) -> list[LayerSpec]:
    """EEGNet 레이어 스택을 만들어요.

    Raises:
        InvalidConfigError: 설정이 아키텍처 불변식을 어길 때
    """
    return eegnet_blocks(cfg) + classifier(cfg)


def build_adnn(cfg: AdnnConfig, bypass_attention: bool = False) -> list[LayerSpec]:
    """ADNN 레이어 스택을 만들어요.

    Block2의 [F2 × 1 × T₂] 특징 맵을 T₂개의 F2차원 토큰으로 바꾼 뒤,
    위치 임베딩과 n_blocks개의 pre-LN 인코더 블록
    (x += MHA(LN(x)), x += FFN(LN(x)))을 거쳐 최종 LN과 분류기로 보내요.

    Args:
        cfg (AdnnConfig): 아키텍처 설정
        bypass_attention (bool): True면 잔차 블록을 Identity로 바꿔요 (레이어 인덱스는 유지)

    Returns:
        list[LayerSpec]: 레이어 스택
    """
    att = cfg.attention
    layers = eegnet_blocks(cfg)
    layers.append(Tokens())
    layers.append(PositionalEmbedding() if att.use_positional_embedding else Identity())
    for _ in range(att.n_blocks):
        attention = Residual((LayerNorm(), MultiHeadAttention(cfg.d_model, att.heads)))
        ffn = Residual((LayerNorm(), FeedForward(att.ffn_hidden, p=cfg.dropout)))
        layers.extend([Identity(), Identity()] if bypass_attention else [attention, ffn])
    layers.append(LayerNorm())
    return layers + classifier(cfg)


def build_model(kind: str, cfg: AdnnConfig) -> list[LayerSpec]:
    """모델 종류 태그로 레이어 스택을 만들어요."""
    if kind == "eegnet":
        return build_eegnet(cfg)
    if kind == "adnn":
        return build_adnn(cfg)
    raise InvalidParameterError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
