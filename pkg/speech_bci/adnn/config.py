"""ADNN/EEGNet 설정 모듈."""

from pathlib import Path

import pydantic
from pydantic import BaseModel, Field

from speech_bci.errors import InvalidConfigError


class AttentionConfig(BaseModel):
    """주의 헤드 설정.

    Attributes:
        heads (int): 헤드 수
        ffn_hidden (int): FFN 은닉 차원
        n_blocks (int): pre-LN 인코더 블록 수
        use_positional_embedding (bool): 학습 위치 임베딩 사용 여부
    """

    heads: int = Field(default=2, ge=1)
    ffn_hidden: int = Field(default=32, ge=1)
    n_blocks: int = Field(default=1, ge=0)
    use_positional_embedding: bool = True


class AdnnConfig(BaseModel):
    """아키텍처 하이퍼파라미터.

    기본값은 250 Hz, 2초 에폭(T=500) 기준의 EEGNet 구성이에요.

    Attributes:
        n_channels (int): 전극 수 C
        n_samples (int): 시간 샘플 수 T
        n_classes (int): 클래스 수
        f1 (int): 시간 필터 수
        d (int): depthwise multiplier
        f2 (int): separable 필터 수 (= f1 × d)
        temporal_kernel (int): 시간 컨볼루션 길이
        separable_kernel (int): separable 컨볼루션 길이
        pool1 (int): 첫 평균 풀링 폭
        pool2 (int): 두 번째 평균 풀링 폭
        dropout (float): 드롭아웃 비율
        attention (AttentionConfig): 주의 헤드 설정
        seed (int): 파라미터 초기화 시드
    """

    n_channels: int = Field(default=58, ge=1)
    n_samples: int = Field(default=500, ge=1)
    n_classes: int = Field(default=4, ge=2)
    f1: int = Field(default=8, ge=1)
    d: int = Field(default=2, ge=1)
    f2: int = Field(default=16, ge=1)
    temporal_kernel: int = Field(default=125, ge=1)
    separable_kernel: int = Field(default=16, ge=1)
    pool1: int = Field(default=4, ge=1)
    pool2: int = Field(default=8, ge=1)
    dropout: float = Field(default=0.25, ge=0.0, lt=1.0)
    attention: AttentionConfig = Field(default_factory=AttentionConfig)
    seed: int = Field(default=0, ge=0)

    @property
    def d_model(self) -> int:
        return self.f2

    @property
    def token_count(self) -> int:
        """floor(floor(T / pool1) / pool2)."""
        return (self.n_samples // self.pool1) // self.pool2

    def check(self) -> "AdnnConfig":
        """아키텍처 불변식을 검사해요.

        Raises:
            InvalidConfigError: F2 ≠ F1·D, 풀링이 시간 축을 없앨 때, d_model이 헤드 수로 안 나눠질 때
        """
        if self.f2 != self.f1 * self.d:
            raise InvalidConfigError(f"f2 ({self.f2}) must equal f1 * d ({self.f1 * self.d})")
        if self.n_samples // self.pool1 < 1:
            raise InvalidConfigError(f"pool1={self.pool1} annihilates the time axis (T={self.n_samples})")
        if self.token_count < 1:
            raise InvalidConfigError(
                f"pool2={self.pool2} annihilates the time axis ({self.n_samples // self.pool1} samples after pool1)"
            )
        if self.d_model % self.attention.heads:
            raise InvalidConfigError(f"d_model {self.d_model} is not divisible by heads {self.attention.heads}")
        return self


def load_config(model: type[BaseModel], path: str | Path):
    """JSON 파일을 pydantic 설정으로 읽어요.

    Raises:
        InvalidConfigError: 파일이 없거나 검증에 실패할 때
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
        return model.model_validate_json(text)
    except OSError as e:
        raise InvalidConfigError(f"cannot read config {path}: {e}") from e
    except pydantic.ValidationError as e:
        raise InvalidConfigError(f"invalid {model.__name__} in {path}: {e}") from e


def update_config(cfg: BaseModel, **updates):
    """필드 일부를 바꾼 설정을 다시 검증해서 만들어요.

    Raises:
        InvalidConfigError: 바꾼 값이 검증에 실패할 때
    """
    try:
        return type(cfg).model_validate({**cfg.model_dump(), **updates})
    except pydantic.ValidationError as e:
        raise InvalidConfigError(f"invalid {type(cfg).__name__} override {updates}: {e}") from e
