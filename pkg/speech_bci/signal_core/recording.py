"""연속 신호와 에폭 데이터 타입 모듈.

증폭기 설정(1,000 Hz, 58채널)을 기본값으로 하는
RawRecording과 EpochSet을 정의해요.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from speech_bci.errors import InvalidLabelError, InvalidParameterError, ShapeError

DEFAULT_FS = 1000.0
DEFAULT_N_CHANNELS = 58

# 10/20 확장 배치, FCz(reference)와 FPz(ground)는 제외
MONTAGE_58 = (
    "Fp1", "Fp2", "AF7", "AF3", "AF4", "AF8",
    "F7", "F5", "F3", "F1", "Fz", "F2", "F4", "F6", "F8",
    "FT7", "FC5", "FC3", "FC1", "FC2", "FC4", "FC6", "FT8",
    "T7", "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "T8",
    "TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8",
    "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8",
    "PO7", "PO3", "POz", "PO4", "PO8",
    "O1", "Oz", "O2",
)  # fmt: skip

WORDS = ("/Ba/", "/Ku/", "/He/", "/Li/")


def default_channel_names(n_channels: int) -> list[str]:
    """채널 수에 맞는 채널 이름 목록을 반환해요.

    58채널 이하면 표준 배치 앞부분을, 그보다 많으면 EEG{i} 이름을 써요.
    """
    if n_channels <= len(MONTAGE_58):
        return list(MONTAGE_58[:n_channels])
    return [f"EEG{i + 1}" for i in range(n_channels)]


@dataclass(frozen=True)
class RawRecording:
    """다채널 연속 EEG 기록.

    Attributes:
        data (np.ndarray): [channels × samples] float32 배열
        fs (float): 샘플링 주파수 (Hz)
        channel_names (tuple[str, ...]): 몽타주 라벨
    """

    data: np.ndarray
    fs: float
    channel_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 2:
            raise ShapeError(f"recording data must be 2-D [channels x samples], got ndim={data.ndim}")
        n_channels, n_samples = data.shape
        if n_channels < 1 or n_samples < 1:
            raise ShapeError(f"recording needs >= 1 channel and sample, got {data.shape}")
        if not self.fs > 0:
            raise InvalidParameterError(f"fs must be > 0, got {self.fs}")
        if not np.all(np.isfinite(data)):
            raise InvalidParameterError("recording contains non-finite samples")

        names = tuple(self.channel_names) if self.channel_names else tuple(default_channel_names(n_channels))
        if len(names) != n_channels:
            raise ShapeError(f"{n_channels} channels but {len(names)} channel names")

        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "fs", float(self.fs))
        object.__setattr__(self, "channel_names", names)

    @property
    def n_channels(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_samples(self) -> int:
        return int(self.data.shape[1])

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs

    def with_data(self, data: np.ndarray, fs: float | None = None) -> "RawRecording":
        """채널 구성은 유지하고 데이터(와 fs)만 바꾼 새 기록을 반환해요."""
        return RawRecording(data=data, fs=self.fs if fs is None else fs, channel_names=self.channel_names)


@dataclass(frozen=True)
class EpochSet:
    """라벨이 붙은 3차원 트라이얼 배열.

    Attributes:
        data (np.ndarray): [trials × channels × samples] float32 배열
        labels (np.ndarray): 트라이얼별 클래스 인덱스
        class_names (tuple[str, ...]): 클래스(단어) 이름
        fs (float): 샘플링 주파수 (Hz)
        channel_names (tuple[str, ...]): 채널 이름
    """

    data: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...] = WORDS
    fs: float = 250.0
    channel_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if data.ndim != 3:
            raise ShapeError(f"epoch data must be 3-D [trials x channels x samples], got ndim={data.ndim}")
        if labels.shape[0] != data.shape[0]:
            raise ShapeError(f"{data.shape[0]} trials but {labels.shape[0]} labels")
        if not self.class_names:
            raise InvalidLabelError("class_names must not be empty")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise InvalidLabelError(f"labels must lie in [0, {len(self.class_names)})")
        if not self.fs > 0:
            raise InvalidParameterError(f"fs must be > 0, got {self.fs}")

        names = tuple(self.channel_names) if self.channel_names else tuple(default_channel_names(data.shape[1]))
        if len(names) != data.shape[1]:
            raise ShapeError(f"{data.shape[1]} channels but {len(names)} channel names")

        data.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "fs", float(self.fs))
        object.__setattr__(self, "channel_names", names)

    def __len__(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_channels(self) -> int:
        return int(self.data.shape[1])

    @property
    def n_samples(self) -> int:
        return int(self.data.shape[2])

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices: Sequence[int] | np.ndarray) -> "EpochSet":
        """인덱스로 고른 트라이얼만 담은 EpochSet을 반환해요."""
        idx = np.asarray(indices, dtype=np.int64)
        return EpochSet(
            data=self.data[idx],
            labels=self.labels[idx],
            class_names=self.class_names,
            fs=self.fs,
            channel_names=self.channel_names,
        )

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)
