"""PSD 대역 전력 특징 모듈.

Welch 방법(1초 Hann 창, 50% 중첩)으로 채널별 PSD를 구하고
δ/θ/α/β 대역 평균 전력을 채널 우선 순서로 펼쳐요.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import signal
from sklearn.base import BaseEstimator, TransformerMixin

from speech_bci.errors import InvalidParameterError, ShapeError

MIN_WINDOW_SAMPLES = 8


@dataclass(frozen=True)
class BandDefinition:
    """주파수 대역 [lo_hz, hi_hz)."""

    name: str
    lo_hz: float
    hi_hz: float

    def __post_init__(self) -> None:
        if not 0 <= self.lo_hz < self.hi_hz:
            raise InvalidParameterError(f"band {self.name} must satisfy 0 <= lo < hi, got [{self.lo_hz}, {self.hi_hz})")


DEFAULT_BANDS = (
    BandDefinition("delta", 1.0, 4.0),
    BandDefinition("theta", 4.0, 8.0),
    BandDefinition("alpha", 8.0, 13.0),
    BandDefinition("beta", 13.0, 30.0),
)


def welch_psd(epoch: np.ndarray, fs: float, win_s: float = 1.0, overlap: float = 0.5) -> np.ndarray:
    """채널별 one-sided PSD를 추정해요.

    Args:
        epoch (np.ndarray): [channels × samples]
        fs (float): 샘플링 주파수
        win_s (float): 창 길이 (초)
        overlap (float): 중첩 비율 [0, 1)

    Returns:
        np.ndarray: [channels × (nperseg // 2 + 1)], density 스케일 (Σ PSD·Δf ≈ 분산)
    """
    epoch = np.atleast_2d(np.asarray(epoch, dtype=np.float64))
    if epoch.ndim != 2:
        raise ShapeError(f"epoch must be [channels x samples], got ndim={epoch.ndim}")
    nperseg = round(win_s * fs)
    if nperseg < MIN_WINDOW_SAMPLES:
        raise InvalidParameterError(f"window of {nperseg} samples is shorter than {MIN_WINDOW_SAMPLES}")
    if not 0 <= overlap < 1:
        raise InvalidParameterError(f"overlap must lie in [0, 1), got {overlap}")
    if epoch.shape[-1] < nperseg:
        raise InvalidParameterError(f"window ({nperseg} samples) is longer than the epoch ({epoch.shape[-1]})")

    _, psd = signal.welch(
        epoch,
        fs=fs,
        window="hann",
        nperseg=nperseg,
        noverlap=int(nperseg * overlap),
        detrend="constant",
        scaling="density",
        axis=-1,
    )
    return np.maximum(psd, 0.0)


def psd_frequencies(n_bins: int, fs: float, nperseg: int | None = None) -> np.ndarray:
    """PSD 빈 개수에서 주파수 축을 복원해요.

    창 길이가 홀수면 빈 개수만으로는 창 길이를 알 수 없으니 nperseg를 넘겨야 해요.
    None이면 짝수 창(2·(n_bins − 1))으로 가정해요.
    """
    if nperseg is None:
        nperseg = 2 * (n_bins - 1)
    elif nperseg // 2 + 1 != n_bins:
        raise ShapeError(f"{n_bins} frequency bins do not match a {nperseg}-sample window")
    return np.fft.rfftfreq(nperseg, d=1.0 / fs)


def band_powers(
    psd: np.ndarray,
    fs: float,
    bands: Sequence[BandDefinition] = DEFAULT_BANDS,
    nperseg: int | None = None,
) -> np.ndarray:
    """대역별 평균 PSD를 채널 우선 순서로 펼쳐 반환해요.

    Args:
        psd (np.ndarray): [channels × freq_bins]
        fs (float): 샘플링 주파수
        bands (Sequence[BandDefinition]): 대역 정의
        nperseg (int | None): PSD를 만든 Welch 창 길이 (None이면 짝수 창 가정)

    Returns:
        np.ndarray: [channels × bands] 길이의 1차원 벡터
    """
    psd = np.atleast_2d(np.asarray(psd, dtype=np.float64))
    if psd.shape[-1] < 2:
        raise ShapeError("psd needs at least 2 frequency bins")
    if not bands:
        raise InvalidParameterError("at least one band is required")

    freqs = psd_frequencies(psd.shape[-1], fs, nperseg)
    nyquist = fs / 2
    out = np.empty((psd.shape[0], len(bands)))
    for j, band in enumerate(bands):
        if band.hi_hz > nyquist:
            raise InvalidParameterError(f"band {band.name} exceeds Nyquist ({nyquist} Hz)")
        mask = (freqs >= band.lo_hz) & (freqs < band.hi_hz)
        if not mask.any():
            raise InvalidParameterError(f"band {band.name} contains no frequency bins")
        out[:, j] = psd[:, mask].mean(axis=1)
    return out.reshape(-1)


class BandPowerExtractor(BaseEstimator, TransformerMixin):
    """에폭 배열 → 대역 전력 특징 행렬 변환기.

    Args:
        fs (float): 샘플링 주파수
        win_s (float): Welch 창 길이 (초)
        overlap (float): 중첩 비율
        bands (tuple[BandDefinition, ...]): 대역 정의
        log_power (bool): True면 log10 전력을 반환 (0은 1e-12로 하한)
    """

    def __init__(
        self,
        fs: float = 250.0,
        win_s: float = 1.0,
        overlap: float = 0.5,
        bands: tuple[BandDefinition, ...] = DEFAULT_BANDS,
        log_power: bool = False,
    ):
        self.fs = fs
        self.win_s = win_s
        self.overlap = overlap
        self.bands = bands
        self.log_power = log_power

    def fit(self, X: np.ndarray, y: np.ndarray | None = None) -> "BandPowerExtractor":  # noqa: ARG002
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        """[trials × channels × samples] → [trials × channels·bands]."""
        X = np.asarray(X)
        if X.ndim != 3:
            raise ShapeError(f"expected [trials x channels x samples], got ndim={X.ndim}")
        nperseg = round(self.win_s * self.fs)
        features = np.stack(
            [
                band_powers(welch_psd(epoch, self.fs, self.win_s, self.overlap), self.fs, self.bands, nperseg)
                for epoch in X
            ]
        )
        return np.log10(np.maximum(features, 1e-12)) if self.log_power else features
