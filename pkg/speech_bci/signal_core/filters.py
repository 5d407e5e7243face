"""필터링과 리샘플링 모듈.

모든 필터는 scipy SOS(biquad cascade)를 forward-backward로 적용해서
위상 지연이 없어요. 계산은 float64, 저장은 float32예요.
"""

import logging

import numpy as np
from scipy import signal

from speech_bci.errors import InvalidParameterError, UnsupportedUpsampleError
from speech_bci.signal_core.recording import RawRecording

logger = logging.getLogger(__name__)

BANDPASS_ORDER = 4


def _filtfilt(sos: np.ndarray, data: np.ndarray, fs: float) -> np.ndarray:
    """SOS 필터를 시간 축에 zero-phase로 적용해요."""
    n_samples = data.shape[-1]
    if n_samples < 2:
        return data.astype(np.float64)
    padlen = min(n_samples - 1, int(fs))
    return signal.sosfiltfilt(sos, data.astype(np.float64), axis=-1, padlen=padlen)


def notch_filter(rec: RawRecording, center_hz: float = 60.0, quality: float = 30.0) -> RawRecording:
    """전원 잡음 제거용 노치 필터를 적용해요.

    Args:
        rec (RawRecording): 입력 기록
        center_hz (float): 제거할 주파수 (기본값: 60 Hz)
        quality (float): Q 값, 클수록 좁은 노치

    Returns:
        RawRecording: 같은 형상/fs의 필터링된 기록
    """
    nyquist = rec.fs / 2
    if not 0 < center_hz < nyquist:
        raise InvalidParameterError(f"notch center {center_hz} Hz must lie in (0, {nyquist}) Hz")
    if not quality > 0:
        raise InvalidParameterError(f"notch quality must be > 0, got {quality}")

    b, a = signal.iirnotch(center_hz, quality, fs=rec.fs)
    sos = signal.tf2sos(b, a)
    filtered = _filtfilt(sos, rec.data, rec.fs)
    logger.debug("notch %.1f Hz (Q=%.1f) on %d channels", center_hz, quality, rec.n_channels)
    return rec.with_data(filtered)


def bandpass_filter(rec: RawRecording, lo_hz: float = 0.5, hi_hz: float = 40.0) -> RawRecording:
    """4차 Butterworth 대역 통과 필터를 적용해요.

    Args:
        rec (RawRecording): 입력 기록
        lo_hz (float): 하한 주파수
        hi_hz (float): 상한 주파수

    Returns:
        RawRecording: 대역 통과된 기록
    """
    nyquist = rec.fs / 2
    if not 0 < lo_hz < hi_hz < nyquist:
        raise InvalidParameterError(f"band must satisfy 0 < lo < hi < {nyquist}, got [{lo_hz}, {hi_hz}]")

    sos = signal.butter(BANDPASS_ORDER, [lo_hz, hi_hz], btype="bandpass", fs=rec.fs, output="sos")
    filtered = _filtfilt(sos, rec.data, rec.fs)
    logger.debug("bandpass %.2f-%.2f Hz on %d channels", lo_hz, hi_hz, rec.n_channels)
    return rec.with_data(filtered)


def decimation_factor(fs: float, to_hz: float) -> int:
    """정수 데시메이션 계수를 계산해요. 정수가 아니면 예외를 던져요."""
    if not to_hz > 0:
        raise InvalidParameterError(f"target rate must be > 0, got {to_hz}")
    if to_hz > fs:
        raise UnsupportedUpsampleError(f"cannot resample {fs} Hz up to {to_hz} Hz")
    ratio = fs / to_hz
    factor = round(ratio)
    if abs(ratio - factor) > 1e-9:
        raise InvalidParameterError(f"{fs} Hz -> {to_hz} Hz is not an integer decimation")
    return int(factor)


def resample(rec: RawRecording, to_hz: float) -> RawRecording:
    """안티앨리어싱 저역 통과 후 정수 배로 데시메이션해요.

    Args:
        rec (RawRecording): 입력 기록
        to_hz (float): 목표 샘플링 주파수 (fs 이하, fs의 정수 약수)

    Returns:
        RawRecording: 샘플 수가 floor(samples × to_hz / fs)인 기록
    """
    factor = decimation_factor(rec.fs, to_hz)
    if factor == 1:
        return rec

    n_out = rec.n_samples // factor
    decimated = signal.decimate(rec.data.astype(np.float64), factor, ftype="fir", axis=-1, zero_phase=True)
    logger.debug("resample %.1f Hz -> %.1f Hz (factor %d)", rec.fs, to_hz, factor)
    return rec.with_data(decimated[:, :n_out], fs=float(to_hz))
