"""합성 EEG 생성 모듈.

실제 데이터셋 대신 쓰는 대리 기록을 만들어요.
배경은 1/f 잡음 + 공통 10 Hz 알파 + 60 Hz 전원 잡음이고,
빈 화면 구간마다 단어별 (주파수, 공간 패턴, Hann 포락선) 시그니처를 섞어요.
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy import signal

from speech_bci.errors import InvalidParameterError
from speech_bci.signal_core.recording import (
    DEFAULT_FS,
    DEFAULT_N_CHANNELS,
    WORDS,
    RawRecording,
    default_channel_names,
)
from speech_bci.synthgen.schedule import ParadigmSchedule, generate_schedule

logger = logging.getLogger(__name__)

# 1/f 근사 IIR 필터 계수 (white → pink)
PINK_B = np.array([0.049922035, -0.095993537, 0.050612699, -0.004408786])
PINK_A = np.array([1.0, -2.494956002, 2.017265875, -0.522189400])
PINK_BURN_IN = 4000

ALPHA_HZ = 10.0
LINE_HZ = 60.0


class SynthConfig(BaseModel):
    """합성 기록 설정.

    Attributes:
        n_channels (int): 채널 수 (기본값: 58)
        fs (float): 샘플링 주파수 (기본값: 1,000 Hz)
        words (tuple[str, ...]): 클래스(단어) 이름
        separability (float): 시그니처 세기 [0, 1], 0이면 클래스 구분 불가
        noise_scale (float): 배경 잡음 표준편차
        signature_gain (float): separability=1일 때 시그니처 진폭 / noise_scale
        alpha_scale (float): 공통 알파 진폭 / noise_scale
        line_noise_scale (float): 60 Hz 전원 잡음 진폭 / noise_scale
        seed (int): 난수 시드
    """

    n_channels: int = Field(default=DEFAULT_N_CHANNELS, ge=1)
    fs: float = Field(default=DEFAULT_FS, gt=0)
    words: tuple[str, ...] = WORDS
    separability: float = Field(default=1.0, ge=0.0, le=1.0)
    noise_scale: float = Field(default=1.0, gt=0)
    signature_gain: float = Field(default=1.5, ge=0)
    alpha_scale: float = Field(default=0.5, ge=0)
    line_noise_scale: float = Field(default=0.2, ge=0)
    seed: int = Field(default=0, ge=0)

    @field_validator("words")
    @classmethod
    def _non_empty_words(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if len(v) < 1:
            raise ValueError("at least one word is required")
        return v

    def signature_hz(self, word_index: int) -> float:
        """단어 k의 시그니처 주파수 6 + 4k Hz."""
        return 6.0 + 4.0 * word_index


@dataclass(frozen=True)
class SubjectRecording:
    """코호트의 피험자 한 명 분량.

    Attributes:
        subject_id (str): "S1" … "Sn"
        schedule (ParadigmSchedule): 패러다임 스케줄
        recording (RawRecording): 합성 기록
    """

    subject_id: str
    schedule: ParadigmSchedule
    recording: RawRecording


def spatial_patterns(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    """단어별 공간 패턴 [words × channels]을 만들어요.

    각 패턴은 약 1/3 채널에만 0.5~1.0 크기의 가중치를 가져요.
    """
    n_active = max(1, cfg.n_channels // 3)
    patterns = np.zeros((len(cfg.words), cfg.n_channels))
    for k in range(len(cfg.words)):
        active = rng.choice(cfg.n_channels, size=n_active, replace=False)
        signs = rng.choice([-1.0, 1.0], size=n_active)
        patterns[k, active] = signs * rng.uniform(0.5, 1.0, size=n_active)
    return patterns


def _pink_noise(n_channels: int, n_samples: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    out = np.empty((n_channels, n_samples), dtype=np.float32)
    for ch in range(n_channels):
        white = rng.standard_normal(n_samples + PINK_BURN_IN)
        pink = signal.lfilter(PINK_B, PINK_A, white)[PINK_BURN_IN:]
        pink -= pink.mean()
        out[ch] = pink * (scale / pink.std())
    return out


def synthesize_recording(schedule: ParadigmSchedule, cfg: SynthConfig | None = None) -> RawRecording:
    """스케줄 전체 구간의 합성 기록을 생성해요.

    같은 (schedule, cfg)는 항상 비트 단위로 같은 출력을 내요.
    난수 소비는 단어 라벨과 무관해서, separability=0이면 라벨을 바꿔도 출력이 같아요.

    Args:
        schedule (ParadigmSchedule): 패러다임 스케줄
        cfg (SynthConfig | None): 생성 설정 (None이면 기본값)

    Returns:
        RawRecording: [n_channels × round(duration × fs)] 기록
    """
    cfg = cfg or SynthConfig()
    n_words = len(cfg.words)
    nyquist = cfg.fs / 2
    if cfg.signature_hz(n_words - 1) >= nyquist:
        raise InvalidParameterError(f"signature frequencies exceed Nyquist ({nyquist} Hz)")
    for i, event in enumerate(schedule.blanks):
        if event.word_index is not None and event.word_index >= n_words:
            raise InvalidParameterError(f"blank {i} has word index {event.word_index} but only {n_words} words")

    n_samples = max(1, round(schedule.duration_s * cfg.fs))
    pattern_rng, noise_rng, rhythm_rng, trial_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)
    )

    patterns = spatial_patterns(cfg, pattern_rng)
    data = _pink_noise(cfg.n_channels, n_samples, cfg.noise_scale, noise_rng)

    t = np.arange(n_samples) / cfg.fs
    alpha_weights = rhythm_rng.uniform(0.5, 1.0, size=cfg.n_channels)
    line_weights = rhythm_rng.uniform(0.5, 1.0, size=cfg.n_channels)
    alpha_phase, line_phase = rhythm_rng.uniform(0, 2 * np.pi, size=2)
    alpha = cfg.alpha_scale * cfg.noise_scale * np.sin(2 * np.pi * ALPHA_HZ * t + alpha_phase)
    line = (
        cfg.line_noise_scale * cfg.noise_scale * np.sin(2 * np.pi * LINE_HZ * t + line_phase)
        if LINE_HZ < nyquist
        else np.zeros(n_samples)
    )
    for ch in range(cfg.n_channels):
        data[ch] += (alpha_weights[ch] * alpha + line_weights[ch] * line).astype(np.float32)

    amplitude = cfg.signature_gain * cfg.noise_scale * cfg.separability
    for event in schedule.blanks:
        phase = trial_rng.uniform(0, 2 * np.pi)
        start = round(event.start_s * cfg.fs)
        length = min(round(event.duration_s * cfg.fs), n_samples - start)
        if length <= 0 or amplitude == 0.0:
            continue
        tt = np.arange(length) / cfg.fs
        burst = amplitude * np.hanning(length) * np.sin(2 * np.pi * cfg.signature_hz(event.word_index) * tt + phase)
        data[:, start : start + length] += np.outer(patterns[event.word_index], burst).astype(np.float32)

    logger.debug(
        "synthesized %d x %d samples (separability=%.2f, seed=%d)",
        cfg.n_channels,
        n_samples,
        cfg.separability,
        cfg.seed,
    )
    return RawRecording(data=data, fs=cfg.fs, channel_names=tuple(default_channel_names(cfg.n_channels)))


def synthesize_cohort(
    n_subjects: int,
    trials_per_word: int = 50,
    cfg: SynthConfig | None = None,
) -> list[SubjectRecording]:
    """여러 피험자의 스케줄과 기록을 생성해요.

    피험자 S{k+1}은 시드 cfg.seed + k를 써서 공간 패턴과 잡음이 서로 달라요.

    Args:
        n_subjects (int): 피험자 수
        trials_per_word (int): 단어당 트라이얼 수
        cfg (SynthConfig | None): 기본 생성 설정

    Returns:
        list[SubjectRecording]: 피험자별 결과
    """
    if n_subjects < 1:
        raise InvalidParameterError(f"n_subjects must be >= 1, got {n_subjects}")
    cfg = cfg or SynthConfig()

    cohort = []
    for k in range(n_subjects):
        subject_cfg = cfg.model_copy(update={"seed": cfg.seed + k})
        schedule = generate_schedule(trials_per_word, n_words=len(cfg.words), seed=subject_cfg.seed)
        recording = synthesize_recording(schedule, subject_cfg)
        cohort.append(SubjectRecording(subject_id=f"S{k + 1}", schedule=schedule, recording=recording))
        logger.info("[OK] synthesized subject S%d (%.0f s)", k + 1, schedule.duration_s)
    return cohort
