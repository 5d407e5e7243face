"""에폭 추출 모듈."""

import logging
from collections.abc import Sequence

import numpy as np

from speech_bci.errors import InvalidParameterError, RecordingRangeError
from speech_bci.signal_core.recording import WORDS, EpochSet, RawRecording
from speech_bci.synthgen.schedule import BLANK_S, ParadigmSchedule

logger = logging.getLogger(__name__)


def epoch_stream(
    rec: RawRecording,
    schedule: ParadigmSchedule,
    class_names: Sequence[str] = WORDS,
    epoch_s: float = BLANK_S,
) -> EpochSet:
    """스케줄의 빈 화면 구간마다 에폭 하나를 잘라내요.

    Args:
        rec (RawRecording): 연속 기록
        schedule (ParadigmSchedule): 패러다임 스케줄
        class_names (Sequence[str]): 클래스 이름
        epoch_s (float): 에폭 길이 (초, 기본값: 2)

    Returns:
        EpochSet: [blank 수 × 채널 × round(epoch_s × fs)], 스케줄 순서 유지

    Raises:
        RecordingRangeError: 빈 화면 구간이 기록 범위를 벗어날 때
    """
    if not epoch_s > 0:
        raise InvalidParameterError(f"epoch_s must be > 0, got {epoch_s}")

    length = round(epoch_s * rec.fs)
    blanks = schedule.blanks
    data = np.empty((len(blanks), rec.n_channels, length), dtype=np.float32)
    labels = np.empty(len(blanks), dtype=np.int64)

    for i, event in enumerate(blanks):
        start = round(event.start_s * rec.fs)
        stop = start + length
        if start < 0 or stop > rec.n_samples:
            raise RecordingRangeError(
                f"blank {i} spans samples [{start}, {stop}) but the recording has {rec.n_samples}"
            )
        if event.word_index is None or event.word_index >= len(class_names):
            raise InvalidParameterError(f"blank {i} has word index {event.word_index} outside class_names")
        data[i] = rec.data[:, start:stop]
        labels[i] = event.word_index

    logger.debug("extracted %d epochs of %d samples", len(blanks), length)
    return EpochSet(
        data=data,
        labels=labels,
        class_names=tuple(class_names),
        fs=rec.fs,
        channel_names=rec.channel_names,
    )
