"""실험 패러다임 스케줄 모듈.

단어 큐 블록 하나는 2초 큐, (1초 고정점 + 2초 빈 화면) 반복, 3초 굵은 고정점으로 구성돼요.
빈 화면 구간이 상상 발화(imagined speech) 트라이얼이에요.
"""

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from speech_bci.errors import FileFormatError, InvalidParameterError

CUE_S = 2.0
FIXATION_S = 1.0
BLANK_S = 2.0
BOLD_FIXATION_S = 3.0
PAIRS_PER_BLOCK = 4


class EventKind(str, Enum):
    """패러다임 이벤트 종류."""

    CUE = "cue"
    FIXATION = "fixation"
    BLANK = "blank"
    BOLD_FIXATION = "bold_fixation"


EVENT_DURATIONS = {
    EventKind.CUE: CUE_S,
    EventKind.FIXATION: FIXATION_S,
    EventKind.BLANK: BLANK_S,
    EventKind.BOLD_FIXATION: BOLD_FIXATION_S,
}


@dataclass(frozen=True)
class ParadigmEvent:
    """스케줄 이벤트 하나.

    Attributes:
        kind (EventKind): 이벤트 종류
        word_index (int | None): 큐/빈 화면이면 단어 인덱스, 고정점이면 None
        start_s (float): 시작 시각 (초)
        duration_s (float): 길이 (초)
    """

    kind: EventKind
    word_index: int | None
    start_s: float
    duration_s: float

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "word_index": self.word_index,
            "start_s": self.start_s,
            "duration_s": self.duration_s,
        }


@dataclass(frozen=True)
class ParadigmSchedule:
    """시간 순으로 정렬된, 겹치지 않는 이벤트 목록."""

    events: tuple[ParadigmEvent, ...]

    def __post_init__(self) -> None:
        events = tuple(self.events)
        last_end = -math.inf
        cued_word: int | None = None
        for i, event in enumerate(events):
            if event.start_s < last_end - 1e-9:
                raise InvalidParameterError(f"event {i} overlaps or is out of order")
            if event.duration_s <= 0:
                raise InvalidParameterError(f"event {i} has non-positive duration")
            if event.kind == EventKind.CUE:
                cued_word = event.word_index
            elif event.kind == EventKind.BLANK and (event.word_index is None or event.word_index != cued_word):
                raise InvalidParameterError(f"blank event {i} is not preceded by a cue for its word")
            last_end = event.end_s
        object.__setattr__(self, "events", events)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def blanks(self) -> list[ParadigmEvent]:
        return [e for e in self.events if e.kind == EventKind.BLANK]

    @property
    def duration_s(self) -> float:
        return self.events[-1].end_s if self.events else 0.0

    def blank_counts(self, n_words: int) -> list[int]:
        """단어별 빈 화면(트라이얼) 수를 반환해요."""
        counts = [0] * n_words
        for event in self.blanks:
            counts[event.word_index] += 1  # type: ignore[index]
        return counts

    def to_json(self) -> str:
        return json.dumps({"events": [e.to_dict() for e in self.events]}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ParadigmSchedule":
        """JSON 텍스트에서 스케줄을 복원해요.

        Raises:
            FileFormatError: 필드 누락 또는 알 수 없는 이벤트 종류
        """
        try:
            raw = json.loads(text)
            events = tuple(
                ParadigmEvent(
                    kind=EventKind(item["kind"]),
                    word_index=None if item.get("word_index") is None else int(item["word_index"]),
                    start_s=float(item["start_s"]),
                    duration_s=float(item["duration_s"]),
                )
                for item in raw["events"]
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FileFormatError(f"invalid schedule JSON: {e}") from e
        return cls(events=events)


def generate_schedule(trials_per_word: int, n_words: int = 4, seed: int = 0) -> ParadigmSchedule:
    """무작위 단어 순서의 블록 스케줄을 생성해요.

    단어마다 ceil(trials_per_word / 4)개의 블록을 만들고, trials_per_word가 4의 배수가 아니면
    그 단어의 마지막 블록에는 나머지 개수만큼의 (고정점, 빈 화면) 쌍만 들어가요.

    Args:
        trials_per_word (int): 단어당 트라이얼 수
        n_words (int): 단어 수 (기본값: 4)
        seed (int): 블록 순서 셔플 시드

    Returns:
        ParadigmSchedule: t=0부터 시작하는 스케줄
    """
    if trials_per_word < 1:
        raise InvalidParameterError(f"trials_per_word must be >= 1, got {trials_per_word}")
    if n_words < 1:
        raise InvalidParameterError(f"n_words must be >= 1, got {n_words}")

    blocks_per_word = math.ceil(trials_per_word / PAIRS_PER_BLOCK)
    order = np.repeat(np.arange(n_words), blocks_per_word)
    np.random.default_rng(seed).shuffle(order)

    remaining = [trials_per_word] * n_words
    events: list[ParadigmEvent] = []
    t = 0.0

    def add(kind: EventKind, word: int | None) -> None:
        nonlocal t
        events.append(ParadigmEvent(kind=kind, word_index=word, start_s=t, duration_s=EVENT_DURATIONS[kind]))
        t += EVENT_DURATIONS[kind]

    for word in order.tolist():
        pairs = min(PAIRS_PER_BLOCK, remaining[word])
        remaining[word] -= pairs
        add(EventKind.CUE, word)
        for _ in range(pairs):
            add(EventKind.FIXATION, None)
            add(EventKind.BLANK, word)
        add(EventKind.BOLD_FIXATION, None)

    return ParadigmSchedule(events=tuple(events))
