"""합성 데이터 모듈.

실험 패러다임 스케줄과 클래스 분리도를 조절할 수 있는 합성 EEG를 생성해요.
"""

from .generator import SubjectRecording, SynthConfig, synthesize_cohort, synthesize_recording
from .schedule import EventKind, ParadigmEvent, ParadigmSchedule, generate_schedule

__all__ = [
    "EventKind",
    "ParadigmEvent",
    "ParadigmSchedule",
    "generate_schedule",
    "SynthConfig",
    "SubjectRecording",
    "synthesize_recording",
    "synthesize_cohort",
]
