"""예외 계층 모듈.

라이브러리 전체에서 사용하는 예외를 한곳에 정의해요.
CLI는 ValidationError를 종료 코드 1, NumericError를 종료 코드 2로 매핑해요.
"""


class SpeechBciError(Exception):
    """모든 라이브러리 예외의 베이스 클래스."""


class ValidationError(SpeechBciError, ValueError):
    """입력, 설정, 파일 형식 검증 실패."""


class InvalidParameterError(ValidationError):
    pass


class InvalidConfigError(ValidationError):
    pass


class ShapeError(ValidationError):
    """형상 불일치 예외.

    NN 엔진에서 발생하면 문제가 된 레이어 인덱스를 함께 담아요.

    Attributes:
        layer_index (int | None): 레이어 인덱스 (엔진 밖에서는 None)
    """

    def __init__(self, message: str, layer_index: int | None = None):
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)
        self.layer_index = layer_index


class InvalidLabelError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class StratificationError(ValidationError):
    pass


class RecordingRangeError(ValidationError):
    pass


class UnsupportedUpsampleError(ValidationError):
    pass


class UnsupportedSizeError(ValidationError):
    pass


class FileFormatError(ValidationError):
    pass


class InvalidStateError(ValidationError):
    pass


class NumericError(SpeechBciError, ArithmeticError):
    """수치 계산 실패 (퇴화 데이터, 발산, 비유한 그래디언트)."""


class DegenerateDataError(NumericError):
    pass


class DivergenceError(NumericError):
    """학습 발산 예외.

    Attributes:
        epoch (int): 손실이 비유한 값이 된 에폭
    """

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch


class NonFiniteGradientError(NumericError):
    """비유한 그래디언트 예외.

    Attributes:
        parameter (str): 문제가 된 파라미터 이름
    """

    def __init__(self, parameter: str):
        super().__init__(f"non-finite gradient for parameter '{parameter}'")
        self.parameter = parameter
