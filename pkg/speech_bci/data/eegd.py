"""EEGD v1 컨테이너 코덱 모듈.

레이아웃:
    bytes 0-3   magic "EEGD"
    byte  4     version (1)
    bytes 5-8   little-endian u32 헤더 길이
    header      UTF-8 JSON
    payload     little-endian float32, 헤더 "shape"(또는 "arrays") 순서의 row-major

모든 kind("raw", "epochs", "csp", "svm", "lda", "params")가 같은 코덱을 써요.
모델 kind는 헤더에 "arrays": [{"name", "shape", "offset"}]를 두고,
offset은 payload 시작 기준 바이트 오프셋이에요.
"""

import json
import logging
import struct
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np

from speech_bci.errors import FileFormatError
from speech_bci.signal_core.recording import EpochSet, RawRecording

logger = logging.getLogger(__name__)

MAGIC = b"EEGD"
VERSION = 1
PREFIX = struct.Struct("<4sBI")
PAYLOAD_DTYPE = np.dtype("<f4")

KINDS = ("raw", "epochs", "csp", "svm", "lda", "params")


def encode_container(header: Mapping[str, Any], payload: np.ndarray | bytes) -> bytes:
    """헤더와 payload를 EEGD v1 바이트열로 직렬화해요."""
    if header.get("kind") not in KINDS:
        raise FileFormatError(f"unknown container kind {header.get('kind')!r}")
    header_bytes = json.dumps(header, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    if isinstance(payload, np.ndarray):
        payload = np.ascontiguousarray(payload, dtype=PAYLOAD_DTYPE).tobytes()
    return PREFIX.pack(MAGIC, VERSION, len(header_bytes)) + header_bytes + payload


def decode_container(blob: bytes) -> tuple[dict[str, Any], bytes]:
    """EEGD v1 바이트열을 (헤더, payload)로 분리해요.

    Raises:
        FileFormatError: magic, version, 헤더가 잘못됐을 때
    """
    if len(blob) < PREFIX.size:
        raise FileFormatError("file is shorter than the EEGD prefix")
    magic, version, header_len = PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise FileFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FileFormatError(f"unsupported EEGD version {version}")
    end = PREFIX.size + header_len
    if end > len(blob):
        raise FileFormatError("header length exceeds file size")
    try:
        header = json.loads(blob[PREFIX.size : end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FileFormatError(f"invalid EEGD header: {e}") from e
    if not isinstance(header, dict) or header.get("kind") not in KINDS:
        raise FileFormatError("EEGD header must be an object with a known 'kind'")
    return header, blob[end:]


def _payload_array(payload: bytes, shape: list[int]) -> np.ndarray:
    expected = int(np.prod(shape, dtype=np.int64)) * PAYLOAD_DTYPE.itemsize
    if len(payload) != expected:
        raise FileFormatError(f"payload has {len(payload)} bytes, shape {shape} needs {expected}")
    return np.frombuffer(payload, dtype=PAYLOAD_DTYPE).reshape(shape).astype(np.float32)


def _read(path: str | Path, kind: str) -> tuple[dict[str, Any], bytes]:
    try:
        blob = Path(path).read_bytes()
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e}") from e
    header, payload = decode_container(blob)
    if header["kind"] != kind:
        raise FileFormatError(f"{path} holds kind {header['kind']!r}, expected {kind!r}")
    return header, payload


def _write(path: str | Path, blob: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)
    logger.debug("wrote %s (%d bytes)", path, len(blob))
    return path


def encode_recording(rec: RawRecording) -> bytes:
    header = {
        "kind": "raw",
        "fs": rec.fs,
        "channels": list(rec.channel_names),
        "shape": [rec.n_channels, rec.n_samples],
    }
    return encode_container(header, rec.data)


def encode_epochs(epochs: EpochSet) -> bytes:
    header = {
        "kind": "epochs",
        "fs": epochs.fs,
        "channels": list(epochs.channel_names),
        "shape": [len(epochs), epochs.n_channels, epochs.n_samples],
        "labels": [int(v) for v in epochs.labels],
        "class_names": list(epochs.class_names),
    }
    return encode_container(header, epochs.data)


def save_recording(rec: RawRecording, path: str | Path) -> Path:
    """연속 기록을 EEGD 파일로 저장해요."""
    return _write(path, encode_recording(rec))


def save_epochs(epochs: EpochSet, path: str | Path) -> Path:
    """EpochSet을 EEGD 파일로 저장해요."""
    return _write(path, encode_epochs(epochs))


def load_recording(path: str | Path) -> RawRecording:
    """EEGD 파일에서 연속 기록을 읽어요."""
    header, payload = _read(path, "raw")
    try:
        data = _payload_array(payload, header["shape"])
        return RawRecording(data=data, fs=float(header["fs"]), channel_names=tuple(header["channels"]))
    except KeyError as e:
        raise FileFormatError(f"raw header is missing {e}") from e


def load_epochs(path: str | Path) -> EpochSet:
    """EEGD 파일에서 EpochSet을 읽어요."""
    header, payload = _read(path, "epochs")
    try:
        data = _payload_array(payload, header["shape"])
        return EpochSet(
            data=data,
            labels=np.asarray(header["labels"], dtype=np.int64),
            class_names=tuple(header["class_names"]),
            fs=float(header["fs"]),
            channel_names=tuple(header["channels"]),
        )
    except KeyError as e:
        raise FileFormatError(f"epochs header is missing {e}") from e


def save_arrays(
    path: str | Path,
    kind: str,
    arrays: Mapping[str, np.ndarray],
    meta: Mapping[str, Any] | None = None,
) -> Path:
    """이름 붙은 배열 묶음을 모델 kind 컨테이너로 저장해요.

    Args:
        path (str | Path): 출력 경로
        kind (str): "csp", "svm", "lda", "params"
        arrays (Mapping[str, np.ndarray]): 이름 → 배열 (float32로 저장)
        meta (Mapping[str, Any] | None): 헤더에 넣을 스칼라 하이퍼파라미터

    Returns:
        Path: 저장된 경로
    """
    entries = []
    chunks = []
    offset = 0
    for name, value in arrays.items():
        chunk = np.ascontiguousarray(value, dtype=PAYLOAD_DTYPE)
        entries.append({"name": name, "shape": list(chunk.shape), "offset": offset})
        chunks.append(chunk.tobytes())
        offset += chunk.nbytes
    header = {"kind": kind, "arrays": entries, "meta": dict(meta or {})}
    return _write(path, encode_container(header, b"".join(chunks)))


def load_arrays(path: str | Path, kind: str) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    """모델 kind 컨테이너에서 (배열, meta)를 읽어요."""
    header, payload = _read(path, kind)
    arrays: dict[str, np.ndarray] = {}
    try:
        for entry in header["arrays"]:
            shape = [int(d) for d in entry["shape"]]
            start = int(entry["offset"])
            size = int(np.prod(shape, dtype=np.int64)) * PAYLOAD_DTYPE.itemsize
            if start < 0 or start + size > len(payload):
                raise FileFormatError(f"array {entry['name']!r} runs past the payload")
            arrays[entry["name"]] = _payload_array(payload[start : start + size], shape)
    except (KeyError, TypeError) as e:
        raise FileFormatError(f"invalid arrays table: {e}") from e
    return arrays, dict(header.get("meta", {}))
