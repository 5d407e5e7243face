"""pytest fixture 설정.

테스트에서 사용할 합성 에폭, 작은 네트워크 설정, 결과 표와 저장소를 제공해요.
"""

import numpy as np
import pytest
import torch

from speech_bci.adnn.config import AdnnConfig, AttentionConfig
from speech_bci.db import ResultRepository, init_db
from speech_bci.evaluation.fixtures import load_fixture_table
from speech_bci.signal_core.recording import EpochSet

# 클래스 k의 버스트: 6 + 4k Hz, 채널 2k, 2k+1
BURST_AMPLITUDE = 3.0
EPOCH_FS = 250.0
EPOCH_SAMPLES = 500


@pytest.fixture(autouse=True, scope="session")
def single_thread_torch():
    """torch 연산을 단일 스레드로 고정해요."""
    torch.set_num_threads(1)


def _make_epochs(
    n_per_class: int = 20,
    n_channels: int = 8,
    n_samples: int = EPOCH_SAMPLES,
    n_classes: int = 4,
    amplitude: float = BURST_AMPLITUDE,
    seed: int = 0,
) -> EpochSet:
    rng = np.random.default_rng(seed)
    t = np.arange(n_samples) / EPOCH_FS
    labels = np.repeat(np.arange(n_classes), n_per_class)
    data = rng.standard_normal((labels.size, n_channels, n_samples))
    for i, k in enumerate(labels):
        phase = rng.uniform(0, 2 * np.pi)
        burst = amplitude * np.sin(2 * np.pi * (6 + 4 * k) * t + phase)
        for ch in (2 * k, 2 * k + 1):
            data[i, ch % n_channels] += burst
    return EpochSet(data=data, labels=labels, fs=EPOCH_FS)


@pytest.fixture
def make_epochs():
    """클래스별 주파수·채널 버스트가 있는 EpochSet 팩토리 fixture."""
    return _make_epochs


@pytest.fixture
def separable_epochs():
    """클래스당 20개, 8채널 × 500샘플의 분리 가능한 EpochSet fixture."""
    return _make_epochs()


@pytest.fixture
def blobs():
    """4클래스 가우시안 블롭 (중심 eye(4, 10), σ=0.2) fixture."""
    rng = np.random.default_rng(7)
    centres = np.eye(4, 10)
    labels = np.repeat(np.arange(4), 25)
    features = centres[labels] + 0.2 * rng.standard_normal((labels.size, 10))
    return features, labels


@pytest.fixture
def tiny_config():
    """빠른 테스트용 작은 EEGNet/ADNN 설정 fixture."""
    return AdnnConfig(
        n_channels=4,
        n_samples=64,
        n_classes=4,
        f1=2,
        d=2,
        f2=4,
        temporal_kernel=8,
        separable_kernel=4,
        pool1=2,
        pool2=4,
        dropout=0.1,
        attention=AttentionConfig(heads=2, ffn_hidden=8),
    )


@pytest.fixture
def table_i():
    """기준 방법 비교 결과 표 fixture."""
    return load_fixture_table("table_i")


@pytest.fixture
def table_ii():
    """ablation 비교 결과 표 fixture."""
    return load_fixture_table("table_ii")


@pytest.fixture
def repository(tmp_path):
    """임시 SQLite 파일을 쓰는 ResultRepository fixture."""
    url = f"sqlite:///{tmp_path / 'results.db'}"
    init_db(url)
    repo = ResultRepository(database_url=url)
    yield repo
    repo.close()
