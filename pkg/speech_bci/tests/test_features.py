"""특징 추출 테스트.

Welch PSD 대역 전력과 one-vs-rest CSP 필터의 수치적 성질을 확인해요.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy import signal

from speech_bci.errors import DegenerateDataError, InsufficientDataError, InvalidParameterError, ShapeError
from speech_bci.features import (
    BandDefinition,
    BandPowerExtractor,
    CspTransformer,
    band_powers,
    csp_fit,
    csp_transform,
    fit_csp_arrays,
    mean_covariance,
    welch_psd,
)
from speech_bci.features.spectral import psd_frequencies

FS = 250.0


def _tone(freq_hz: float, amplitude: float = 1.0, n: int = 500) -> np.ndarray:
    t = np.arange(n) / FS
    return amplitude * np.sin(2 * np.pi * freq_hz * t)


def _swapped_class_trials() -> tuple[np.ndarray, np.ndarray]:
    """클래스 0: [√2·sin, cos], 클래스 1: [cos, √2·sin] (정수 주기, 직교)."""
    t = np.arange(500) / 500
    s = np.sqrt(2) * np.sin(2 * np.pi * 5 * t)
    c = np.cos(2 * np.pi * 5 * t)
    a = np.stack([s, c])
    b = np.stack([c, s])
    return np.stack([a, a, b, b]), np.array([0, 0, 1, 1])


class TestWelch:
    """Welch PSD 테스트 클래스."""

    def test_shape(self):
        """1초 창이면 [채널 × 126] PSD인지 테스트."""
        epoch = np.random.default_rng(0).standard_normal((3, 500))

        psd = welch_psd(epoch, FS)

        assert psd.shape == (3, 126)
        assert np.all(psd >= 0)

    def test_tone_power_and_peak(self):
        """10 Hz 사인파의 PSD 적분이 A²/2이고 정점이 10 Hz인지 테스트."""
        epoch = _tone(10.0, amplitude=2.0)[None, :]

        psd = welch_psd(epoch, FS)
        freqs = psd_frequencies(psd.shape[-1], FS)

        df = freqs[1] - freqs[0]
        assert psd.sum() * df == pytest.approx(2.0, rel=0.05)
        assert freqs[np.argmax(psd[0])] == pytest.approx(10.0)

    def test_white_noise_parseval(self):
        """백색 잡음 PSD의 적분이 표본 분산과 5% 안에서 같은지 테스트."""
        epoch = np.random.default_rng(11).standard_normal((4, 5000))

        psd = welch_psd(epoch, FS)
        freqs = psd_frequencies(psd.shape[-1], FS)

        df = freqs[1] - freqs[0]
        assert np.allclose(psd.sum(axis=1) * df, epoch.var(axis=1), rtol=0.05)

    def test_odd_window_frequencies(self):
        """홀수 창(fs = 251)의 주파수 축이 scipy Welch와 같은지 테스트."""
        fs = 251.0
        epoch = np.random.default_rng(2).standard_normal((1, 502))
        expected, _ = signal.welch(epoch, fs=fs, nperseg=251)

        psd = welch_psd(epoch, fs)
        freqs = psd_frequencies(psd.shape[-1], fs, nperseg=251)

        assert np.allclose(freqs, expected)
        assert freqs[1] == pytest.approx(1.0)

    def test_window_bin_mismatch_rejected(self):
        """빈 개수와 맞지 않는 창 길이를 거부하는지 테스트."""
        with pytest.raises(ShapeError):
            psd_frequencies(126, FS, nperseg=300)

    def test_short_window_rejected(self):
        """8샘플 미만 창을 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            welch_psd(np.zeros((1, 500)), FS, win_s=0.02)

    def test_bad_overlap_rejected(self):
        """중첩 비율 1을 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            welch_psd(np.zeros((1, 500)), FS, overlap=1.0)

    def test_window_longer_than_epoch_rejected(self):
        """에폭보다 긴 창을 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            welch_psd(np.zeros((1, 100)), FS, win_s=1.0)


class TestBandPowers:
    """대역 전력 테스트 클래스."""

    def test_channel_major_layout(self):
        """출력이 채널 우선 순서로 펼쳐지는지 테스트."""
        psd = np.array([np.full(126, 1.0), np.full(126, 2.0)])

        powers = band_powers(psd, FS)

        assert powers.tolist() == [1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0]

    def test_band_above_nyquist_rejected(self):
        """Nyquist를 넘는 대역을 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            band_powers(np.ones((1, 126)), FS, bands=(BandDefinition("gamma", 30.0, 200.0),))

    def test_band_definition_validated(self):
        """lo ≥ hi 대역 정의를 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            BandDefinition("bad", 8.0, 4.0)

    @settings(max_examples=30, deadline=None)
    @given(scale=st.floats(min_value=0.01, max_value=100.0))
    def test_linear_in_psd(self, scale):
        """대역 전력이 PSD에 선형인지 테스트."""
        psd = np.abs(np.random.default_rng(1).standard_normal((2, 126)))

        assert np.allclose(band_powers(scale * psd, FS), scale * band_powers(psd, FS), rtol=1e-12)

    def test_extractor_log_power(self, separable_epochs):
        """추출기가 [trials × 채널·대역] log10 전력을 내는지 테스트."""
        extractor = BandPowerExtractor(fs=FS, log_power=True)

        features = extractor.fit(separable_epochs.data, separable_epochs.labels).transform(separable_epochs.data)
        raw = BandPowerExtractor(fs=FS).transform(separable_epochs.data[:1])

        assert features.shape == (len(separable_epochs), separable_epochs.n_channels * 4)
        assert np.allclose(features[0], np.log10(raw[0]))


class TestCsp:
    """CSP 테스트 클래스."""

    def test_swapped_variances_give_analytic_filters(self):
        """분산이 뒤바뀐 두 클래스에서 첫 필터가 채널 0, 고유값 2/3인지 테스트."""
        data, labels = _swapped_class_trials()

        model = fit_csp_arrays(data, labels, n_classes=2, filters_per_class=2)

        assert np.allclose(np.abs(model.filters[0]), [1.0, 0.0], atol=1e-6)
        assert np.allclose(np.abs(model.filters[2]), [0.0, 1.0], atol=1e-6)
        assert model.eigenvalues[0] == pytest.approx(2 / 3, abs=0.01)
        assert model.eigenvalues[1] == pytest.approx(1 / 3, abs=0.01)

    def test_same_distribution_eigenvalues_near_half(self):
        """두 클래스 분포가 같으면 고유값이 0.5 근처인지 테스트."""
        rng = np.random.default_rng(3)
        data = rng.standard_normal((100, 8, 500))
        labels = np.repeat([0, 1], 50)

        model = fit_csp_arrays(data, labels, n_classes=2, filters_per_class=4)

        assert np.all(np.abs(model.eigenvalues - 0.5) < 0.1)

    def test_filters_jointly_diagonalize(self, separable_epochs):
        """필터가 Σc와 Σc + Σrest를 함께 대각화하는지 테스트."""
        model = csp_fit(separable_epochs, filters_per_class=4)
        data, labels = separable_epochs.data, separable_epochs.labels

        for c in range(separable_epochs.n_classes):
            w = model.filters[model.class_range(c)]
            sigma_c = mean_covariance(data[labels == c], model.ridge)
            sigma_rest = mean_covariance(data[labels != c], model.ridge)
            for matrix in (sigma_c, sigma_c + sigma_rest):
                m = w @ matrix @ w.T
                off = m - np.diag(np.diag(m))
                assert np.abs(off).max() <= 1e-8 * np.abs(np.diag(m)).max()
            assert np.all(np.diff(model.eigenvalues[model.class_range(c)]) <= 0)

    def test_filter_rows_are_unit_norm(self, separable_epochs):
        """필터 행이 단위 길이인지 테스트."""
        model = csp_fit(separable_epochs)

        assert model.filters.shape == (16, 8)
        assert np.allclose(np.linalg.norm(model.filters, axis=1), 1.0)

    def test_transform_is_normalized_log_variance(self, separable_epochs):
        """특징의 exp 합이 1인지 테스트."""
        model = csp_fit(separable_epochs)

        features = csp_transform(model, separable_epochs.data[0])

        assert features.shape == (16,)
        assert np.exp(features).sum() == pytest.approx(1.0)

    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(scale=st.floats(min_value=1e-3, max_value=1e3))
    def test_transform_scale_invariant(self, separable_epochs, scale):
        """입력을 상수배해도 CSP 특징이 변하지 않는지 테스트."""
        model = csp_fit(separable_epochs)
        epoch = separable_epochs.data[5]

        assert np.allclose(csp_transform(model, scale * epoch), csp_transform(model, epoch), atol=1e-9)

    def test_transform_channel_mismatch(self, separable_epochs):
        """채널 수가 다른 에폭을 거부하는지 테스트."""
        model = csp_fit(separable_epochs)

        with pytest.raises(ShapeError):
            csp_transform(model, np.ones((3, 500)))

    def test_zero_variance_epoch(self, separable_epochs):
        """분산이 0인 에폭을 퇴화 데이터로 보는지 테스트."""
        model = csp_fit(separable_epochs)

        with pytest.raises(DegenerateDataError):
            csp_transform(model, np.zeros((8, 500)))

    def test_needs_two_trials_per_class(self):
        """트라이얼이 1개인 클래스를 거부하는지 테스트."""
        data = np.random.default_rng(0).standard_normal((3, 4, 100))

        with pytest.raises(InsufficientDataError):
            fit_csp_arrays(data, np.array([0, 0, 1]), n_classes=2, filters_per_class=2)

    def test_filters_per_class_validated(self, separable_epochs):
        """홀수이거나 채널 수보다 큰 필터 수를 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            csp_fit(separable_epochs, filters_per_class=3)
        with pytest.raises(InvalidParameterError):
            csp_fit(separable_epochs, filters_per_class=10)

    def test_transformer_encodes_labels(self, separable_epochs):
        """sklearn 변환기가 임의 라벨 값을 받는지 테스트."""
        transformer = CspTransformer(filters_per_class=2)

        features = transformer.fit_transform(separable_epochs.data, separable_epochs.labels + 10)

        assert transformer.classes_.tolist() == [10, 11, 12, 13]
        assert features.shape == (len(separable_epochs), 8)
