"""얕은 분류기 테스트.

one-vs-rest 선형 SVM과 LDA의 학습, 결정 경계, 동점 처리, 입력 검증을 확인해요.
"""

import numpy as np
import pytest

from speech_bci.errors import DegenerateDataError, InsufficientDataError, InvalidLabelError, InvalidParameterError, ShapeError
from speech_bci.shallow_models import (
    LdaClassifier,
    LdaModel,
    LinearSvmClassifier,
    LinearSvmModel,
    lda_fit,
    lda_predict,
    svm_fit,
    svm_predict,
)
from speech_bci.shallow_models.svm import optimal_bias


def _test_blobs(seed: int = 11) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(4), 10)
    return np.eye(4, 10)[labels] + 0.2 * rng.standard_normal((labels.size, 10)), labels


class TestLinearSvm:
    """선형 SVM 테스트 클래스."""

    def test_separates_blobs(self, blobs):
        """가우시안 블롭을 95% 이상 맞추는지 테스트."""
        features, labels = blobs
        test_x, test_y = _test_blobs()

        model = svm_fit(features, labels, C=1.0, epochs=50)

        assert np.mean(svm_predict(model, test_x) == test_y) >= 0.95

    def test_symmetric_data_has_zero_bias(self):
        """원점 대칭 데이터면 편향이 0 근처인지 테스트."""
        x = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 1])

        model = svm_fit(x, y, epochs=100)

        assert np.all(np.abs(model.biases) <= 1e-3)
        assert svm_predict(model, np.array([[-3.0], [3.0]])).tolist() == [0, 1]

    def test_deterministic_for_seed(self, blobs):
        """같은 입력과 시드면 같은 모델인지 테스트."""
        features, labels = blobs

        first = svm_fit(features, labels, epochs=10, seed=3)
        second = svm_fit(features, labels, epochs=10, seed=3)

        assert np.array_equal(first.weights, second.weights)
        assert np.array_equal(first.biases, second.biases)

    def test_tie_goes_to_lowest_class(self):
        """결정 값이 같으면 낮은 클래스 인덱스를 고르는지 테스트."""
        model = LinearSvmModel(
            weights=np.array([[0.0], [1.0], [1.0]]),
            biases=np.array([-5.0, 0.0, 0.0]),
            mean=np.zeros(1),
            std=np.ones(1),
        )

        assert svm_predict(model, np.array([[1.0]])).tolist() == [1]

    def test_optimal_bias_minimizes_hinge(self):
        """편향 재계산이 hinge 손실 합을 최소화하는지 테스트."""
        scores = np.array([-1.5, -0.2, 0.3, 2.0])
        y = np.array([-1.0, 1.0, -1.0, 1.0])

        b = optimal_bias(scores, y)

        def loss(bias: float) -> float:
            return float(np.maximum(0.0, 1.0 - y * (scores + bias)).sum())

        grid = np.linspace(-3, 3, 601)
        assert loss(b) <= min(loss(v) for v in grid) + 1e-9

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_optimal_bias_matches_exhaustive_search(self, seed):
        """모든 꺾이는 점을 직접 평가한 최소 구간 중점과 같은지 테스트."""
        rng = np.random.default_rng(seed)
        scores = np.round(rng.normal(size=40), 1)
        y = rng.choice([-1.0, 1.0], size=40)

        breakpoints = y - scores
        objective = np.array([np.maximum(0.0, 1.0 - y * (scores + b)).sum() for b in breakpoints])
        minimizers = breakpoints[objective <= objective.min() + 1e-9]
        expected = 0.5 * (minimizers.min() + minimizers.max())

        assert optimal_bias(scores, y) == pytest.approx(expected, abs=1e-9)

    def test_optimal_bias_flat_minimum_midpoint(self):
        """분리 가능한 두 점이면 평평한 최소 구간의 중점을 고르는지 테스트."""
        assert optimal_bias(np.array([-3.0, 3.0]), np.array([-1.0, 1.0])) == pytest.approx(0.0)

    def test_optimal_bias_handles_large_inputs(self):
        """샘플이 많아도 메모리 폭증 없이 최적 편향을 구하는지 테스트."""
        rng = np.random.default_rng(5)
        y = rng.choice([-1.0, 1.0], size=60_000)
        scores = y * 0.5 + rng.normal(size=60_000)

        b = optimal_bias(scores, y)

        def loss(bias: float) -> float:
            return float(np.maximum(0.0, 1.0 - y * (scores + bias)).sum())

        assert loss(b) <= min(loss(b - 1e-3), loss(b + 1e-3)) + 1e-6

    def test_single_class_rejected(self):
        """클래스가 하나뿐이면 거부하는지 테스트."""
        with pytest.raises(InvalidLabelError):
            svm_fit(np.ones((4, 2)), np.zeros(4))

    def test_invalid_parameters_rejected(self, blobs):
        """C ≤ 0, epochs < 1, 비유한 특징을 거부하는지 테스트."""
        features, labels = blobs
        bad = features.copy()
        bad[0, 0] = np.inf

        with pytest.raises(InvalidParameterError):
            svm_fit(features, labels, C=0.0)
        with pytest.raises(InvalidParameterError):
            svm_fit(features, labels, epochs=0)
        with pytest.raises(InvalidParameterError):
            svm_fit(bad, labels)

    def test_feature_dimension_mismatch(self, blobs):
        """특징 차원이 다르면 거부하는지 테스트."""
        features, labels = blobs
        model = svm_fit(features, labels, epochs=5)

        with pytest.raises(ShapeError):
            model.decision_function(np.ones((1, 3)))

    def test_classifier_keeps_label_values(self, blobs):
        """sklearn 래퍼가 원래 라벨 값을 돌려주는지 테스트."""
        features, labels = blobs

        clf = LinearSvmClassifier(epochs=20).fit(features, labels + 5)

        assert clf.classes_.tolist() == [5, 6, 7, 8]
        assert set(clf.predict(features).tolist()) <= {5, 6, 7, 8}


class TestLda:
    """LDA 테스트 클래스."""

    def test_separates_blobs(self, blobs):
        """가우시안 블롭을 95% 이상 맞추는지 테스트."""
        features, labels = blobs
        test_x, test_y = _test_blobs()

        model = lda_fit(features, labels)

        assert np.mean(lda_predict(model, test_x) == test_y) >= 0.95

    def test_symmetric_boundary_at_origin(self):
        """평균이 ±1이고 사전 확률이 같으면 경계가 0인지 테스트."""
        z = np.array([-0.5, 0.0, 0.5])
        x = np.concatenate([-1.0 + z, 1.0 + z])[:, None]
        y = np.repeat([0, 1], 3)

        model = lda_fit(x, y)
        scores = model.discriminant(np.array([[0.0], [1.0]]))
        f = scores[:, 1] - scores[:, 0]

        boundary = -f[0] / (f[1] - f[0])
        assert boundary == pytest.approx(0.0, abs=1e-9)
        assert model.priors.tolist() == [0.5, 0.5]

    def test_duplicated_samples_give_same_model(self, blobs):
        """모든 샘플을 두 번씩 넣어도 모델과 예측이 같은지 테스트."""
        features, labels = blobs
        test_x, _ = _test_blobs()

        model = lda_fit(features, labels)
        doubled = lda_fit(np.concatenate([features, features]), np.concatenate([labels, labels]))

        np.testing.assert_allclose(doubled.means, model.means, atol=1e-12)
        np.testing.assert_allclose(doubled.priors, model.priors)
        np.testing.assert_allclose(doubled.precision, model.precision, rtol=1e-9)
        assert lda_predict(doubled, test_x).tolist() == lda_predict(model, test_x).tolist()

    def test_tie_goes_to_lowest_class(self):
        """판별 점수가 같으면 낮은 클래스 인덱스를 고르는지 테스트."""
        model = LdaModel(
            means=np.array([[-1.0], [1.0]]),
            precision=np.array([[1.0]]),
            priors=np.array([0.5, 0.5]),
        )

        assert lda_predict(model, np.array([[0.0]])).tolist() == [0]

    def test_priors_must_sum_to_one(self):
        """사전 확률 합이 1이 아니면 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            LdaModel(means=np.zeros((2, 1)), precision=np.eye(1), priors=np.array([0.5, 0.6]))

    def test_needs_two_samples_per_class(self):
        """샘플이 1개인 클래스를 거부하는지 테스트."""
        with pytest.raises(InsufficientDataError):
            lda_fit(np.array([[0.0], [1.0], [2.0]]), np.array([0, 0, 1]))
        with pytest.raises(InsufficientDataError):
            lda_fit(np.ones((4, 1)), np.zeros(4))

    def test_singular_covariance_without_ridge(self):
        """ridge 없이 상수 특징이 있으면 퇴화 데이터로 보는지 테스트."""
        x = np.array([[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]])
        y = np.array([0, 0, 1, 1])

        with pytest.raises(DegenerateDataError):
            lda_fit(x, y, ridge=0.0)

    def test_ridge_handles_constant_feature(self):
        """ridge가 있으면 상수 특징이 있어도 학습되는지 테스트."""
        x = np.array([[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]])
        y = np.array([0, 0, 1, 1])

        model = lda_fit(x, y, ridge=1e-3)

        assert lda_predict(model, x).tolist() == [0, 0, 1, 1]

    def test_classifier_wrapper(self, blobs):
        """sklearn 래퍼가 판별 점수 형상을 맞추는지 테스트."""
        features, labels = blobs

        clf = LdaClassifier().fit(features, labels)

        assert clf.decision_function(features).shape == (len(labels), 4)
