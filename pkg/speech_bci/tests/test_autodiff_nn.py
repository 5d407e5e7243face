"""자동 미분 엔진 테스트.

레이어별 역전파를 float64 유한 차분과 비교하고, 순전파 모드, 주의, 손실, Adam을 확인해요.
"""

import math

import pytest
import torch

from speech_bci.autodiff_nn import (
    ELU,
    AdamState,
    AvgPool,
    BatchNorm,
    Conv2d,
    DepthwiseConv2d,
    Dropout,
    FeedForward,
    Flatten,
    LayerNorm,
    Linear,
    MultiHeadAttention,
    PositionalEmbedding,
    Residual,
    SeparableConv2d,
    Softmax,
    Tokens,
    adam_step,
    backward,
    finite_difference_grad,
    forward,
    infer_shapes,
    init_params,
    mha_forward,
    relative_error,
    softmax_cross_entropy,
)
from speech_bci.errors import (
    InvalidParameterError,
    InvalidStateError,
    NonFiniteGradientError,
    ShapeError,
)

F64 = torch.float64
GRAD_TOLERANCE = 1e-4
ABS_FLOOR = 1e-8  # 해석적으로 0인 그래디언트(예: 주의 키 편향)의 차분 잡음 허용치

# (레이어, 배치를 뺀 입력 형상, 배치 크기)
LAYER_CASES = [
    (Conv2d(2, (1, 3)), (1, 3, 5), 2),
    (DepthwiseConv2d(2, (3, 1)), (2, 3, 5), 2),
    (SeparableConv2d(3, (1, 3)), (2, 1, 6), 2),
    (BatchNorm(), (2, 2, 3), 4),
    (BatchNorm(), (3,), 5),
    (ELU(), (5,), 3),
    (AvgPool((1, 2)), (1, 2, 4), 2),
    (Dropout(0.3), (6,), 3),
    (Flatten(), (2, 3), 2),
    (Linear(3), (4,), 3),
    (LayerNorm(), (3, 4), 2),
    (MultiHeadAttention(4, 2), (3, 4), 2),
    (FeedForward(5), (3, 4), 2),
    (Softmax(), (4,), 3),
    (Tokens(), (2, 1, 3), 2),
    (PositionalEmbedding(), (3, 4), 2),
    (Residual((LayerNorm(), Linear(4))), (3, 4), 2),
]
LAYER_IDS = [f"{type(layer).__name__}-{len(shape)}d" for layer, shape, _ in LAYER_CASES]


@pytest.fixture(autouse=True)
def seeded_torch():
    """전역 torch 난수 시드 고정 fixture."""
    torch.manual_seed(0)


def _assert_grad_close(analytic, numeric, name):
    err = relative_error(analytic, numeric)
    gap = (analytic.to(F64) - numeric).abs().max().item() if analytic.numel() else 0.0
    assert err <= GRAD_TOLERANCE or gap <= ABS_FLOOR, f"{name}: relative error {err:.2e}"


def _randn(shape, generator) -> torch.Tensor:
    return torch.randn(tuple(shape), generator=generator, dtype=F64)


def _check_gradients(layers, in_shape, batch, seed):
    generator = torch.Generator().manual_seed(seed)
    params, state = init_params(layers, in_shape, seed=seed, dtype=F64)
    params = {k: v + 0.1 * _randn(v.shape, generator) for k, v in params.items()}
    x = _randn((batch, *in_shape), generator)
    out, tape = forward(layers, params, x, mode="train", seed=seed, state=state)
    r = _randn(out.shape, generator)

    grads = backward(tape, r)

    def loss(p, inp) -> float:
        y, _ = forward(layers, p, inp, mode="train", seed=seed, state=state)
        return float((y * r).sum())

    numeric = finite_difference_grad(lambda p: loss(p, x), params)
    for name in params:
        _assert_grad_close(grads[name], numeric[name], name)
    numeric_x = finite_difference_grad(lambda d: loss(params, d["x"]), {"x": x})
    _assert_grad_close(grads["input"], numeric_x["x"], "input")


class TestGradients:
    """역전파 vs 유한 차분 테스트 클래스."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize(("layer", "in_shape", "batch"), LAYER_CASES, ids=LAYER_IDS)
    def test_layer_matches_finite_difference(self, layer, in_shape, batch, seed):
        """레이어마다 해석적 그래디언트가 float64 유한 차분과 맞는지 테스트."""
        _check_gradients([layer], in_shape, batch, seed)

    def test_stacked_layers(self):
        """여러 레이어를 쌓아도 그래디언트가 맞는지 테스트."""
        layers = [Conv2d(2, (1, 3)), BatchNorm(), ELU(), AvgPool((1, 2)), Flatten(), Linear(3), Softmax()]

        _check_gradients(layers, (1, 2, 6), 3, seed=4)

    def test_linear_half_squared_norm(self):
        """½‖Wx + b‖²의 그래디언트가 (y xᵀ, y)인지 테스트."""
        layers = [Linear(2)]
        params = {
            "0.weight": torch.tensor([[1.0, 2.0, 0.0], [0.0, -1.0, 3.0]], dtype=F64),
            "0.bias": torch.tensor([0.5, -0.5], dtype=F64),
        }
        x = torch.tensor([[1.0, -1.0, 2.0]], dtype=F64)
        out, tape = forward(layers, params, x)

        grads = backward(tape, out.detach())

        y = out.detach()
        assert torch.allclose(grads["0.weight"], y.T @ x, atol=1e-6)
        assert torch.allclose(grads["0.bias"], y.sum(dim=0), atol=1e-6)


class TestForward:
    """순전파 모드와 기록 테스트 클래스."""

    def test_dropout_zero_is_identity(self):
        """p=0 드롭아웃은 학습 모드에서도 항등인지 테스트."""
        x = torch.randn(4, 6, dtype=F64)

        out, _ = forward([Dropout(0.0)], {}, x, mode="train", seed=3)

        assert torch.equal(out, x)

    def test_dropout_masks_are_seeded(self):
        """같은 시드면 같은 마스크, 다른 시드면 다른 마스크인지 테스트."""
        x = torch.ones(8, 50, dtype=F64)

        a, _ = forward([Dropout(0.5)], {}, x, seed=1)
        b, _ = forward([Dropout(0.5)], {}, x, seed=1)
        c, _ = forward([Dropout(0.5)], {}, x, seed=2)

        assert torch.equal(a, b)
        assert not torch.equal(a, c)
        assert set(a.unique().tolist()) <= {0.0, 2.0}

    def test_dropout_is_off_in_eval(self):
        """평가 모드에서는 드롭아웃이 꺼지는지 테스트."""
        x = torch.randn(4, 6, dtype=F64)

        out, _ = forward([Dropout(0.5)], {}, x, mode="eval")

        assert torch.equal(out, x)

    def test_batchnorm_normalizes_batch(self):
        """학습 모드 BatchNorm 출력이 평균 0, 분산 1인지 테스트."""
        layers = [BatchNorm()]
        params, state = init_params(layers, (3,), dtype=F64)
        x = 3.0 * torch.randn(64, 3, dtype=F64) + 5.0

        out, tape = forward(layers, params, x, state=state)

        assert torch.allclose(out.mean(dim=0), torch.zeros(3, dtype=F64), atol=1e-3)
        assert torch.allclose(out.var(dim=0, unbiased=False), torch.ones(3, dtype=F64), atol=1e-3)
        assert set(tape.new_state) == {"0.running_mean", "0.running_var"}

    def test_batchnorm_eval_matches_train_with_batch_stats(self):
        """이동 통계가 배치 통계와 같으면 평가 출력이 학습 출력과 같은지 테스트."""
        layers = [BatchNorm()]
        params, _ = init_params(layers, (2, 1, 5), dtype=F64)
        x = torch.randn(6, 2, 1, 5, dtype=F64)
        state = {
            "0.running_mean": x.mean(dim=(0, 2, 3)),
            "0.running_var": x.var(dim=(0, 2, 3), unbiased=False),
        }

        train_out, _ = forward(layers, params, x, mode="train", state=state)
        eval_out, _ = forward(layers, params, x, mode="eval", state=state)

        assert torch.allclose(train_out.detach(), eval_out, atol=1e-5)

    def test_eval_without_running_stats_raises(self):
        """평가 모드에 이동 통계가 없으면 예외인지 테스트."""
        layers = [BatchNorm()]
        params, _ = init_params(layers, (3,))

        with pytest.raises(InvalidStateError):
            forward(layers, params, torch.randn(4, 3), mode="eval", state={})

    def test_elu_values(self):
        """ELU(0) = 0, ELU(-50) ≈ -α인지 테스트."""
        out, _ = forward([ELU(alpha=1.0)], {}, torch.tensor([[0.0, -50.0, 2.0]], dtype=F64), mode="eval")

        assert out[0, 0].item() == 0.0
        assert out[0, 1].item() == pytest.approx(-1.0, abs=1e-6)
        assert out[0, 2].item() == 2.0

    def test_softmax_rows_sum_to_one(self):
        """Softmax 행 합이 1인지 테스트."""
        out, _ = forward([Softmax()], {}, torch.randn(5, 4, dtype=F64), mode="eval")

        assert torch.allclose(out.sum(dim=1), torch.ones(5, dtype=F64))

    def test_layernorm_standardizes_tokens(self):
        """LayerNorm 출력 토큰이 평균 0, 분산 1인지 테스트."""
        layers = [LayerNorm()]
        params, _ = init_params(layers, (3, 8), dtype=F64)

        out, _ = forward(layers, params, 4.0 * torch.randn(2, 3, 8, dtype=F64) + 1.0, mode="eval")

        assert torch.allclose(out.mean(dim=-1), torch.zeros(2, 3, dtype=F64), atol=1e-5)
        assert torch.allclose(out.var(dim=-1, unbiased=False), torch.ones(2, 3, dtype=F64), atol=1e-4)

    def test_inputs_are_not_mutated(self):
        """순전파가 입력과 파라미터를 바꾸지 않는지 테스트."""
        layers = [Linear(3), Softmax()]
        params, _ = init_params(layers, (4,))
        before = {k: v.clone() for k, v in params.items()}
        x = torch.randn(2, 4)
        x_before = x.clone()

        _, tape = forward(layers, params, x)
        backward(tape, torch.ones(2, 3))

        assert torch.equal(x, x_before)
        assert all(torch.equal(params[k], before[k]) for k in params)

    def test_param_shape_mismatch_names_layer(self):
        """파라미터 형상이 맞지 않으면 레이어 인덱스가 담긴 예외인지 테스트."""
        layers = [Linear(3)]
        params, _ = init_params(layers, (4,))

        with pytest.raises(ShapeError) as exc_info:
            forward(layers, params, torch.randn(2, 5))

        assert exc_info.value.layer_index == 0

    def test_infer_shapes_names_layer(self):
        """형상 추론이 실패한 레이어 인덱스를 알려주는지 테스트."""
        with pytest.raises(ShapeError) as exc_info:
            infer_shapes([Linear(3), Tokens()], (4,))

        assert exc_info.value.layer_index == 1

    def test_unknown_mode_rejected(self):
        """알 수 없는 모드를 거부하는지 테스트."""
        with pytest.raises(InvalidParameterError):
            forward([Softmax()], {}, torch.randn(2, 3), mode="infer")


class TestBackward:
    """역전파 기록 사용 규칙 테스트 클래스."""

    def test_tape_is_single_use(self):
        """기록을 두 번 역전파하면 예외인지 테스트."""
        out, tape = forward([Softmax()], {}, torch.randn(2, 3))
        backward(tape, torch.ones_like(out))

        with pytest.raises(InvalidStateError):
            backward(tape, torch.ones_like(out))

    def test_eval_tape_rejected(self):
        """평가 모드 기록의 역전파를 거부하는지 테스트."""
        out, tape = forward([Softmax()], {}, torch.randn(2, 3), mode="eval")

        with pytest.raises(InvalidStateError):
            backward(tape, torch.ones_like(out))

    def test_backward_from_logits(self):
        """logits에서 시작한 역전파가 softmax 교차 엔트로피 그래디언트를 쓰는지 테스트."""
        layers = [Linear(3), Softmax()]
        params, _ = init_params(layers, (4,), dtype=F64)
        x = torch.randn(5, 4, dtype=F64)
        targets = torch.tensor([0, 1, 2, 0, 1])
        _, tape = forward(layers, params, x)

        _, grad = softmax_cross_entropy(tape.logits, targets)
        grads = backward(tape, grad, at="logits")

        def loss(p) -> float:
            _, t = forward(layers, p, x)
            return softmax_cross_entropy(t.logits, targets)[0]

        numeric = finite_difference_grad(loss, params)
        assert relative_error(grads["0.weight"], numeric["0.weight"]) <= GRAD_TOLERANCE


class TestAttention:
    """다중 헤드 주의 테스트 클래스."""

    def test_single_token_identity_weights(self):
        """토큰 하나에 항등 가중치면 출력이 입력과 같은지 테스트."""
        eye = torch.eye(4, dtype=F64)
        weights = {"wq": eye, "wk": eye, "wv": eye, "wo": eye}
        x = torch.randn(1, 4, dtype=F64)

        out = mha_forward(x, weights, heads=2)

        assert torch.allclose(out, x)

    def test_zero_queries_average_values(self):
        """Wq = 0이면 모든 토큰이 값의 평균을 받는지 테스트."""
        eye = torch.eye(4, dtype=F64)
        weights = {"wq": torch.zeros(4, 4, dtype=F64), "wk": eye, "wv": eye, "wo": eye}
        x = torch.randn(5, 4, dtype=F64)

        out, attn = mha_forward(x, weights, heads=2, return_weights=True)

        assert torch.allclose(out, x.mean(dim=0, keepdim=True).expand(5, 4))
        assert torch.allclose(attn.sum(dim=-1), torch.ones(1, 2, 5, dtype=F64))

    def test_permutation_equivariant(self):
        """토큰 순서를 바꾸면 출력도 같은 순서로 바뀌는지 테스트."""
        gen = torch.Generator().manual_seed(3)
        weights = {f"w{n}": torch.randn(8, 8, generator=gen, dtype=F64) / 3 for n in "qkvo"}
        weights.update({f"b{n}": torch.randn(8, generator=gen, dtype=F64) for n in "qkvo"})
        x = torch.randn(6, 8, generator=gen, dtype=F64)
        perm = torch.randperm(6, generator=gen)

        out = mha_forward(x, weights, heads=4)
        permuted = mha_forward(x[perm], weights, heads=4)

        assert torch.allclose(permuted, out[perm], atol=1e-12)

    def test_indivisible_heads_rejected(self):
        """d_model이 헤드 수로 나눠지지 않으면 거부하는지 테스트."""
        eye = torch.eye(5)
        weights = {"wq": eye, "wk": eye, "wv": eye, "wo": eye}

        with pytest.raises(InvalidParameterError):
            mha_forward(torch.randn(3, 5), weights, heads=2)


class TestLossAndOptimizer:
    """손실과 Adam 테스트 클래스."""

    def test_cross_entropy_gradient(self):
        """그래디언트가 (softmax − onehot) / batch인지 테스트."""
        logits = torch.tensor([[1.0, 2.0, 0.5], [0.0, 0.0, 0.0]], dtype=F64)
        targets = torch.tensor([1, 2])

        loss, grad = softmax_cross_entropy(logits, targets)

        probs = torch.softmax(logits, dim=1)
        onehot = torch.nn.functional.one_hot(targets, 3).to(F64)
        expected_loss = -(torch.log(probs[0, 1]) + torch.log(probs[1, 2])).item() / 2
        assert loss == pytest.approx(expected_loss)
        assert torch.allclose(grad, (probs - onehot) / 2)

    def test_uniform_logits_give_log_k(self):
        """logits가 같으면 손실이 ln K인지 테스트."""
        loss, _ = softmax_cross_entropy(torch.zeros(3, 4), torch.tensor([0, 1, 3]))

        assert loss == pytest.approx(math.log(4), rel=1e-6)

    def test_first_adam_step_moves_by_lr(self):
        """첫 스텝은 파라미터를 lr × sign(g)만큼 옮기는지 테스트."""
        params = {"w": torch.tensor([1.0, -2.0, 0.5], dtype=F64)}
        grads = {"w": torch.tensor([0.3, -4.0, 1e-3], dtype=F64)}

        new_params, state = adam_step(params, grads, lr=0.01)

        assert state.t == 1
        assert torch.allclose(new_params["w"] - params["w"], -0.01 * torch.sign(grads["w"]), atol=1e-6)

    def test_adam_reaches_bowl_minimum(self):
        """½‖p − c‖²에서 500 스텝 안에 최솟값 c에 도달하는지 테스트."""
        target = torch.tensor([3.0, -1.5, 0.25, 2.0], dtype=F64)
        params = {"p": torch.zeros(4, dtype=F64)}
        state = AdamState()

        for _ in range(500):
            params, state = adam_step(params, {"p": params["p"] - target}, state, lr=0.05)

        assert state.t == 500
        assert torch.allclose(params["p"], target, atol=1e-2)

    def test_zero_gradient_keeps_params(self):
        """그래디언트가 0이면 여러 스텝 뒤에도 파라미터가 그대로인지 테스트."""
        params = {"w": torch.tensor([[1.0, -2.0], [0.5, 4.0]], dtype=F64)}
        state = None

        updated = params
        for _ in range(10):
            updated, state = adam_step(updated, {"w": torch.zeros(2, 2, dtype=F64)}, state, lr=0.1)

        assert torch.equal(updated["w"], params["w"])

    def test_missing_gradient_keeps_param(self):
        """그래디언트가 없는 파라미터는 그대로인지 테스트."""
        params = {"a": torch.ones(2), "b": torch.ones(2)}

        new_params, _ = adam_step(params, {"a": torch.ones(2)}, AdamState())

        assert torch.equal(new_params["b"], params["b"])
        assert not torch.equal(new_params["a"], params["a"])

    def test_non_finite_gradient_names_parameter(self):
        """비유한 그래디언트면 파라미터 이름이 담긴 예외인지 테스트."""
        params = {"a": torch.ones(2), "b": torch.ones(2)}
        grads = {"a": torch.ones(2), "b": torch.tensor([1.0, float("nan")])}

        with pytest.raises(NonFiniteGradientError) as exc_info:
            adam_step(params, grads)

        assert exc_info.value.parameter == "b"

    def test_finite_difference_of_quadratic(self):
        """½‖p‖²의 유한 차분 그래디언트가 p인지 테스트."""
        params = {"p": torch.tensor([1.0, -2.0, 3.0], dtype=F64)}

        numeric = finite_difference_grad(lambda p: 0.5 * float((p["p"] ** 2).sum()), params)

        assert torch.allclose(numeric["p"], params["p"], atol=1e-8)
