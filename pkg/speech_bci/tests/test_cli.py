"""명령줄 인터페이스 테스트.

합성 → 전처리 → 평가 → 비교 흐름과 종료 코드를 확인해요.
"""

import json

import numpy as np
import pandas as pd
import pytest

from speech_bci.cli import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION, main
from speech_bci.config import get_settings
from speech_bci.data import load_epochs, save_epochs
from speech_bci.db import ResultRepository
from speech_bci.signal_core.recording import EpochSet


@pytest.fixture
def epochs_path(tmp_path):
    """8채널 합성 기록을 전처리한 에폭 파일 fixture."""
    config = tmp_path / "synth.json"
    config.write_text(json.dumps({"n_channels": 8}), encoding="utf-8")
    raw = tmp_path / "raw.eegd"
    epochs = tmp_path / "epochs.eegd"

    assert main(["synth", "--config", str(config), "--out", str(raw), "--trials-per-word", "8"]) == EXIT_OK
    assert (
        main(
            [
                "preprocess",
                "--in",
                str(raw),
                "--schedule",
                str(raw.with_suffix(".schedule.json")),
                "--out",
                str(epochs),
            ]
        )
        == EXIT_OK
    )
    return epochs


@pytest.fixture
def database_url(tmp_path, monkeypatch):
    """임시 SQLite 파일을 가리키도록 설정을 바꾸는 fixture."""
    url = f"sqlite:///{tmp_path / 'cli.db'}"
    monkeypatch.setenv("SPEECH_BCI_DATABASE_URL", url)
    get_settings.cache_clear()
    yield url
    get_settings.cache_clear()


class TestPipelineFlow:
    """합성부터 비교까지의 명령 흐름 테스트 클래스."""

    def test_synth_and_preprocess(self, epochs_path):
        """전처리 결과가 32 트라이얼 × 8채널 × 500샘플인지 테스트."""
        epochs = load_epochs(epochs_path)

        assert epochs.data.shape == (32, 8, 500)
        assert epochs.fs == 250.0
        assert np.bincount(epochs.labels).tolist() == [8, 8, 8, 8]

    def test_evaluate_is_reproducible(self, tmp_path, epochs_path):
        """같은 시드로 두 번 평가하면 CSV가 바이트 단위로 같은지 테스트."""
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["evaluate", "--pipeline", "csp_lda", "--data", str(epochs_path), "--folds", "4"]

        assert main([*args, "--out", str(first)]) == EXIT_OK
        assert main([*args, "--out", str(second)]) == EXIT_OK

        assert first.read_bytes() == second.read_bytes()
        frame = pd.read_csv(first)
        assert frame["fold"].tolist() == [1, 2, 3, 4]
        assert set(frame["pipeline"]) == {"csp_lda"}

    def test_compare_writes_reports(self, tmp_path, epochs_path):
        """두 파이프라인 결과를 비교하고 세 형식 리포트를 쓰는지 테스트."""
        results = []
        for pipeline in ("psd_svm", "csp_lda"):
            path = tmp_path / f"{pipeline}.csv"
            args = ["evaluate", "--pipeline", pipeline, "--data", str(epochs_path), "--folds", "4", "--out", str(path)]
            assert main(args) == EXIT_OK
            results.append(str(path))
        report, csv, xlsx = tmp_path / "report.md", tmp_path / "table.csv", tmp_path / "report.xlsx"

        code = main(
            ["compare", "--results", *results, "--report", str(report), "--csv", str(csv), "--xlsx", str(xlsx)]
        )

        assert code == EXIT_OK
        assert report.read_text(encoding="utf-8").startswith("| # of subjects | psd_svm | csp_lda |")
        assert csv.read_bytes().startswith(b"subject,psd_svm,csp_lda\r\nfold 1,")
        assert xlsx.exists()

    def test_train_saves_model_directory(self, tmp_path, epochs_path):
        """학습한 파이프라인을 pipeline.json과 함께 저장하는지 테스트."""
        out = tmp_path / "model"

        assert main(["train", "--pipeline", "csp_lda", "--data", str(epochs_path), "--out", str(out)]) == EXIT_OK

        assert (out / "pipeline.json").exists()

    def test_evaluate_records_results(self, tmp_path, epochs_path, database_url):
        """--record면 fold 결과를 설정된 DB에 저장하는지 테스트."""
        out = tmp_path / "recorded.csv"
        args = ["evaluate", "--pipeline", "csp_lda", "--data", str(epochs_path), "--folds", "4"]

        assert main([*args, "--out", str(out), "--record", "--run-id", "cli-run"]) == EXIT_OK

        repo = ResultRepository(database_url=database_url)
        frame = repo.get_run_as_df("cli-run")
        repo.close()
        assert len(frame) == 4
        assert frame["accuracy"].tolist() == pd.read_csv(out)["accuracy"].tolist()


class TestExitCodes:
    """종료 코드 테스트 클래스."""

    def test_fixture_checks_pass(self):
        """출판 표 검사가 모두 통과해 0을 돌려주는지 테스트."""
        assert main(["fixtures", "--check"]) == EXIT_OK

    def test_missing_input_is_validation_error(self, tmp_path):
        """없는 에폭 파일이면 1을 돌려주는지 테스트."""
        args = ["evaluate", "--pipeline", "csp_lda", "--data", str(tmp_path / "nope.eegd")]

        assert main([*args, "--out", str(tmp_path / "r.csv")]) == EXIT_VALIDATION

    def test_invalid_config_is_validation_error(self, tmp_path):
        """범위 밖 설정 JSON이면 1을 돌려주는지 테스트."""
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"separability": 3.0}), encoding="utf-8")

        code = main(["synth", "--config", str(config), "--out", str(tmp_path / "raw.eegd")])

        assert code == EXIT_VALIDATION

    def test_negative_seed_override_is_validation_error(self, tmp_path):
        """--seed가 음수면 설정 검증에 걸려 1을 돌려주는지 테스트."""
        out = tmp_path / "raw.eegd"

        code = main(["synth", "--seed", "-3", "--trials-per-word", "2", "--out", str(out)])

        assert code == EXIT_VALIDATION
        assert not out.exists()

    def test_negative_benchmark_seed_is_validation_error(self, tmp_path):
        """설정 파일 없이 음수 시드로 벤치마크하면 1을 돌려주는지 테스트."""
        args = ["benchmark", "--subjects", "1", "--pipelines", "csp_lda", "--seed", "-1"]

        assert main([*args, "--out", str(tmp_path / "bench")]) == EXIT_VALIDATION

    def test_non_finite_epochs_are_numeric_error(self, tmp_path, make_epochs):
        """NaN이 섞인 에폭으로 평가하면 2를 돌려주는지 테스트."""
        epochs = make_epochs(n_per_class=8)
        data = epochs.data.copy()
        data[:, 0, :] = np.nan
        path = save_epochs(EpochSet(data=data, labels=epochs.labels, fs=epochs.fs), tmp_path / "nan.eegd")

        code = main(["evaluate", "--pipeline", "csp_lda", "--data", str(path), "--folds", "4", "--out", str(tmp_path / "r.csv")])

        assert code == EXIT_NUMERIC
