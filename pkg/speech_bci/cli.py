"""
speech-bci 명령줄 도구

synth → preprocess → train / evaluate → compare 흐름과
fixtures(출판 표 검사), benchmark(전체 프로토콜) 서브커맨드를 제공해요.
종료 코드: 0 성공, 1 검증 오류, 2 수치 오류.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd
import pydantic
import torch
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from speech_bci.adnn.config import load_config, update_config
from speech_bci.adnn.training import TrainHyper
from speech_bci.config import get_settings
from speech_bci.data.eegd import load_epochs, load_recording, save_epochs, save_recording
from speech_bci.db import ResultRepository, init_db
from speech_bci.errors import FileFormatError, NumericError, ValidationError
from speech_bci.evaluation.cross_validation import (
    DEFAULT_FOLDS,
    cross_validate,
    read_results_csv,
    results_frame,
    write_results_csv,
)
from speech_bci.evaluation.fixtures import all_passed, check_fixtures
from speech_bci.evaluation.pipelines import PIPELINES, get_pipeline
from speech_bci.evaluation.service import BenchmarkService
from speech_bci.evaluation.tables import ResultTable, TestReport, compare_methods, results_to_table
from speech_bci.report.builder import build_report
from speech_bci.signal_core.preprocess import PreprocessConfig, preprocess
from speech_bci.synthgen.generator import SynthConfig, synthesize_recording
from speech_bci.synthgen.schedule import ParadigmSchedule, generate_schedule

console = Console()

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
NEURAL = ("eegnet", "adnn")


def setup_logging(level: str) -> None:
    """RichHandler로 라이브러리 로그를 콘솔에 연결해요."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=False, show_path=False)],
        force=True,
    )


def _pipeline_options(name: str, args: argparse.Namespace) -> dict[str, Any]:
    if name not in NEURAL:
        return {}
    hyper = load_config(TrainHyper, args.hyper) if getattr(args, "hyper", None) else TrainHyper()
    if getattr(args, "max_epochs", None) is not None:
        hyper = update_config(hyper, max_epochs=args.max_epochs)
    return {"hyper": hyper}


def _read_schedule(path: str) -> ParadigmSchedule:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(f"cannot read schedule {path}: {e}") from e
    return ParadigmSchedule.from_json(text)


def _print_table(table: ResultTable, title: str) -> None:
    out = Table(title=title)
    out.add_column("# of subjects", style="cyan")
    for method in table.methods:
        out.add_column(method, justify="right")
    for subject, row in zip(table.subjects, table.accuracies, strict=True):
        out.add_row(subject, *(f"{v:.4f}" for v in row))
    if table.subjects:
        out.add_row("Avg.", *(f"{v:.4f}" for v in table.avg), style="bold green")
    if len(table.subjects) > 1:
        out.add_row("Std.", *(f"{v:.4f}" for v in table.std), style="green")
    console.print(out)


def _print_tests(tests: TestReport) -> None:
    out = Table(title=f"Paired t-tests vs {tests.reference} (Bonferroni, m={tests.m})")
    out.add_column("Method", style="cyan")
    out.add_column("t", justify="right")
    out.add_column("p", justify="right")
    out.add_column("p adjusted", justify="right")
    for test in tests.pairwise:
        p_adj = "n/a" if test.p_adjusted is None else f"{test.p_adjusted:.3g}"
        out.add_row(
            test.method,
            "n/a" if test.t is None else f"{test.t:.4f}",
            "n/a" if test.p is None else f"{test.p:.3g}",
            f"[bold yellow]{p_adj} *[/bold yellow]" if test.significant else p_adj,
        )
    console.print(out)


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = load_config(SynthConfig, args.config) if args.config else SynthConfig()
    if args.seed is not None:
        cfg = update_config(cfg, seed=args.seed)
    schedule = generate_schedule(args.trials_per_word, n_words=len(cfg.words), seed=cfg.seed)
    recording = synthesize_recording(schedule, cfg)

    out = Path(args.out)
    save_recording(recording, out)
    schedule_path = Path(args.schedule_out) if args.schedule_out else out.with_suffix(".schedule.json")
    schedule_path.parent.mkdir(parents=True, exist_ok=True)
    schedule_path.write_text(schedule.to_json(), encoding="utf-8")
    console.print(f"[green]Recording:[/green] [cyan]{out}[/cyan] ({recording.n_channels} ch, {recording.duration_s:.0f} s)")
    console.print(f"[green]Schedule:[/green] [cyan]{schedule_path}[/cyan] ({len(schedule.blanks)} trials)")
    return EXIT_OK


def cmd_preprocess(args: argparse.Namespace) -> int:
    cfg = load_config(PreprocessConfig, args.config) if args.config else PreprocessConfig()
    recording = load_recording(args.input)
    schedule = _read_schedule(args.schedule)
    epochs = preprocess(recording, schedule, cfg)
    save_epochs(epochs, args.out)
    console.print(
        f"[green]Epochs:[/green] [cyan]{args.out}[/cyan] "
        f"({len(epochs)} x {epochs.n_channels} x {epochs.n_samples} @ {epochs.fs:g} Hz)"
    )
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    epochs = load_epochs(args.data)
    pipeline = get_pipeline(args.pipeline, seed=args.seed, **_pipeline_options(args.pipeline, args))
    with console.status(f"[bold green]Training {args.pipeline}..."):
        pipeline.fit(epochs)
    directory = pipeline.save(args.out)
    console.print(f"[green]Model saved:[/green] [cyan]{directory}[/cyan]")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    epochs = load_epochs(args.data)
    options = _pipeline_options(args.pipeline, args)
    result = cross_validate(
        lambda fold_seed: get_pipeline(args.pipeline, seed=fold_seed, **options),
        epochs,
        k=args.folds,
        seed=args.seed,
        subject=args.subject,
        n_jobs=args.jobs,
    )
    frame = results_frame([result])
    write_results_csv(frame, args.out)

    if args.record:
        init_db()
        repository = ResultRepository()
        try:
            run_id = args.run_id or Path(args.out).stem
            repository.save_fold_results(run_id, args.pipeline, args.subject, args.seed, result.accuracies, len(epochs))
        finally:
            repository.close()

    out = Table(title=f"{args.pipeline} {args.folds}-fold accuracy ({args.subject})")
    out.add_column("Fold", style="cyan")
    out.add_column("Accuracy", justify="right")
    for fold, accuracy in enumerate(result.accuracies, 1):
        out.add_row(str(fold), f"{accuracy:.4f}")
    out.add_row("Mean", f"{result.mean:.4f}", style="bold green")
    console.print(out)
    console.print(f"[green]Results:[/green] [cyan]{args.out}[/cyan]")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    frame = pd.concat([read_results_csv(path) for path in args.results], ignore_index=True)
    table = results_to_table(frame)
    tests = compare_methods(table, args.reference, args.m)
    _print_table(table, "Accuracy")
    _print_tests(tests)

    if args.report:
        build_report(table, tests, "markdown", args.report)
        console.print(f"[green]Report:[/green] [cyan]{args.report}[/cyan]")
    if args.csv:
        build_report(table, tests, "csv", args.csv)
    if args.xlsx:
        build_report(table, tests, "xlsx", args.xlsx)
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    checks = check_fixtures()
    out = Table(title="Published table checks")
    out.add_column("Check", style="cyan")
    out.add_column("Expected")
    out.add_column("Observed", justify="right")
    out.add_column("Result")
    out.add_column("Note", style="dim")
    for check in checks:
        out.add_row(
            check.name,
            check.expected,
            f"{check.observed:.6g}",
            "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]",
            check.note,
        )
    console.print(out)
    passed = all_passed(checks)
    console.print(f"\n{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    if args.check and not passed:
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace) -> int:
    cfg = load_config(SynthConfig, args.config) if args.config else update_config(SynthConfig(), seed=args.seed)
    if args.separability is not None:
        cfg = update_config(cfg, separability=args.separability)
    options = {name: _pipeline_options(name, args) for name in args.pipelines}
    service = BenchmarkService(record=args.record, n_jobs=args.jobs, pipeline_options=options)

    console.print(
        Panel.fit(
            f"[bold magenta]Benchmark[/bold magenta]\n"
            f"subjects={args.subjects} pipelines={', '.join(args.pipelines)} folds={args.folds} seed={args.seed}",
            border_style="magenta",
        )
    )
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("Evaluating subjects...", total=args.subjects)
        result = service.run(
            args.subjects,
            args.pipelines,
            cfg,
            folds=args.folds,
            seed=args.seed,
            trials_per_word=args.trials_per_word,
            reference=args.reference,
            m=args.m,
            on_subject=lambda subject: progress.update(task, advance=1, description=f"{subject} done"),
        )
    if service.repository is not None:
        service.repository.close()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_results_csv(result.folds, out / "results.csv")
    build_report(result.table, result.tests, "markdown", out / "report.md")
    build_report(result.table, result.tests, "xlsx", out / "report.xlsx")

    _print_table(result.table, "Per-subject mean fold accuracy")
    if result.tests is not None:
        _print_tests(result.tests)
    if result.run_id:
        console.print(f"[green]Recorded run:[/green] {result.run_id}")
    console.print(f"[green]Outputs:[/green] [cyan]{out}[/cyan]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speech-bci", description="Imagined speech EEG decoding benchmark")
    parser.add_argument("--log-level", default=None, help="override SPEECH_BCI_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic recording and its paradigm schedule")
    p.add_argument("--config", help="SynthConfig JSON")
    p.add_argument("--out", required=True, help="output recording (.eegd)")
    p.add_argument("--schedule-out", help="schedule JSON path (default: <out>.schedule.json)")
    p.add_argument("--trials-per-word", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="notch, bandpass, resample and epoch a recording")
    p.add_argument("--in", dest="input", required=True, help="input recording (.eegd)")
    p.add_argument("--schedule", required=True, help="schedule JSON")
    p.add_argument("--config", help="PreprocessConfig JSON")
    p.add_argument("--out", required=True, help="output epochs (.eegd)")
    p.set_defaults(func=cmd_preprocess)

    def add_training(p: argparse.ArgumentParser) -> None:
        p.add_argument("--pipeline", required=True, choices=PIPELINES)
        p.add_argument("--data", required=True, help="epochs (.eegd)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--hyper", help="TrainHyper JSON (eegnet/adnn)")
        p.add_argument("--max-epochs", type=int, default=None)

    p = sub.add_parser("train", help="train one pipeline on all epochs")
    add_training(p)
    p.add_argument("--out", required=True, help="model directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="stratified k-fold cross-validation")
    add_training(p)
    p.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    p.add_argument("--subject", default="S1")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="results CSV")
    p.add_argument("--record", action="store_true", help="store fold results in the results database")
    p.add_argument("--run-id", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="statistical comparison of result CSVs")
    p.add_argument("--results", nargs="+", required=True)
    p.add_argument("--reference", default=None, help="reference method (default: last)")
    p.add_argument("--m", type=int, default=None, help="Bonferroni family size (default: number of comparisons)")
    p.add_argument("--report", help="markdown report path")
    p.add_argument("--csv", help="CSV table path")
    p.add_argument("--xlsx", help="Excel report path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fixtures", help="check the published result tables")
    p.add_argument("--check", action="store_true", help="exit non-zero when a check fails")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("benchmark", help="synthesize a cohort and run the full protocol")
    p.add_argument("--subjects", type=int, default=10)
    p.add_argument("--pipelines", nargs="+", default=list(PIPELINES), choices=PIPELINES)
    p.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials-per-word", type=int, default=50)
    p.add_argument("--separability", type=float, default=None)
    p.add_argument("--config", help="SynthConfig JSON")
    p.add_argument("--hyper", help="TrainHyper JSON (eegnet/adnn)")
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--reference", default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--record", action="store_true")
    p.add_argument("--out", default=None, help="output directory (default: SPEECH_BCI_OUTPUT_DIR)")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """명령줄 진입점.

    Returns:
        int: 종료 코드 (0 성공, 1 검증 오류, 2 수치 오류)
    """
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level.upper() if args.log_level else settings.log_level)
    torch.set_num_threads(settings.num_threads)
    if getattr(args, "out", "") is None:
        args.out = str(settings.output_dir)

    try:
        return int(args.func(args))
    except (ValidationError, pydantic.ValidationError) as e:
        console.print(f"[red]Error:[/red] {e}")
        return EXIT_VALIDATION
    except NumericError as e:
        console.print(f"[red]Numeric failure:[/red] {e}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
