"""CLI entry point for the RFF QRNG toolkit."""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import typer
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from rff_qrng import __version__
from rff_qrng.errors import RffQrngError
from rff_qrng.logging import configure_logging
from rff_qrng.runs import COMMANDS, RunResult, replay, run_and_record
from rff_qrng.settings import (
    AnalyzeSettings,
    BatterySettings,
    DetectSettings,
    SimulationSettings,
    SweepSettings,
    resolve_settings,
)

app = typer.Typer(
    name="rff-qrng",
    help="Simulate and test random-flip-flop quantum random number generators",
    add_completion=True,
    no_args_is_help=True,
)
console = Console(stderr=True)

CONFIG_OPTION = typer.Option(None, "--config", help="Flat key = value settings file")


@contextmanager
def _handle_errors() -> Iterator[None]:
    """Report domain and validation errors in red and exit with status 1."""
    try:
        yield
    except (RffQrngError, ValidationError) as error:
        console.print(f"[bold red]Error:[/bold red] {error}")
        raise typer.Exit(1) from error


def _echo_json(payload: Any) -> None:
    typer.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _report_outputs(result: RunResult, manifest: Path) -> None:
    table = Table(show_header=False, box=None)
    table.add_column(style="cyan", no_wrap=True)
    table.add_column()
    for path in result.outputs:
        table.add_row("wrote", str(path))
    table.add_row("manifest", str(manifest))
    console.print(table)


def _progress(label: str) -> None:
    console.print(f"[green]→ {label}[/green]")


def _record(command: str, settings: BaseModel, out: Path) -> RunResult:
    result, manifest = run_and_record(command, settings, out, on_progress=_progress)
    _report_outputs(result, manifest)
    return result


def _run_plain(command: str, settings: BaseModel) -> RunResult:
    """Run without writing files or a manifest (JSON goes to stdout)."""
    _, execute = COMMANDS[command]
    return execute(settings, None, None)


@app.callback(invoke_without_command=True)
def main(
    version: bool = typer.Option(False, "--version", help="Show version and exit"),
    verbose: int = typer.Option(
        0, "--verbose", "-v", count=True, help="-v for info, -vv for debug logs"
    ),
    json_logs: bool = typer.Option(
        False, "--json-logs", help="Log JSON records to stderr"
    ),
) -> None:
    """RFF QRNG CLI - simulate, predict and test photon-detection RFF generators."""
    if version:
        console.print(f"RFF QRNG CLI v{__version__}")
        raise typer.Exit()
    configure_logging(verbose, json_logs)


@app.command()
def generate(
    out: Path = typer.Option(Path("bits.bin"), "--out", help="Packed bitstream output"),
    stages: int | None = typer.Option(
        None, "--stages", help="Number of XORed TRFF stages"
    ),
    f_det: float | None = typer.Option(
        None, "--f-det", help="Detection rate per stage (Hz)"
    ),
    f_bit: float | None = typer.Option(None, "--f-bit", help="Sampling clock (Hz)"),
    dead_time: float | None = typer.Option(None, "--dead-time", help="Dead time (s)"),
    eta: float | None = typer.Option(
        None, "--eta", help="Threshold fraction in [0, 1]"
    ),
    t_rise: float | None = typer.Option(None, "--t-rise", help="Rise time (s)"),
    t_fall: float | None = typer.Option(None, "--t-fall", help="Fall time (s)"),
    zero_bias_eta: bool | None = typer.Option(
        None, "--zero-bias-eta", help="Use eta = t_fall / (t_rise + t_fall)"
    ),
    n_bits: str | None = typer.Option(
        None, "--n-bits", help="Bits to generate (1e8 ok)"
    ),
    seed: int | None = typer.Option(None, "--seed", help="64-bit base seed"),
    phase: float | None = typer.Option(None, "--phase", help="First clock edge (s)"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Simulate the QRNG and write a packed bitstream, sidecar and manifest."""
    with _handle_errors():
        settings = resolve_settings(
            SimulationSettings,
            config,
            stages=stages,
            f_det=f_det,
            f_bit=f_bit,
            dead_time=dead_time,
            eta=eta,
            t_rise=t_rise,
            t_fall=t_fall,
            zero_bias_eta=zero_bias_eta,
            n_bits=n_bits,
            seed=seed,
            phase=phase,
        )
        result = _record("generate", settings, out)
    if result.details:
        console.print(
            Panel(
                result.details,
                title="Generated bitstream",
                border_style="green",
            )
        )


@app.command()
def detect(
    out: Path = typer.Option(Path("detections.bin"), "--out", help="Timestamp export"),
    f_det: float | None = typer.Option(None, "--f-det", help="Detection rate (Hz)"),
    dead_time: float | None = typer.Option(None, "--dead-time", help="Dead time (s)"),
    n_events: str | None = typer.Option(None, "--n-events", help="Detections (1e6 ok)"),
    bin_width: float | None = typer.Option(
        None, "--bin-width", help="Histogram bin (s)"
    ),
    seed: int | None = typer.Option(None, "--seed", help="64-bit seed"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Export detection timestamps (uint64 ps) and fit the waiting-time histogram."""
    with _handle_errors():
        settings = resolve_settings(
            DetectSettings,
            config,
            f_det=f_det,
            dead_time=dead_time,
            n_events=n_events,
            bin_width=bin_width,
            seed=seed,
        )
        result = _record("detect", settings, out)
    _echo_json(result.summary)


def _sweep(
    command: str,
    out: Path,
    config: Path | None,
    k_max: int | None,
    **flags: Any,
) -> None:
    with _handle_errors():
        settings = resolve_settings(SweepSettings, config, k_max=k_max, **flags)
    if not settings.grid():
        raise typer.BadParameter(
            "the sweep grid is empty", param_hint="--f-bits/--f-dets"
        )
    if command == "sweep-autocorr" and settings.k_max < 1:
        raise typer.BadParameter("k_max must be at least 1", param_hint="--k-max")
    with _handle_errors():
        result = _record(command, settings, out)
    console.print(f"[bold green]✓[/bold green] {result.summary['rows']} rows")


@app.command("sweep-bias")
def sweep_bias(
    out: Path = typer.Option(Path("bias_sweep.csv"), "--out", help="CSV output"),
    f_bits: str | None = typer.Option(
        None, "--f-bits", help="Comma-separated f_bit (Hz)"
    ),
    f_dets: str | None = typer.Option(
        None, "--f-dets", help="Comma-separated f_det (Hz)"
    ),
    stages: int | None = typer.Option(None, "--stages"),
    dead_time: float | None = typer.Option(None, "--dead-time"),
    eta: float | None = typer.Option(None, "--eta"),
    t_rise: float | None = typer.Option(None, "--t-rise"),
    t_fall: float | None = typer.Option(None, "--t-fall"),
    zero_bias_eta: bool | None = typer.Option(None, "--zero-bias-eta"),
    n_bits: str | None = typer.Option(None, "--n-bits", help="Bits per point"),
    seed: int | None = typer.Option(None, "--seed"),
    phase: float | None = typer.Option(None, "--phase"),
    jobs: int | None = typer.Option(None, "--jobs", help="Worker processes"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Measured vs. predicted bias over an (f_bit, f_det) grid."""
    _sweep(
        "sweep-bias",
        out,
        config,
        None,
        f_bits=f_bits,
        f_dets=f_dets,
        stages=stages,
        dead_time=dead_time,
        eta=eta,
        t_rise=t_rise,
        t_fall=t_fall,
        zero_bias_eta=zero_bias_eta,
        n_bits=n_bits,
        seed=seed,
        phase=phase,
        jobs=jobs,
    )


@app.command("sweep-autocorr")
def sweep_autocorr(
    out: Path = typer.Option(Path("autocorr_sweep.csv"), "--out", help="CSV output"),
    f_bits: str | None = typer.Option(
        None, "--f-bits", help="Comma-separated f_bit (Hz)"
    ),
    f_dets: str | None = typer.Option(
        None, "--f-dets", help="Comma-separated f_det (Hz)"
    ),
    lambdas: str | None = typer.Option(
        None, "--lambdas", help="Comma-separated f_det / f_bit (replaces --f-dets)"
    ),
    k_max: int | None = typer.Option(None, "--k-max", help="Largest lag"),
    stages: int | None = typer.Option(None, "--stages"),
    dead_time: float | None = typer.Option(None, "--dead-time"),
    eta: float | None = typer.Option(None, "--eta"),
    t_rise: float | None = typer.Option(None, "--t-rise"),
    t_fall: float | None = typer.Option(None, "--t-fall"),
    n_bits: str | None = typer.Option(None, "--n-bits", help="Bits per point"),
    seed: int | None = typer.Option(None, "--seed"),
    phase: float | None = typer.Option(None, "--phase"),
    jobs: int | None = typer.Option(None, "--jobs", help="Worker processes"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Measured a_1 .. a_k_max over an (f_bit, f_det) or (f_bit, lambda) grid."""
    _sweep(
        "sweep-autocorr",
        out,
        config,
        k_max,
        f_bits=f_bits,
        f_dets=f_dets,
        lambdas=lambdas,
        stages=stages,
        dead_time=dead_time,
        eta=eta,
        t_rise=t_rise,
        t_fall=t_fall,
        n_bits=n_bits,
        seed=seed,
        phase=phase,
        jobs=jobs,
    )


@app.command()
def test(
    inputs: list[Path] = typer.Argument(..., help="Packed bitstream file(s)"),
    out: Path = typer.Option(Path("reports"), "--out", help="Report directory"),
    block_size: str | None = typer.Option(None, "--block-size", help="Bits per block"),
    tests: str | None = typer.Option(
        None, "--tests", help="Comma-separated test names"
    ),
    apen_m: str | None = typer.Option(None, "--apen-m", help="Comma-separated ApEn m"),
    jobs: int | None = typer.Option(None, "--jobs", help="Worker processes"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Run the statistical battery; exit 1 when any test fails aggregation."""
    with _handle_errors():
        settings = resolve_settings(
            BatterySettings,
            config,
            inputs=tuple(inputs),
            block_size=block_size,
            tests=tests,
            apen_m=apen_m,
            jobs=jobs,
        )
        result = _record("test", settings, out)

    table = Table(title="Statistical tests")
    table.add_column("Test", style="cyan")
    table.add_column("Result")
    for label, verdicts in result.summary["tests"].items():
        passed = sum(verdicts)
        style = "green" if passed == len(verdicts) else "red"
        table.add_row(label, f"[{style}]{passed}/{len(verdicts)} passed[/{style}]")
    console.print(table)
    if not result.ok:
        raise typer.Exit(1)


@app.command()
def analyze(
    input: Path = typer.Argument(..., help="Packed bitstream file"),
    out: Path | None = typer.Option(
        None, "--out", help="JSON output (stdout if omitted)"
    ),
    k_max: int | None = typer.Option(
        None, "--k-max", help="Largest autocorrelation lag"
    ),
    entropy_lengths: str | None = typer.Option(
        None, "--entropy-lengths", help="Comma-separated n-gram lengths"
    ),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Bias, autocorrelation profile and n-gram entropy of a bitstream."""
    with _handle_errors():
        settings = resolve_settings(
            AnalyzeSettings,
            config,
            input=input,
            k_max=k_max,
            entropy_lengths=entropy_lengths,
        )
        if out is None:
            result = _run_plain("analyze", settings)
        else:
            result = _record("analyze", settings, out)
    if out is None:
        _echo_json(result.summary)


@app.command()
def predict(
    out: Path | None = typer.Option(
        None, "--out", help="JSON output (stdout if omitted)"
    ),
    stages: int | None = typer.Option(None, "--stages"),
    f_det: float | None = typer.Option(None, "--f-det"),
    f_bit: float | None = typer.Option(None, "--f-bit"),
    dead_time: float | None = typer.Option(None, "--dead-time"),
    eta: float | None = typer.Option(None, "--eta"),
    t_rise: float | None = typer.Option(None, "--t-rise"),
    t_fall: float | None = typer.Option(None, "--t-fall"),
    zero_bias_eta: bool | None = typer.Option(None, "--zero-bias-eta"),
    config: Path | None = CONFIG_OPTION,
) -> None:
    """Closed-form bias, a_1, dwell times and XOR-chain estimates as JSON."""
    with _handle_errors():
        settings = resolve_settings(
            SimulationSettings,
            config,
            stages=stages,
            f_det=f_det,
            f_bit=f_bit,
            dead_time=dead_time,
            eta=eta,
            t_rise=t_rise,
            t_fall=t_fall,
            zero_bias_eta=zero_bias_eta,
        )
        if out is None:
            result = _run_plain("predict", settings)
        else:
            result = _record("predict", settings, out)
    if out is None:
        _echo_json(result.summary)


@app.command("replay")
def replay_command(
    manifest: Path = typer.Argument(..., help="A <output>.manifest.json file"),
    scratch: Path | None = typer.Option(
        None,
        "--scratch",
        help="Directory for regenerated outputs (temporary if omitted)",
    ),
) -> None:
    """Re-run a recorded command and verify every output digest."""
    with _handle_errors():
        produced = replay(manifest, scratch)
    console.print(
        f"[bold green]✓ Reproduced {len(produced)} output(s) bit-exactly[/bold green]"
    )


if __name__ == "__main__":
    app()
